//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest absolute entry, 0 for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Complex Gaussian entry with unit variance per component.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Dense kernels run single-threaded so results do not depend on the size of
/// the thread pool.
fn sequential() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    sequential();
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `(U, singular values, V)` with `m = U S V^*`.
fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = to_faer(m).svd().expect("svd converges");
    let s = svd.S().column_vector();
    let sv = (0..s.nrows()).map(|i| s[i].re).collect();
    (from_faer(svd.U()), sv, from_faer(svd.V()))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("svd converges")
}

/// Numerical rank with cutoff `tol * sigma_max`.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&top) => s.iter().filter(|&&x| x > tol * top && x > 0.0).count(),
    }
}

/// Numerical rank counting singular values above `cut`.
pub fn rank_abs(m: &CMatrix, cut: f64) -> usize {
    singular_values(m).iter().filter(|&&x| x > cut).count()
}

/// Thin factorization `m = left * right` with `left` having orthonormal
/// columns, truncated at numerical rank `tol * sigma_max`.
pub fn rank_factor(m: &CMatrix, tol: f64) -> (CMatrix, CMatrix) {
    let top = singular_values(m).first().copied().unwrap_or(0.0);
    rank_factor_abs(m, tol * top)
}

/// As `rank_factor`, keeping singular values above `cut`.
pub fn rank_factor_abs(m: &CMatrix, cut: f64) -> (CMatrix, CMatrix) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (CMatrix::zeros(rows, 0), CMatrix::zeros(0, cols));
    }
    let (u, s, v) = svd(m);
    let r = s.iter().filter(|&&x| x > cut && x > 0.0).count();
    let left = u.columns(0, r).into_owned();
    let right = CMatrix::from_fn(r, cols, |i, j| v[(j, i)].conj() * s[i]);
    (left, right)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &CMatrix, tol: f64) -> CMatrix {
    rank_factor(m, tol).0
}

/// Orthonormal basis of the span of singular directions above `cut`.
pub fn column_space_abs(m: &CMatrix, cut: f64) -> CMatrix {
    rank_factor_abs(m, cut).0
}

/// Orthonormal basis (as columns) of the null space of `m`; `tol` is
/// relative to the largest singular value.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return CMatrix::identity(cols, cols);
    }
    let (_, s, v) = svd(m);
    let top = s.first().copied().unwrap_or(0.0);
    let r = if top == 0.0 { 0 } else { s.iter().filter(|&&x| x > tol * top).count() };
    v.columns(r, cols - r).into_owned()
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<C64>> {
    if m.nrows() == 0 {
        return Some(Vec::new());
    }
    to_faer(m).eigenvalues().ok()
}

/// Groups values whose distance is below `tol`; returns cluster
/// representatives (means) and the smallest gap between distinct clusters.
pub fn cluster(values: &[C64], tol: f64) -> (Vec<(C64, usize)>, f64) {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &v in values {
        match clusters.iter_mut().find(|(m, _)| (*m - v).norm() < tol) {
            Some((m, k)) => {
                *m = (*m * (*k as f64) + v) / ((*k + 1) as f64);
                *k += 1;
            }
            None => clusters.push((v, 1)),
        }
    }
    let mut gap = f64::INFINITY;
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            gap = gap.min((clusters[i].0 - clusters[j].0).norm());
        }
    }
    clusters.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    (clusters, gap)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m = CMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!(max_abs(&(&m * &n)) < 1e-12);
    }

    #[test]
    fn wide_null_space_covers_domain() {
        let m = CMatrix::zeros(0, 4);
        assert_eq!(null_space(&m, 1e-12).ncols(), 4);
    }

    #[test]
    fn rank_factor_reconstructs() {
        let a = CMatrix::from_row_slice(2, 1, &[c(1.0), c(2.0)]);
        let b = CMatrix::from_row_slice(1, 3, &[c(1.0), c(0.5), c(-1.0)]);
        let m = &a * &b;
        let (l, r) = rank_factor(&m, 1e-12);
        assert_eq!(l.ncols(), 1);
        assert!(max_abs(&(&l * &r - &m)) < 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0), C64::new(0.0, 1.0)]));
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - C64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn clusters_merge_close_values() {
        let (cl, gap) = cluster(&[c(1.0), c(1.0 + 1e-9), c(2.0)], 1e-6);
        assert_eq!(cl.len(), 2);
        assert!((gap - 1.0).abs() < 1e-6);
    }
}
