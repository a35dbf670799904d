//! The tube algebra `X(P, P)` for `P` the sum of all simples, its simple
//! modules, and the Drinfeld-center objects they carry.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fusion::CategorySpec;
use crate::homspace::{self, compose, id_tensor, tensor_id, Morphism, Object};
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};
use crate::tube::{self, TubeIndex, TubeVector};

/// Relative singular-value cutoff for ranks and null spaces of algebra data.
pub const RANK_TOL: f64 = 1e-8;
/// Distance below which two eigenvalues of a random element are merged.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Number of seeds tried before the spectral splitting gives up.
pub const MAX_ATTEMPTS: u64 = 8;

/// Structure constants of `X(P, P)`.
#[derive(Debug, Clone)]
pub struct TubeAlgebra {
    pub rank: usize,
    /// Basis ordered by `(a, b)` and then by the basis order of `X(a, b)`.
    pub basis: Vec<TubeIndex>,
    offsets: Vec<usize>,
    /// `gamma[i]` lists `(j, k, value)` with `e_i e_j = sum value e_k`,
    /// where `e_i e_j` means `e_i` after `e_j`.
    pub gamma: Vec<Vec<(usize, usize, C64)>>,
    pub unit: CVector,
    pub associativity_residual: f64,
    pub unit_residual: f64,
}

impl TubeAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Range of the `X(a, b)` summand in the global basis.
    pub fn range(&self, a: usize, b: usize) -> std::ops::Range<usize> {
        let k = a * self.rank + b;
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn embed(&self, t: &TubeVector) -> CVector {
        let mut v = CVector::zeros(self.dim());
        let r = self.range(t.a, t.b);
        v.rows_mut(r.start, r.len()).copy_from(&t.coeffs);
        v
    }

    pub fn restrict(&self, v: &CVector, a: usize, b: usize) -> TubeVector {
        let r = self.range(a, b);
        TubeVector { a, b, coeffs: v.rows(r.start, r.len()).into_owned() }
    }

    /// `u` after `v`.
    pub fn mul(&self, u: &CVector, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim());
        for (i, row) in self.gamma.iter().enumerate() {
            let ui = u[i];
            if ui == ZERO {
                continue;
            }
            for &(j, k, g) in row {
                out[k] += ui * v[j] * g;
            }
        }
        out
    }

    /// Matrix of `v -> u v`.
    pub fn left_matrix(&self, u: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (i, row) in self.gamma.iter().enumerate() {
            let ui = u[i];
            if ui == ZERO {
                continue;
            }
            for &(j, k, g) in row {
                m[(k, j)] += ui * g;
            }
        }
        m
    }

    /// Matrix of `v -> v u`.
    pub fn right_matrix(&self, u: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (i, row) in self.gamma.iter().enumerate() {
            for &(j, k, g) in row {
                m[(k, i)] += u[j] * g;
            }
        }
        m
    }

    fn basis_vector(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[i] = ONE;
        v
    }
}

/// Computes all products of basis elements and checks associativity and
/// the unit laws.
pub fn build_tube_algebra(spec: &CategorySpec) -> Result<TubeAlgebra> {
    let n = spec.rank();
    let mut basis = Vec::new();
    let mut offsets = vec![0];
    for a in 0..n {
        for b in 0..n {
            basis.extend(tube::tube_basis(spec, a, b));
            offsets.push(basis.len());
        }
    }
    let dim = basis.len();
    let start = |a: usize, b: usize| offsets[a * n + b];

    let gamma: Vec<Vec<(usize, usize, C64)>> = (0..dim)
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, usize, C64)>> {
            let bi = basis[i];
            let (b, cc) = (bi.a, bi.b);
            let s = TubeVector::basis(spec, b, cc, i - start(b, cc));
            let mut row = Vec::new();
            for a in 0..n {
                let r = start(a, b)..offsets[a * n + b + 1];
                for j in r {
                    let t = TubeVector::basis(spec, a, b, j - start(a, b));
                    let p = tube::tube_compose(spec, &s, &t)?;
                    let base = start(a, cc);
                    for (k, &z) in p.coeffs.iter().enumerate() {
                        if z.norm() > 1e-15 {
                            row.push((j, base + k, z));
                        }
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut unit = CVector::zeros(dim);
    for a in 0..n {
        let id = tube::tube_identity(spec, a);
        unit.rows_mut(start(a, a), id.coeffs.len()).copy_from(&id.coeffs);
    }

    let mut alg = TubeAlgebra {
        rank: n,
        basis,
        offsets,
        gamma,
        unit,
        associativity_residual: 0.0,
        unit_residual: 0.0,
    };

    let lefts: Vec<CMatrix> = (0..dim).map(|i| alg.left_matrix(&alg.basis_vector(i))).collect();
    let mut assoc: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let prod = alg.mul(&alg.basis_vector(i), &alg.basis_vector(j));
            let mut rhs = CMatrix::zeros(dim, dim);
            for (k, &z) in prod.iter().enumerate() {
                if z != ZERO {
                    rhs += &lefts[k] * z;
                }
            }
            assoc = assoc.max(linalg::max_abs(&(&lefts[i] * &lefts[j] - rhs)));
        }
    }
    let l1 = alg.left_matrix(&alg.unit);
    let r1 = alg.right_matrix(&alg.unit);
    let id = CMatrix::identity(dim, dim);
    alg.associativity_residual = assoc;
    alg.unit_residual = linalg::max_abs(&(&l1 - &id)).max(linalg::max_abs(&(&r1 - &id)));
    let tol = 10.0 * spec.tolerance;
    if assoc > tol || alg.unit_residual > tol {
        return Err(Error::Numerical(format!(
            "tube algebra fails associativity ({assoc:.3e}) or unit laws ({:.3e})",
            alg.unit_residual
        )));
    }
    Ok(alg)
}

/// Simple modules of the tube algebra.
#[derive(Debug, Clone)]
pub struct IrrepDecomposition {
    pub central: Vec<CVector>,
    pub primitive: Vec<CVector>,
    /// Simple `b_i` whose diagonal block carries the primitive idempotent.
    pub base: Vec<usize>,
    /// `n[i][a] = dim p_i X(a, b_i)`.
    pub n: Vec<Vec<usize>>,
    pub dims: Vec<usize>,
    /// `modules[i][a]`: orthonormal basis (columns, coordinates of
    /// `X(a, b_i)`) of `p_i X(a, b_i)`.
    pub modules: Vec<Vec<CMatrix>>,
    pub center_dim: usize,
    pub attempts: u64,
    pub orthogonality_residual: f64,
    pub completeness_residual: f64,
}

/// Orthonormal basis of the center of the algebra.
pub fn algebra_center(alg: &TubeAlgebra) -> CMatrix {
    let dim = alg.dim();
    let mut stack = CMatrix::zeros(dim * dim, dim);
    for j in 0..dim {
        let ej = alg.basis_vector(j);
        let comm = alg.right_matrix(&ej) - alg.left_matrix(&ej);
        stack.view_mut((j * dim, 0), (dim, dim)).copy_from(&comm);
    }
    linalg::null_space(&stack, RANK_TOL)
}

fn polish(alg: &TubeAlgebra, e: &CVector) -> CVector {
    let mut p = e.clone();
    for _ in 0..3 {
        let p2 = alg.mul(&p, &p);
        let p3 = alg.mul(&p2, &p);
        p = p2 * C64::new(3.0, 0.0) - p3 * C64::new(2.0, 0.0);
    }
    p
}

/// Splits the tube algebra into simple blocks by the spectrum of a random
/// central element, then refines each block to a primitive idempotent.
pub fn decompose(alg: &TubeAlgebra, seed: u64) -> Result<IrrepDecomposition> {
    let z = algebra_center(alg);
    let zdim = z.ncols();
    let zadj = z.adjoint();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        let coeffs = CVector::from_fn(zdim, |_, _| linalg::gaussian(&mut rng));
        let r = &z * coeffs;
        let lr = alg.left_matrix(&r);
        let m = &zadj * &lr * &z;
        let ev = linalg::eigenvalues(&m).ok_or_else(|| Error::NonConvergence("center spectrum".into()))?;
        let (clusters, gap) = linalg::cluster(&ev, CLUSTER_TOL);
        if clusters.len() != zdim || gap < CLUSTER_TOL {
            continue;
        }
        let mut central = Vec::with_capacity(zdim);
        for &(lambda, _) in &clusters {
            let shifted = &m - CMatrix::identity(zdim, zdim) * lambda;
            let nv = linalg::null_space(&shifted, 1e-7);
            if nv.ncols() != 1 {
                return Err(Error::Numerical(format!("eigenvalue {lambda} has {} null vectors", nv.ncols())));
            }
            let e = &z * nv.column(0);
            let e2 = alg.mul(&e, &e);
            let k = (0..e.len()).max_by(|&i, &j| e[i].norm().partial_cmp(&e[j].norm()).unwrap()).unwrap();
            let scale = e2[k] / e[k];
            central.push(polish(alg, &(e / scale)));
        }
        return finish_decomposition(alg, central, &mut rng, attempt + 1, zdim);
    }
    Err(Error::NonConvergence(format!(
        "eigenvalues of random central elements stayed closer than {CLUSTER_TOL} after {MAX_ATTEMPTS} seeds"
    )))
}

fn finish_decomposition(
    alg: &TubeAlgebra,
    central: Vec<CVector>,
    rng: &mut ChaCha8Rng,
    attempts: u64,
    center_dim: usize,
) -> Result<IrrepDecomposition> {
    let rank = alg.rank;
    let mut orth: f64 = 0.0;
    for (i, ei) in central.iter().enumerate() {
        for (j, ej) in central.iter().enumerate() {
            let p = alg.mul(ei, ej);
            let want = if i == j { ei.clone() } else { CVector::zeros(alg.dim()) };
            orth = orth.max(linalg::max_abs_vec(&(p - want)));
        }
    }
    let sum: CVector = central.iter().fold(CVector::zeros(alg.dim()), |acc, e| acc + e);
    let complete = linalg::max_abs_vec(&(sum - &alg.unit));

    let mut primitive = Vec::new();
    let mut base = Vec::new();
    let mut ns = Vec::new();
    let mut dims = Vec::new();
    let mut modules = Vec::new();
    for e in &central {
        let le = alg.left_matrix(e);
        let corner_dims: Vec<usize> = (0..rank)
            .map(|a| {
                let r = alg.range(a, a);
                let blk = le.view((r.start, r.start), (r.len(), r.len())).into_owned();
                let k = linalg::rank_abs(&blk, RANK_TOL);
                (k as f64).sqrt().round() as usize
            })
            .collect();
        let b = (0..rank)
            .filter(|&a| corner_dims[a] > 0)
            .min_by_key(|&a| (corner_dims[a], a))
            .ok_or_else(|| Error::Numerical("central idempotent with empty support".into()))?;
        let eb = alg.embed(&alg.restrict(e, b, b));
        let p = if corner_dims[b] == 1 { eb } else { primitive_in_corner(alg, &eb, b, corner_dims[b], rng)? };

        let lp = alg.left_matrix(&p);
        let mut na = Vec::with_capacity(rank);
        let mut mods = Vec::with_capacity(rank);
        for a in 0..rank {
            let rows = alg.range(a, b);
            let cols = alg.range(a, b);
            let blk = lp.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned();
            let basis = linalg::column_space_abs(&blk, RANK_TOL);
            na.push(basis.ncols());
            mods.push(basis);
        }
        for a in 0..rank {
            if na[a] != corner_dims[a] {
                return Err(Error::Numerical(format!(
                    "module dimension {} at {a} disagrees with block size {}",
                    na[a], corner_dims[a]
                )));
            }
        }
        dims.push(na.iter().sum());
        ns.push(na);
        modules.push(mods);
        primitive.push(p);
        base.push(b);
    }
    Ok(IrrepDecomposition {
        central,
        primitive,
        base,
        n: ns,
        dims,
        modules,
        center_dim,
        attempts,
        orthogonality_residual: orth,
        completeness_residual: complete,
    })
}

/// A rank-one idempotent inside the corner `e X(b, b) e`, which is a full
/// matrix algebra of size `k`.
fn primitive_in_corner(alg: &TubeAlgebra, e: &CVector, b: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<CVector> {
    let r = alg.range(b, b);
    let le = alg.left_matrix(e);
    let re = alg.right_matrix(e);
    let proj = &le * &re;
    let blk = proj.view((r.start, r.start), (r.len(), r.len())).into_owned();
    let q_local = linalg::column_space_abs(&blk, RANK_TOL);
    if q_local.ncols() != k * k {
        return Err(Error::Numerical(format!("corner of size {} is not {k}x{k}", q_local.ncols())));
    }
    let mut q = CMatrix::zeros(alg.dim(), k * k);
    q.view_mut((r.start, 0), (r.len(), k * k)).copy_from(&q_local);
    let qadj = q.adjoint();
    for _ in 0..MAX_ATTEMPTS {
        let y = &q * CVector::from_fn(k * k, |_, _| linalg::gaussian(rng));
        let ly = &qadj * alg.left_matrix(&y) * &q;
        let ev = linalg::eigenvalues(&ly).ok_or_else(|| Error::NonConvergence("corner spectrum".into()))?;
        let (clusters, gap) = linalg::cluster(&ev, CLUSTER_TOL);
        if clusters.len() != k || gap < CLUSTER_TOL || clusters.iter().any(|&(_, m)| m != k) {
            continue;
        }
        let l0 = clusters[0].0;
        let mut p = e.clone();
        for &(lj, _) in &clusters[1..] {
            let shifted = &y - e * lj;
            p = alg.mul(&shifted, &p) / (l0 - lj);
        }
        return Ok(polish(alg, &p));
    }
    Err(Error::NonConvergence(format!("could not split the corner at {b}")))
}

/// Residuals of the half-braiding axioms for one object.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BraidingResiduals {
    pub hexagon: f64,
    pub naturality: f64,
    pub unit: f64,
    /// Largest condition number over all `gamma_{z,x}` blocks.
    pub condition: f64,
}

/// A simple object of the center: `z = sum_a a^{n_a}` with `gamma_{z,x}`.
#[derive(Debug, Clone)]
pub struct CenterObject {
    pub n: Vec<usize>,
    pub object: Object,
    /// `half_braiding[x]: z x -> x z`.
    pub half_braiding: Vec<Morphism>,
    pub qdim: f64,
    pub twist: C64,
    pub residuals: BraidingResiduals,
}

/// Representation matrix `v -> v . s` on the module, for `s` in `X(a', a)`,
/// in orthonormal module coordinates.
fn act(
    spec: &CategorySpec,
    dec: &IrrepDecomposition,
    i: usize,
    v_at: usize,
    beta: usize,
    s: &TubeVector,
) -> Result<CVector> {
    let b = dec.base[i];
    let col = dec.modules[i][v_at].column(beta).into_owned();
    let v = TubeVector { a: v_at, b, coeffs: col };
    let w = tube::tube_compose(spec, &v, s)?;
    Ok(dec.modules[i][s.a].adjoint() * w.coeffs)
}

/// Builds `gamma_{z,x}` for every simple `x` from the module structure and
/// checks the half-braiding axioms.
pub fn extract_center_object(spec: &CategorySpec, dec: &IrrepDecomposition, i: usize) -> Result<CenterObject> {
    let rank = spec.rank();
    let n = dec.n[i].clone();
    let z = Object::from_multiplicities(&n);
    // summand index of (a, beta) in z
    let mut term_of = vec![Vec::new(); rank];
    let mut k = 0;
    for a in 0..rank {
        for _ in 0..n[a] {
            term_of[a].push(k);
            k += 1;
        }
    }

    let mut half_braiding = vec![None; rank];
    for x in 0..rank {
        let xd = spec.dual[x];
        let xo = Object::simple(x);
        let xdo = Object::simple(xd);
        let src = xo.tensor(&z).tensor(&xdo);
        let mut phi = Morphism::zeros(spec, src.clone(), z.clone());
        let so = homspace::term_offsets(spec, &src);
        let to = homspace::term_offsets(spec, &z);
        for bp in 0..rank {
            if n[bp] == 0 {
                continue;
            }
            let word = vec![x, bp, xd];
            let counts = homspace::tree_counts(spec, &word);
            for a in 0..rank {
                if n[a] == 0 || counts[a] == 0 {
                    continue;
                }
                for t in 0..counts[a] {
                    let u = homspace::tree_vector(spec, &word, a, t);
                    let cap = id_tensor(spec, &Object::word(&[x, bp]), &homspace::ev_left(spec, x))?;
                    let g = compose(&cap, &tensor_id(spec, &u, &xo)?)?;
                    let s = tube::pi(spec, a, bp, &[x], &g)?;
                    for bq in 0..n[bp] {
                        let coords = act(spec, dec, i, bp, bq, &s)?;
                        let col = so[a][term_of[bp][bq]] + t;
                        for (beta, &val) in coords.iter().enumerate() {
                            let row = to[a][term_of[a][beta]];
                            phi.blocks[a][(row, col)] += val;
                        }
                    }
                }
            }
        }
        let lift = tensor_id(spec, &homspace::coev(spec, x), &z.tensor(&xdo))?;
        let gamma = compose(&id_tensor(spec, &xdo, &phi)?, &lift)?;
        half_braiding[xd] = Some(gamma);
    }
    let half_braiding: Vec<Morphism> = half_braiding.into_iter().map(|g| g.expect("every simple is a dual")).collect();

    let residuals = braiding_residuals(spec, &z, &half_braiding)?;
    let tol = 10.0 * spec.tolerance;
    if residuals.hexagon > tol || residuals.naturality > tol || residuals.unit > tol {
        return Err(Error::Numerical(format!(
            "half-braiding of irrep {i} fails: hexagon {:.3e}, naturality {:.3e}, unit {:.3e}",
            residuals.hexagon, residuals.naturality, residuals.unit
        )));
    }
    if !residuals.condition.is_finite() {
        return Err(Error::Numerical(format!("half-braiding of irrep {i} is singular")));
    }

    let qdim: f64 = (0..rank).map(|a| n[a] as f64 * spec.pivotal_dim(a).re).sum();
    let gzz = braid_with_object(spec, &z, &half_braiding, &z)?;
    let twist = homspace::pivotal_trace(spec, &gzz)? / qdim;
    Ok(CenterObject { n, object: z, half_braiding, qdim, twist, residuals })
}

/// `gamma_{z,w}: z w -> w z` for an object `w` made of one-letter summands,
/// assembled from the simple components.
pub fn braid_with_object(spec: &CategorySpec, z: &Object, gamma: &[Morphism], w: &Object) -> Result<Morphism> {
    let src = z.tensor(w);
    let tgt = w.tensor(z);
    let mut out = Morphism::zeros(spec, src, tgt);
    let nz = z.terms.len();
    let nw = w.terms.len();
    for (j, wj) in w.terms.iter().enumerate() {
        let [x] = wj.as_slice() else {
            return Err(Error::Shape("braiding needs one-letter summands".into()));
        };
        let g = &gamma[*x];
        for i in 0..nz {
            for ip in 0..nz {
                let piece = g.component(spec, ip, i);
                out.add_component(spec, j * nz + ip, i * nw + j, &piece);
            }
        }
    }
    Ok(out)
}

/// Hexagon, naturality, unit and invertibility residuals of a candidate
/// half-braiding.
pub fn braiding_residuals(spec: &CategorySpec, z: &Object, gamma: &[Morphism]) -> Result<BraidingResiduals> {
    let rank = spec.rank();
    let mut res = BraidingResiduals { condition: 1.0, ..Default::default() };
    for blk in &gamma[0].blocks {
        let k = blk.nrows();
        res.unit = res.unit.max(linalg::max_abs(&(blk - CMatrix::identity(k, k))));
    }
    for g in gamma {
        for blk in &g.blocks {
            if blk.nrows() == 0 {
                continue;
            }
            let s = linalg::singular_values(blk);
            let lo = *s.last().unwrap();
            let cond = if lo > 0.0 { s[0] / lo } else { f64::INFINITY };
            res.condition = res.condition.max(cond);
        }
    }
    for x in 0..rank {
        for y in 0..rank {
            let xo = Object::simple(x);
            let yo = Object::simple(y);
            let two_step = compose(
                &id_tensor(spec, &xo, &gamma[y])?,
                &tensor_id(spec, &gamma[x], &yo)?,
            )?;
            let word = [x, y];
            let mut summed = Morphism::zeros(spec, two_step.source.clone(), two_step.target.clone());
            for (w, &k) in homspace::tree_counts(spec, &word).iter().enumerate() {
                for t in 0..k {
                    let u = homspace::tree_vector(spec, &word, w, t);
                    let ut = homspace::tree_covector(spec, &word, w, t);
                    let lhs = compose(&tensor_id(spec, &u, z)?, &gamma[w])?;
                    let rhs = compose(&two_step, &id_tensor(spec, z, &u)?)?;
                    res.naturality = res.naturality.max(lhs.distance(&rhs));
                    summed.add_assign(&compose(&lhs, &id_tensor(spec, z, &ut)?)?)?;
                }
            }
            res.hexagon = res.hexagon.max(summed.distance(&two_step));
        }
    }
    Ok(res)
}

/// Sort key `(qdim, twist argument, n)` on a 1e-6 grid.
fn order_key(o: &CenterObject) -> (i64, i64, Vec<usize>) {
    let mut arg = o.twist.arg();
    if arg <= -std::f64::consts::PI + 1e-6 {
        arg = std::f64::consts::PI;
    }
    ((o.qdim * 1e6).round() as i64, (arg * 1e6).round() as i64, o.n.clone())
}

/// Extracts every simple of the center, ordered for reporting.
pub fn extract_all(spec: &CategorySpec, dec: &IrrepDecomposition) -> Result<Vec<CenterObject>> {
    let mut objs: Vec<CenterObject> = (0..dec.n.len())
        .into_par_iter()
        .map(|i| extract_center_object(spec, dec, i))
        .collect::<Result<_>>()?;
    objs.sort_by_key(order_key);
    Ok(objs)
}

/// Outcome of the global consistency checks on the extracted center.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterReport {
    pub count: usize,
    pub expected_count: Option<usize>,
    pub sum_qdim_sq: f64,
    /// `(sum_a d_a^2)^2`.
    pub global_dim: f64,
    pub hexagon_max: f64,
    pub naturality_max: f64,
    /// `dim Hom(z_i, z_j)` between the extracted objects.
    pub hom_dims: Vec<Vec<usize>>,
    pub twist_modulus_max: f64,
}

impl CenterReport {
    pub fn pass(&self, tolerance: f64) -> bool {
        let n = self.count;
        let hom_ok = (0..n).all(|i| (0..n).all(|j| self.hom_dims[i][j] == usize::from(i == j)));
        self.expected_count.is_none_or(|e| e == n)
            && ((self.sum_qdim_sq - self.global_dim) / self.global_dim).abs() < 1e-8
            && self.hexagon_max < 10.0 * tolerance
            && self.naturality_max < 10.0 * tolerance
            && self.twist_modulus_max < 1e-8
            && hom_ok
    }
}

/// Dimension of the space of maps `z_i -> z_j` commuting with the
/// half-braidings.
pub fn intertwiner_dim(spec: &CategorySpec, zi: &CenterObject, zj: &CenterObject) -> Result<usize> {
    let probe = Morphism::zeros(spec, zi.object.clone(), zj.object.clone());
    let dim = probe.hom_dim();
    if dim == 0 {
        return Ok(0);
    }
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for k in 0..dim {
        let mut e = vec![ZERO; dim];
        e[k] = ONE;
        let phi = Morphism::from_vec(spec, zi.object.clone(), zj.object.clone(), &e)?;
        let mut col = Vec::new();
        for x in 0..spec.rank() {
            let xo = Object::simple(x);
            let lhs = compose(&id_tensor(spec, &xo, &phi)?, &zi.half_braiding[x])?;
            let rhs = compose(&zj.half_braiding[x], &tensor_id(spec, &phi, &xo)?)?;
            col.extend(lhs.sub(&rhs)?.to_vec());
        }
        rows.push(col);
    }
    let m = CMatrix::from_fn(rows[0].len(), dim, |r, c| rows[c][r]);
    Ok(linalg::null_space(&m, RANK_TOL).ncols())
}

pub fn verify_center(
    spec: &CategorySpec,
    objects: &[CenterObject],
    expected_count: Option<usize>,
) -> Result<CenterReport> {
    let d2: f64 = (0..spec.rank()).map(|a| spec.pivotal_dim(a).norm_sqr()).sum();
    let sum_qdim_sq = objects.iter().map(|o| o.qdim * o.qdim).sum();
    let hom_dims = objects
        .par_iter()
        .map(|zi| objects.iter().map(|zj| intertwiner_dim(spec, zi, zj)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(CenterReport {
        count: objects.len(),
        expected_count,
        sum_qdim_sq,
        global_dim: d2 * d2,
        hexagon_max: objects.iter().map(|o| o.residuals.hexagon).fold(0.0, f64::max),
        naturality_max: objects.iter().map(|o| o.residuals.naturality).fold(0.0, f64::max),
        hom_dims,
        twist_modulus_max: objects.iter().map(|o| (o.twist.norm() - 1.0).abs()).fold(0.0, f64::max),
    })
}

/// `S` and `T` of the center with diagnostics.
#[derive(Debug, Clone)]
pub struct ModularData {
    pub s: CMatrix,
    pub t: Vec<C64>,
    pub unitarity_residual: f64,
    /// Distance of `S^2` from the charge-conjugation permutation.
    pub s_squared_residual: f64,
    pub modular: bool,
}

pub fn modular_data(spec: &CategorySpec, objects: &[CenterObject]) -> Result<ModularData> {
    let k = objects.len();
    let d2: f64 = (0..spec.rank()).map(|a| spec.pivotal_dim(a).norm_sqr()).sum();
    let entries: Vec<Vec<C64>> = objects
        .par_iter()
        .map(|zi| {
            objects
                .iter()
                .map(|zj| {
                    let cij = braid_with_object(spec, &zi.object, &zi.half_braiding, &zj.object)?;
                    let cji = braid_with_object(spec, &zj.object, &zj.half_braiding, &zi.object)?;
                    Ok(homspace::pivotal_trace(spec, &compose(&cji, &cij)?)? / d2)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let s = CMatrix::from_fn(k, k, |i, j| entries[i][j]);
    let t: Vec<C64> = objects.iter().map(|o| o.twist).collect();
    let unitarity_residual = linalg::max_abs(&(&s * s.adjoint() - CMatrix::identity(k, k)));
    let s2 = &s * &s;
    let mut s_squared_residual: f64 = 0.0;
    for i in 0..k {
        let ones: Vec<usize> = (0..k).filter(|&j| (s2[(i, j)] - ONE).norm() < 1e-6).collect();
        let zeros = (0..k).filter(|&j| s2[(i, j)].norm() < 1e-6).count();
        if ones.len() != 1 || zeros != k - 1 {
            s_squared_residual = s_squared_residual.max(1.0);
        }
        let j = ones.first().copied().unwrap_or(i);
        let mut perm = CVector::zeros(k);
        perm[j] = ONE;
        s_squared_residual = s_squared_residual.max(linalg::max_abs_vec(&(s2.row(i).transpose() - perm)));
    }
    let modular = unitarity_residual < 1e-8;
    Ok(ModularData { s, t, unitarity_residual, s_squared_residual, modular })
}
