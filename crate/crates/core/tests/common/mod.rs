//! Independent oracles for the integration tests. Nothing here goes through
//! the tensor product, the tube module or the center extraction.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use tubecat::CategorySpec;

pub type C = Complex64;

pub fn is_multiplicity_free(spec: &CategorySpec) -> bool {
    let n = spec.rank();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| spec.n(a, b, c) <= 1)))
}

/// `sum_{a,b,x,c} N[a][x][c] N[x][b][c]`.
pub fn tube_dim_by_channels(spec: &CategorySpec) -> usize {
    let n = spec.rank();
    let mut total = 0;
    for a in 0..n {
        for b in 0..n {
            for x in 0..n {
                for c in 0..n {
                    total += spec.n(a, x, c) * spec.n(x, b, c);
                }
            }
        }
    }
    total
}

/// Basis `(a, b, x, c)` of the tube algebra of a multiplicity-free category,
/// grouped by `(a, b)` and ordered lexicographically inside each group.
pub fn tube_labels(spec: &CategorySpec) -> Vec<(usize, usize, usize, usize)> {
    let n = spec.rank();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for x in 0..n {
                for c in 0..n {
                    if spec.n(a, x, c) * spec.n(x, b, c) > 0 {
                        out.push((a, b, x, c));
                    }
                }
            }
        }
    }
    out
}

fn ch(e: usize) -> (usize, usize, usize) {
    (e, 0, 0)
}

/// Product `s . t` of `t = (a, b, x, c)` and `s = (b, d, y, c')` read off
/// from three F-moves: coefficient of `(a, d, z, e)` is
/// `F[a,x,y,e][z,c] Finv[x,b,y,e][c,c'] F[x,y,d,e][c',z]`.
pub fn closed_form_product(
    spec: &CategorySpec,
    t: (usize, usize, usize, usize),
    s: (usize, usize, usize, usize),
) -> BTreeMap<(usize, usize, usize, usize), C> {
    let mut out = BTreeMap::new();
    let (a, b, x, c) = t;
    let (b2, d, y, c2) = s;
    if b != b2 {
        return out;
    }
    let n = spec.rank();
    for z in 0..n {
        if spec.n(x, y, z) == 0 {
            continue;
        }
        for e in 0..n {
            if spec.n(a, z, e) == 0 || spec.n(z, d, e) == 0 {
                continue;
            }
            let g = spec.f(a, x, y, e, ch(z), ch(c)) * spec.f_inv(x, b, y, e, ch(c), ch(c2)) * spec.f(x, y, d, e, ch(c2), ch(z));
            if g.norm() > 0.0 {
                *out.entry((a, d, z, e)).or_insert(C::new(0.0, 0.0)) += g;
            }
        }
    }
    out
}

/// Dense structure constants `m[(k, i * dim + j)]` of `e_i . e_j`.
pub fn closed_form_algebra(spec: &CategorySpec) -> (Vec<(usize, usize, usize, usize)>, DMatrix<C>) {
    assert!(is_multiplicity_free(spec), "the closed form assumes no fusion multiplicities");
    let labels = tube_labels(spec);
    let index: BTreeMap<_, _> = labels.iter().enumerate().map(|(k, &l)| (l, k)).collect();
    let dim = labels.len();
    let mut m = DMatrix::zeros(dim, dim * dim);
    for (i, &s) in labels.iter().enumerate() {
        for (j, &t) in labels.iter().enumerate() {
            for (l, v) in closed_form_product(spec, t, s) {
                m[(index[&l], i * dim + j)] += v;
            }
        }
    }
    (labels, m)
}

/// Rank by Gaussian elimination with complete pivoting.
pub fn gauss_rank(m: &DMatrix<C>, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().fold(0.0f64, |s, z| s.max(z.norm())).max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let mut best = (rank, col, 0.0);
        for r in rank..rows {
            for cc in col..cols {
                let v = a[(r, cc)].norm();
                if v > best.2 {
                    best = (r, cc, v);
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        a.swap_rows(rank, best.0);
        a.swap_columns(col, best.1);
        let p = a[(rank, col)];
        for r in rank + 1..rows {
            let f = a[(r, col)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for cc in col..cols {
                let v = a[(rank, cc)];
                a[(r, cc)] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the center of an algebra given by dense structure constants.
pub fn center_dim(dim: usize, m: &DMatrix<C>) -> usize {
    // z central iff sum_i z_i (e_i e_j - e_j e_i) = 0 for all j
    let mut stack = DMatrix::<C>::zeros(dim * dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            for k in 0..dim {
                stack[(j * dim + k, i)] = m[(k, i * dim + j)] - m[(k, j * dim + i)];
            }
        }
    }
    dim - gauss_rank(&stack, 1e-9)
}

/// Multiplication table `g h` of a pointed category read off the fusion rules.
pub fn group_table(spec: &CategorySpec) -> Option<Vec<Vec<usize>>> {
    let n = spec.rank();
    let mut t = vec![vec![0; n]; n];
    for g in 0..n {
        for h in 0..n {
            let prods: Vec<usize> = (0..n).filter(|&k| spec.n(g, h, k) > 0).collect();
            if prods.len() != 1 || spec.n(g, h, prods[0]) != 1 {
                return None;
            }
            t[g][h] = prods[0];
        }
    }
    Some(t)
}

/// Orbits of simultaneous conjugation on commuting pairs: the number of
/// simples of the quantum double of the group.
pub fn double_simples(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    let inv: Vec<usize> = (0..n).map(|g| (0..n).find(|&h| table[g][h] == 0).unwrap()).collect();
    let conj = |k: usize, g: usize| table[table[k][g]][inv[k]];
    let mut seen = BTreeSet::new();
    let mut orbits = 0;
    for g in 0..n {
        for h in 0..n {
            if table[g][h] != table[h][g] || seen.contains(&(g, h)) {
                continue;
            }
            orbits += 1;
            for k in 0..n {
                seen.insert((conj(k, g), conj(k, h)));
            }
        }
    }
    orbits
}

/// Scalar half-braidings `beta_g: Z_n -> C*` of a cyclic pointed category
/// with real `+-1` associator, generator 1. Returns `(g, twist)` per solution.
pub fn cyclic_scalar_half_braidings(spec: &CategorySpec) -> Vec<(usize, C)> {
    let table = group_table(spec).expect("pointed category");
    let n = table.len();
    let mul = |g: usize, h: usize| table[g][h];
    let omega = |a: usize, b: usize, c: usize| {
        let d = mul(mul(a, b), c);
        let w = spec.f(a, b, c, d, ch(mul(b, c)), ch(mul(a, b)));
        assert!((w.im.abs() < 1e-12) && ((w.re.abs() - 1.0).abs() < 1e-12), "oracle needs a +-1 associator");
        w.re
    };
    // powers of the generator, checking the group is cyclic
    let mut pow = vec![0];
    while pow.len() < n {
        pow.push(mul(*pow.last().unwrap(), 1.min(n - 1)));
    }
    assert_eq!(pow.iter().collect::<BTreeSet<_>>().len(), n, "oracle needs a cyclic group generated by 1");
    let mut out = Vec::new();
    for g in 0..n {
        let theta = |x: usize, y: usize| omega(g, x, y) * omega(x, g, y) * omega(x, y, g);
        // beta(pow[k+1]) = theta(pow[k], gen) beta(pow[k]) beta(gen), beta(e) = 1
        let prod: f64 = (1..n).map(|k| theta(pow[k], pow[1])).product();
        // beta(gen)^n * prod = 1
        for r in 0..n {
            let root = C::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / n as f64);
            let beta1 = root * C::new(1.0 / prod, 0.0).powf(1.0 / n as f64);
            let mut beta = vec![C::new(0.0, 0.0); n];
            beta[0] = C::new(1.0, 0.0);
            for k in 1..n {
                beta[pow[k]] = if k == 1 { beta1 } else { theta(pow[k - 1], pow[1]) * beta[pow[k - 1]] * beta1 };
            }
            let ok = (0..n).all(|x| {
                (0..n).all(|y| (beta[mul(x, y)] - theta(x, y) * beta[x] * beta[y]).norm() < 1e-9)
            });
            if ok {
                out.push((g, beta[g]));
            }
        }
    }
    out
}

pub fn has_value(values: &[C], z: C, tol: f64) -> bool {
    values.iter().any(|v| (v - z).norm() < tol)
}
