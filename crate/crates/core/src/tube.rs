//! Hom spaces of the tube category, realized as `X(a, b) = sum_x Hom(a x, x b)`
//! over simple `x`, with the renormalization map `pi` and composition.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::CategorySpec;
use crate::homspace::{self, compose, id_tensor, tensor_id, Morphism, Object};
use crate::linalg::{CVector, C64, ONE, ZERO};

/// Basis label `(x, c, mu, nu)` with `mu: c -> a x` and `nu: c -> x b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TubeIndex {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub c: usize,
    pub mu: usize,
    pub nu: usize,
}

/// Basis of `X(a, b)` in lexicographic `(x, c, mu, nu)` order.
pub fn tube_basis(spec: &CategorySpec, a: usize, b: usize) -> Vec<TubeIndex> {
    let n = spec.rank();
    let mut out = Vec::new();
    for x in 0..n {
        for c in 0..n {
            for mu in 0..spec.n(a, x, c) {
                for nu in 0..spec.n(x, b, c) {
                    out.push(TubeIndex { a, b, x, c, mu, nu });
                }
            }
        }
    }
    out
}

pub fn tube_hom_dim(spec: &CategorySpec, a: usize, b: usize) -> usize {
    let n = spec.rank();
    (0..n)
        .flat_map(|x| (0..n).map(move |c| (x, c)))
        .map(|(x, c)| spec.n(a, x, c) * spec.n(x, b, c))
        .sum()
}

/// Start of each `x` sector in the basis of `X(a, b)`; the last entry is the
/// dimension.
fn sector_offsets(spec: &CategorySpec, a: usize, b: usize) -> Vec<usize> {
    let n = spec.rank();
    let mut off = vec![0];
    let mut acc = 0;
    for x in 0..n {
        acc += (0..n).map(|c| spec.n(a, x, c) * spec.n(x, b, c)).sum::<usize>();
        off.push(acc);
    }
    off
}

/// An element of `X(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeVector {
    pub a: usize,
    pub b: usize,
    pub coeffs: CVector,
}

impl TubeVector {
    pub fn zeros(spec: &CategorySpec, a: usize, b: usize) -> Self {
        TubeVector { a, b, coeffs: CVector::zeros(tube_hom_dim(spec, a, b)) }
    }

    pub fn basis(spec: &CategorySpec, a: usize, b: usize, k: usize) -> Self {
        let mut t = TubeVector::zeros(spec, a, b);
        t.coeffs[k] = ONE;
        t
    }

    pub fn distance(&self, other: &TubeVector) -> f64 {
        if (self.a, self.b) != (other.a, other.b) {
            return f64::INFINITY;
        }
        (&self.coeffs - &other.coeffs).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// The `x` component as a morphism `a x -> x b`.
    pub fn sector(&self, spec: &CategorySpec, x: usize) -> Morphism {
        let (a, b) = (self.a, self.b);
        let mut m = Morphism::zeros(spec, Object::word(&[a, x]), Object::word(&[x, b]));
        let mut k = sector_offsets(spec, a, b)[x];
        for c in 0..spec.rank() {
            for mu in 0..spec.n(a, x, c) {
                for nu in 0..spec.n(x, b, c) {
                    m.blocks[c][(nu, mu)] = self.coeffs[k];
                    k += 1;
                }
            }
        }
        m
    }

    fn add_sector(&mut self, spec: &CategorySpec, x: usize, m: &Morphism) {
        let (a, b) = (self.a, self.b);
        let mut k = sector_offsets(spec, a, b)[x];
        for c in 0..spec.rank() {
            for mu in 0..spec.n(a, x, c) {
                for nu in 0..spec.n(x, b, c) {
                    self.coeffs[k] += m.blocks[c][(nu, mu)];
                    k += 1;
                }
            }
        }
    }

    /// Simples `x` whose sector is not identically zero.
    pub fn support(&self, spec: &CategorySpec) -> Vec<usize> {
        let off = sector_offsets(spec, self.a, self.b);
        (0..spec.rank())
            .filter(|&x| (off[x]..off[x + 1]).any(|k| self.coeffs[k] != ZERO))
            .collect()
    }
}

/// Representative `a x -> x b` of a basis element.
pub fn basis_morphism(spec: &CategorySpec, idx: TubeIndex) -> Morphism {
    let mut m = Morphism::zeros(spec, Object::word(&[idx.a, idx.x]), Object::word(&[idx.x, idx.b]));
    m.blocks[idx.c][(idx.nu, idx.mu)] = ONE;
    m
}

/// Renormalization of `h: a W -> W b` into `X(a, b)`, splitting `W` into
/// simples along its fusion-tree basis.
pub fn pi(spec: &CategorySpec, a: usize, b: usize, w: &[usize], h: &Morphism) -> Result<TubeVector> {
    let src = Object::word(&[&[a], w].concat());
    let tgt = Object::word(&[w, &[b]].concat());
    if h.source != src || h.target != tgt {
        return Err(Error::Shape(format!(
            "pi expects a map {:?} -> {:?}, got {:?} -> {:?}",
            src.terms, tgt.terms, h.source.terms, h.target.terms
        )));
    }
    let mut out = TubeVector::zeros(spec, a, b);
    if w.len() == 1 {
        out.add_sector(spec, w[0], h);
        return Ok(out);
    }
    let ao = Object::simple(a);
    let bo = Object::simple(b);
    let counts = homspace::tree_counts(spec, w);
    for (z, &k) in counts.iter().enumerate() {
        for t in 0..k {
            let u = homspace::tree_vector(spec, w, z, t);
            let ut = homspace::tree_covector(spec, w, z, t);
            let right = id_tensor(spec, &ao, &u)?;
            let left = tensor_id(spec, &ut, &bo)?;
            let piece = compose(&left, &compose(h, &right)?)?;
            out.add_sector(spec, z, &piece);
        }
    }
    Ok(out)
}

/// Horizontal contraction `(id_x g)(f id_y): a x y -> x y c` of
/// `f: a x -> x b` and `g: b y -> y c`.
pub fn contract(spec: &CategorySpec, f: &Morphism, g: &Morphism) -> Result<Morphism> {
    let x = f.target.as_word().and_then(|w| w.split_last()).map(|(_, x)| x.to_vec());
    let y = g.source.as_word().and_then(|w| w.split_first()).map(|(_, y)| y.to_vec());
    let (Some(xw), Some(yw)) = (x, y) else {
        return Err(Error::Shape("contraction needs word-shaped tensors".into()));
    };
    let lhs = tensor_id(spec, f, &Object::word(&yw))?;
    let rhs = id_tensor(spec, &Object::word(&xw), g)?;
    compose(&rhs, &lhs)
}

/// `s . t` for `t` in `X(a, b)` and `s` in `X(b, c)`.
pub fn tube_compose(spec: &CategorySpec, s: &TubeVector, t: &TubeVector) -> Result<TubeVector> {
    if t.b != s.a {
        return Err(Error::Bond(format!("cannot compose X({},{}) after X({},{})", s.a, s.b, t.a, t.b)));
    }
    let mut out = TubeVector::zeros(spec, t.a, s.b);
    let ts = t.support(spec);
    let ss = s.support(spec);
    for &x in &ts {
        let f = t.sector(spec, x);
        for &y in &ss {
            let g = s.sector(spec, y);
            let h = contract(spec, &f, &g)?;
            let part = pi(spec, t.a, s.b, &[x, y], &h)?;
            out.coeffs += part.coeffs;
        }
    }
    Ok(out)
}

/// Identity of `X(a, a)`: `pi` of `id_a` at the empty word.
pub fn tube_identity(spec: &CategorySpec, a: usize) -> TubeVector {
    let id = Morphism::identity_word(spec, &[a]);
    pi(spec, a, a, &[], &id).expect("identity has the right shape")
}

/// Image of `f: a -> b` under the inclusion of the category into its tubes.
#[allow(non_snake_case)]
pub fn functor_L(spec: &CategorySpec, f: &Morphism, a: usize, b: usize) -> Result<TubeVector> {
    if f.source != Object::simple(a) || f.target != Object::simple(b) {
        return Err(Error::Shape("functor_L needs a map between the given simples".into()));
    }
    pi(spec, a, b, &[], f)
}

/// Scalar multiple of a tube vector.
pub fn scale(t: &TubeVector, z: C64) -> TubeVector {
    TubeVector { a: t.a, b: t.b, coeffs: &t.coeffs * z }
}
