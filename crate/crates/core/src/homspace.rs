//! Morphisms between tensor products of simples in left-associated
//! fusion-tree bases.
//!
//! A word `[w1, ..., wk]` denotes `((w1 w2) w3) ... wk`; the empty word is
//! the unit. A splitting tree of a word into a charge `c` records the running
//! charges `c1 = w1, c2, ..., ck = c` and the vertices `c(i+1) -> c(i) w(i+1)`.
//! A morphism `f: X -> Y` is stored as the matrices `M_c` with
//! `f . u_T = sum_T' M_c[T', T] u_T'` for every tree `T` of `X` into `c`.
//!
//! Objects are finite direct sums of words; the basis of an object at
//! charge `c` is the concatenation of the bases of its summands.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::CategorySpec;
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};

pub type Word = Vec<usize>;

/// Left-associated splitting tree of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FusionTree {
    pub charges: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl FusionTree {
    pub fn total(&self) -> usize {
        self.charges.last().copied().unwrap_or(0)
    }
}

/// All splitting trees of `word`, grouped by total charge.
pub fn trees_by_charge(spec: &CategorySpec, word: &[usize]) -> Vec<Vec<FusionTree>> {
    let n = spec.rank();
    let mut out = vec![Vec::new(); n];
    let Some((&first, rest)) = word.split_first() else {
        out[0].push(FusionTree { charges: vec![], vertices: vec![] });
        return out;
    };
    let mut layer = vec![FusionTree { charges: vec![first], vertices: vec![] }];
    for &w in rest {
        let mut next = Vec::new();
        for t in &layer {
            let p = t.total();
            for (c, m) in spec.fuse(p, w) {
                for alpha in 0..m {
                    let mut t2 = t.clone();
                    t2.charges.push(c);
                    t2.vertices.push(alpha);
                    next.push(t2);
                }
            }
        }
        layer = next;
    }
    for t in layer {
        out[t.total()].push(t);
    }
    out
}

/// Splitting trees of `word` into `c`.
pub fn trees(spec: &CategorySpec, word: &[usize], c: usize) -> Vec<FusionTree> {
    trees_by_charge(spec, word).swap_remove(c)
}

/// Number of splitting trees of `word` into each charge.
pub fn tree_counts(spec: &CategorySpec, word: &[usize]) -> Vec<usize> {
    let n = spec.rank();
    let mut counts = vec![0usize; n];
    counts[0] = 1;
    for &w in word {
        let mut next = vec![0usize; n];
        for p in 0..n {
            if counts[p] == 0 {
                continue;
            }
            for (c, m) in spec.fuse(p, w) {
                next[c] += counts[p] * m;
            }
        }
        counts = next;
    }
    counts
}

fn tree_index(ts: &[FusionTree]) -> HashMap<&FusionTree, usize> {
    ts.iter().enumerate().map(|(i, t)| (t, i)).collect()
}

/// A finite direct sum of words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Object {
    pub terms: Vec<Word>,
}

impl Object {
    pub fn word(w: &[usize]) -> Self {
        Object { terms: vec![w.to_vec()] }
    }

    pub fn simple(a: usize) -> Self {
        Object::word(&[a])
    }

    pub fn unit() -> Self {
        Object::word(&[])
    }

    /// The zero object.
    pub fn zero() -> Self {
        Object { terms: vec![] }
    }

    /// `a^{n_a}` summed over simples, as single-letter terms.
    pub fn from_multiplicities(n: &[usize]) -> Self {
        let mut terms = Vec::new();
        for (a, &k) in n.iter().enumerate() {
            for _ in 0..k {
                terms.push(vec![a]);
            }
        }
        Object { terms }
    }

    /// The word of a one-term object.
    pub fn as_word(&self) -> Option<&Word> {
        match self.terms.as_slice() {
            [w] => Some(w),
            _ => None,
        }
    }

    /// Tensor product; summands ordered with the left factor's index major.
    pub fn tensor(&self, other: &Object) -> Object {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push([a.as_slice(), b.as_slice()].concat());
            }
        }
        Object { terms }
    }

    /// Per-charge tree counts of every summand.
    pub fn term_counts(&self, spec: &CategorySpec) -> Vec<Vec<usize>> {
        self.terms.iter().map(|w| tree_counts(spec, w)).collect()
    }

    /// Basis dimension at each charge.
    pub fn dims(&self, spec: &CategorySpec) -> Vec<usize> {
        let mut d = vec![0; spec.rank()];
        for counts in self.term_counts(spec) {
            for (c, k) in counts.into_iter().enumerate() {
                d[c] += k;
            }
        }
        d
    }
}

/// Dual word: reversed letters, each replaced by its dual.
pub fn dual_word(spec: &CategorySpec, w: &[usize]) -> Word {
    w.iter().rev().map(|&x| spec.dual[x]).collect()
}

/// `dim Hom(source, target)`.
pub fn hom_dim(spec: &CategorySpec, source: &[usize], target: &[usize]) -> usize {
    let s = tree_counts(spec, source);
    let t = tree_counts(spec, target);
    s.iter().zip(&t).map(|(a, b)| a * b).sum()
}

/// A linear map between objects, block diagonal over total charge.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    pub source: Object,
    pub target: Object,
    /// `blocks[c]` has shape `(dims(target)[c], dims(source)[c])`.
    pub blocks: Vec<CMatrix>,
}

impl Morphism {
    pub fn zeros(spec: &CategorySpec, source: Object, target: Object) -> Self {
        let ds = source.dims(spec);
        let dt = target.dims(spec);
        let blocks = (0..spec.rank()).map(|c| CMatrix::zeros(dt[c], ds[c])).collect();
        Morphism { source, target, blocks }
    }

    pub fn identity(spec: &CategorySpec, obj: Object) -> Self {
        let d = obj.dims(spec);
        let blocks = d.iter().map(|&k| CMatrix::identity(k, k)).collect();
        Morphism { source: obj.clone(), target: obj, blocks }
    }

    pub fn identity_word(spec: &CategorySpec, w: &[usize]) -> Self {
        Morphism::identity(spec, Object::word(w))
    }

    /// Complex Gaussian entries in every block.
    pub fn random<R: Rng + ?Sized>(spec: &CategorySpec, source: Object, target: Object, rng: &mut R) -> Self {
        let ds = source.dims(spec);
        let dt = target.dims(spec);
        let blocks = (0..spec.rank()).map(|c| linalg::random_matrix(dt[c], ds[c], rng)).collect();
        Morphism { source, target, blocks }
    }

    /// Morphism with the given blocks, checking their shapes.
    pub fn from_blocks(spec: &CategorySpec, source: Object, target: Object, blocks: Vec<CMatrix>) -> Result<Self> {
        let ds = source.dims(spec);
        let dt = target.dims(spec);
        if blocks.len() != spec.rank() {
            return Err(Error::Shape(format!("expected {} blocks, got {}", spec.rank(), blocks.len())));
        }
        for (c, b) in blocks.iter().enumerate() {
            if b.shape() != (dt[c], ds[c]) {
                return Err(Error::Shape(format!(
                    "block {c} has shape {:?}, expected {:?}",
                    b.shape(),
                    (dt[c], ds[c])
                )));
            }
        }
        Ok(Morphism { source, target, blocks })
    }

    /// Scalar multiple of the identity of the unit, as a map between words
    /// that both fuse only to the unit with a single tree.
    fn scalar(spec: &CategorySpec, source: Word, target: Word, z: C64) -> Self {
        let mut m = Morphism::zeros(spec, Object { terms: vec![source] }, Object { terms: vec![target] });
        m.blocks[0][(0, 0)] = z;
        m
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            *b *= z;
        }
        out
    }

    pub fn add(&self, other: &Morphism) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (b, o) in out.blocks.iter_mut().zip(&other.blocks) {
            *b += o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Morphism) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn add_assign(&mut self, other: &Morphism) -> Result<()> {
        self.check_same_shape(other)?;
        for (b, o) in self.blocks.iter_mut().zip(&other.blocks) {
            *b += o;
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Morphism) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape(format!(
                "cannot combine {:?}->{:?} with {:?}->{:?}",
                self.source.terms, self.target.terms, other.source.terms, other.target.terms
            )));
        }
        Ok(())
    }

    /// Largest absolute block entry.
    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// `max |self - other|`, infinite when shapes differ.
    pub fn distance(&self, other: &Morphism) -> f64 {
        self.sub(other).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    /// Dimension of the hom space this morphism lives in.
    pub fn hom_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows() * b.ncols()).sum()
    }

    /// Flattened coordinates, blocks in charge order, row-major.
    pub fn to_vec(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.hom_dim());
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    v.push(b[(i, j)]);
                }
            }
        }
        v
    }

    /// Inverse of `to_vec`.
    pub fn from_vec(spec: &CategorySpec, source: Object, target: Object, v: &[C64]) -> Result<Self> {
        let mut m = Morphism::zeros(spec, source, target);
        if v.len() != m.hom_dim() {
            return Err(Error::Shape(format!("expected {} coordinates, got {}", m.hom_dim(), v.len())));
        }
        let mut k = 0;
        for b in &mut m.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    b[(i, j)] = v[k];
                    k += 1;
                }
            }
        }
        Ok(m)
    }

    /// Restriction to one summand of the source and one of the target.
    pub fn component(&self, spec: &CategorySpec, target_term: usize, source_term: usize) -> Morphism {
        let so = term_offsets(spec, &self.source);
        let to = term_offsets(spec, &self.target);
        let src = Object { terms: vec![self.source.terms[source_term].clone()] };
        let tgt = Object { terms: vec![self.target.terms[target_term].clone()] };
        let blocks = (0..spec.rank())
            .map(|c| {
                let (r0, r1) = (to[c][target_term], to[c][target_term + 1]);
                let (c0, c1) = (so[c][source_term], so[c][source_term + 1]);
                self.blocks[c].view((r0, c0), (r1 - r0, c1 - c0)).into_owned()
            })
            .collect();
        Morphism { source: src, target: tgt, blocks }
    }

    /// Adds `m` (between single summands) into the given component.
    pub fn add_component(&mut self, spec: &CategorySpec, target_term: usize, source_term: usize, m: &Morphism) {
        let so = term_offsets(spec, &self.source);
        let to = term_offsets(spec, &self.target);
        for c in 0..spec.rank() {
            let (r0, r1) = (to[c][target_term], to[c][target_term + 1]);
            let (c0, c1) = (so[c][source_term], so[c][source_term + 1]);
            let mut view = self.blocks[c].view_mut((r0, c0), (r1 - r0, c1 - c0));
            view += &m.blocks[c];
        }
    }
}

/// `offsets[c][t]`: start of summand `t` in the charge-`c` basis; the last
/// entry is the total dimension.
pub fn term_offsets(spec: &CategorySpec, obj: &Object) -> Vec<Vec<usize>> {
    let counts = obj.term_counts(spec);
    (0..spec.rank())
        .map(|c| {
            let mut off = Vec::with_capacity(counts.len() + 1);
            let mut acc = 0;
            off.push(0);
            for tc in &counts {
                acc += tc[c];
                off.push(acc);
            }
            off
        })
        .collect()
}

/// `g . f`.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if f.target != g.source {
        return Err(Error::Shape(format!(
            "cannot compose: target {:?} differs from source {:?}",
            f.target.terms, g.source.terms
        )));
    }
    let blocks = g.blocks.iter().zip(&f.blocks).map(|(a, b)| a * b).collect();
    Ok(Morphism { source: f.source.clone(), target: g.target.clone(), blocks })
}

/// Composes a chain `fs[last] . ... . fs[0]`.
pub fn compose_all(fs: &[&Morphism]) -> Result<Morphism> {
    let (first, rest) = fs.split_first().ok_or_else(|| Error::Shape("empty composition".into()))?;
    let mut acc = (*first).clone();
    for g in rest {
        acc = compose(g, &acc)?;
    }
    Ok(acc)
}

/// Product basis of `W ++ V` into `c`: `(p, q, alpha, i, j)` with `i` a tree
/// of `W` into `p`, `j` a tree of `V` into `q`, and `alpha: c -> p q`.
struct ProductBasis {
    sectors: Vec<(usize, usize, usize, usize)>,
}

impl ProductBasis {
    /// Sectors `(p, q, alpha, start)`; a sector spans `nw[p] * nv[q]` columns.
    fn new(spec: &CategorySpec, nw: &[usize], nv: &[usize], c: usize) -> (Self, usize) {
        let n = spec.rank();
        let mut sectors = Vec::new();
        let mut start = 0;
        for p in 0..n {
            for q in 0..n {
                for alpha in 0..spec.n(p, q, c) {
                    let k = nw[p] * nv[q];
                    if k > 0 {
                        sectors.push((p, q, alpha, start));
                        start += k;
                    }
                }
            }
        }
        (ProductBasis { sectors }, start)
    }
}

/// Expands the product tree `(L (x) R) . alpha` into left-associated trees of
/// `W ++ V` with total charge `c`.
fn expand_product(
    spec: &CategorySpec,
    left: &FusionTree,
    w_empty: bool,
    right: &FusionTree,
    v: &[usize],
    alpha: usize,
    c: usize,
    coeff: C64,
    out: &mut Vec<(FusionTree, C64)>,
) {
    if coeff == ZERO {
        return;
    }
    if w_empty {
        out.push((right.clone(), coeff));
        return;
    }
    match v.len() {
        0 => out.push((left.clone(), coeff)),
        1 => {
            let mut t = left.clone();
            t.charges.push(c);
            t.vertices.push(alpha);
            out.push((t, coeff));
        }
        m => {
            let p = left.total();
            let q = right.total();
            let vm = v[m - 1];
            let beta = right.vertices[m - 2];
            let qp = right.charges[m - 2];
            let mut rest = right.clone();
            rest.charges.pop();
            rest.vertices.pop();
            let Some(blk) = spec.f_block(p, qp, vm, c) else { return };
            let Some(row) = blk.right.iter().position(|&r| r == (q, beta, alpha)) else { return };
            for (col, &(f, rho, sigma)) in blk.left.iter().enumerate() {
                let z = blk.matrix[(row, col)];
                if z == ZERO {
                    continue;
                }
                let start = out.len();
                expand_product(spec, left, false, &rest, &v[..m - 1], rho, f, coeff * z, out);
                for (t, _) in &mut out[start..] {
                    t.charges.push(c);
                    t.vertices.push(sigma);
                }
            }
        }
    }
}

/// Change of basis from the product basis of `(W, V)` at charge `c` to the
/// left-associated tree basis of `W ++ V`.
fn recoupling_matrix(spec: &CategorySpec, w: &[usize], v: &[usize], c: usize) -> CMatrix {
    let tw = trees_by_charge(spec, w);
    let tv = trees_by_charge(spec, v);
    let nw: Vec<usize> = tw.iter().map(Vec::len).collect();
    let nv: Vec<usize> = tv.iter().map(Vec::len).collect();
    let (basis, dim) = ProductBasis::new(spec, &nw, &nv, c);
    let wv = [w, v].concat();
    let target = trees(spec, &wv, c);
    let index = tree_index(&target);
    let mut t = CMatrix::zeros(target.len(), dim);
    let mut buf = Vec::new();
    for &(p, q, alpha, start) in &basis.sectors {
        for (i, li) in tw[p].iter().enumerate() {
            for (j, rj) in tv[q].iter().enumerate() {
                let col = start + i * nv[q] + j;
                buf.clear();
                expand_product(spec, li, w.is_empty(), rj, v, alpha, c, ONE, &mut buf);
                for (tree, z) in buf.drain(..) {
                    t[(index[&tree], col)] += z;
                }
            }
        }
    }
    t
}

/// Blocks of `f (x) g` for word-level maps `f: A -> A'` and `g: B -> B'`.
fn tensor_words(
    spec: &CategorySpec,
    f: &Morphism,
    g: &Morphism,
    (a, ap): (&Word, &Word),
    (b, bp): (&Word, &Word),
) -> Result<Vec<CMatrix>> {
    let n = spec.rank();
    let na = tree_counts(spec, a);
    let nap = tree_counts(spec, ap);
    let nb = tree_counts(spec, b);
    let nbp = tree_counts(spec, bp);
    let mut blocks = Vec::with_capacity(n);
    for c in 0..n {
        let (src_basis, src_dim) = ProductBasis::new(spec, &na, &nb, c);
        let (tgt_basis, tgt_dim) = ProductBasis::new(spec, &nap, &nbp, c);
        if src_dim == 0 || tgt_dim == 0 {
            blocks.push(CMatrix::zeros(tgt_dim, src_dim));
            continue;
        }
        let mut k = CMatrix::zeros(tgt_dim, src_dim);
        for &(p, q, alpha, s0) in &src_basis.sectors {
            let Some(&(_, _, _, t0)) =
                tgt_basis.sectors.iter().find(|&&(p2, q2, a2, _)| (p2, q2, a2) == (p, q, alpha))
            else {
                continue;
            };
            let kr = linalg::kron(&f.blocks[p], &g.blocks[q]);
            k.view_mut((t0, s0), kr.shape()).copy_from(&kr);
        }
        let t_src = recoupling_matrix(spec, a, b, c);
        let t_tgt = recoupling_matrix(spec, ap, bp, c);
        let inv = t_src
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular recoupling matrix".into()))?;
        blocks.push(t_tgt * k * inv);
    }
    Ok(blocks)
}

/// `f (x) g`.
pub fn tensor(spec: &CategorySpec, f: &Morphism, g: &Morphism) -> Result<Morphism> {
    let source = f.source.tensor(&g.source);
    let target = f.target.tensor(&g.target);
    let mut out = Morphism::zeros(spec, source, target);
    let nfs = f.source.terms.len();
    let ngs = g.source.terms.len();
    let ngt = g.target.terms.len();
    for (it, ap) in f.target.terms.iter().enumerate() {
        for (is, a) in f.source.terms.iter().enumerate() {
            let fc = if nfs == 1 && f.target.terms.len() == 1 { f.clone() } else { f.component(spec, it, is) };
            if fc.max_abs() == 0.0 {
                continue;
            }
            for (jt, bp) in g.target.terms.iter().enumerate() {
                for (js, b) in g.source.terms.iter().enumerate() {
                    let gc = if ngs == 1 && ngt == 1 { g.clone() } else { g.component(spec, jt, js) };
                    if gc.max_abs() == 0.0 {
                        continue;
                    }
                    let blocks = tensor_words(spec, &fc, &gc, (a, ap), (b, bp))?;
                    let piece = Morphism {
                        source: Object::word(&[a.as_slice(), b.as_slice()].concat()),
                        target: Object::word(&[ap.as_slice(), bp.as_slice()].concat()),
                        blocks,
                    };
                    out.add_component(spec, it * ngt + jt, is * ngs + js, &piece);
                }
            }
        }
    }
    Ok(out)
}

/// `id_obj (x) f`.
pub fn id_tensor(spec: &CategorySpec, obj: &Object, f: &Morphism) -> Result<Morphism> {
    tensor(spec, &Morphism::identity(spec, obj.clone()), f)
}

/// `f (x) id_obj`.
pub fn tensor_id(spec: &CategorySpec, f: &Morphism, obj: &Object) -> Result<Morphism> {
    tensor(spec, f, &Morphism::identity(spec, obj.clone()))
}

/// Evaluation `x x* -> 1`, normalized to 1.
pub fn ev(spec: &CategorySpec, x: usize) -> Morphism {
    Morphism::scalar(spec, vec![x, spec.dual[x]], vec![], ONE)
}

/// Coevaluation `1 -> x* x`, the zigzag partner of `ev(x)`.
pub fn coev(spec: &CategorySpec, x: usize) -> Morphism {
    Morphism::scalar(spec, vec![], vec![spec.dual[x], x], spec.coev_scale(x))
}

/// Evaluation `x* x -> 1` built from the pivotal structure.
pub fn ev_left(spec: &CategorySpec, x: usize) -> Morphism {
    Morphism::scalar(spec, vec![spec.dual[x], x], vec![], spec.pivotal[x])
}

/// Coevaluation `1 -> x x*`, the zigzag partner of `ev_left(x)`.
pub fn coev_left(spec: &CategorySpec, x: usize) -> Morphism {
    let xd = spec.dual[x];
    Morphism::scalar(spec, vec![], vec![x, xd], spec.coev_scale(xd) / spec.pivotal[x])
}

/// `ev` for a word: `W W* -> 1`, nested from the inside out.
pub fn ev_word(spec: &CategorySpec, w: &[usize]) -> Result<Morphism> {
    let Some((&x, rest)) = w.split_first() else {
        return Ok(Morphism::identity_word(spec, &[]));
    };
    let inner = ev_word(spec, rest)?;
    let xo = Object::simple(x);
    let xd = Object::simple(spec.dual[x]);
    let mid = tensor_id(spec, &id_tensor(spec, &xo, &inner)?, &xd)?;
    compose(&ev(spec, x), &mid)
}

/// `coev` for a word: `1 -> W* W`.
pub fn coev_word(spec: &CategorySpec, w: &[usize]) -> Result<Morphism> {
    let Some((&x, rest)) = w.split_first() else {
        return Ok(Morphism::identity_word(spec, &[]));
    };
    let inner = coev_word(spec, rest)?;
    let rd = Object::word(&dual_word(spec, rest));
    let r = Object::word(rest);
    let mid = tensor_id(spec, &id_tensor(spec, &rd, &coev(spec, x))?, &r)?;
    compose(&mid, &inner)
}

/// `ev_left` for a word: `W* W -> 1`.
pub fn ev_left_word(spec: &CategorySpec, w: &[usize]) -> Result<Morphism> {
    let Some((&x, rest)) = w.split_first() else {
        return Ok(Morphism::identity_word(spec, &[]));
    };
    let inner = ev_left_word(spec, rest)?;
    let rd = Object::word(&dual_word(spec, rest));
    let r = Object::word(rest);
    let mid = tensor_id(spec, &id_tensor(spec, &rd, &ev_left(spec, x))?, &r)?;
    compose(&inner, &mid)
}

/// `coev_left` for a word: `1 -> W W*`.
pub fn coev_left_word(spec: &CategorySpec, w: &[usize]) -> Result<Morphism> {
    let Some((&x, rest)) = w.split_first() else {
        return Ok(Morphism::identity_word(spec, &[]));
    };
    let inner = coev_left_word(spec, rest)?;
    let xo = Object::simple(x);
    let xd = Object::simple(spec.dual[x]);
    let mid = tensor_id(spec, &id_tensor(spec, &xo, &inner)?, &xd)?;
    compose(&mid, &coev_left(spec, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Move the outermost target leg on `side` into the source.
    Up,
    /// Move the outermost source leg on `side` into the target.
    Down,
}

/// Mate of `f` obtained by bending one outer leg around a cap or cup.
/// `Up` followed by `Down` (or the reverse) on the same side returns `f`.
pub fn bend(spec: &CategorySpec, f: &Morphism, side: Side, direction: Direction) -> Result<Morphism> {
    let src = f.source.as_word().ok_or_else(|| Error::Bend("source is not a single word".into()))?;
    let tgt = f.target.as_word().ok_or_else(|| Error::Bend("target is not a single word".into()))?;
    let leg_word = match direction {
        Direction::Up => tgt,
        Direction::Down => src,
    };
    if leg_word.is_empty() {
        return Err(Error::Bend(format!("no leg to bend on the {side:?} side")));
    }
    match (side, direction) {
        (Side::Right, Direction::Down) => {
            let (&y, a) = src.split_last().unwrap();
            let yd = spec.dual[y];
            let cup = id_tensor(spec, &Object::word(a), &coev(spec, yd))?;
            compose(&tensor_id(spec, f, &Object::simple(yd))?, &cup)
        }
        (Side::Right, Direction::Up) => {
            let (&x, b) = tgt.split_last().unwrap();
            let cap = id_tensor(spec, &Object::word(b), &ev(spec, x))?;
            compose(&cap, &tensor_id(spec, f, &Object::simple(spec.dual[x]))?)
        }
        (Side::Left, Direction::Down) => {
            let (&y, a) = src.split_first().unwrap();
            let cup = tensor_id(spec, &coev(spec, y), &Object::word(a))?;
            compose(&id_tensor(spec, &Object::simple(spec.dual[y]), f)?, &cup)
        }
        (Side::Left, Direction::Up) => {
            let (&x, b) = tgt.split_first().unwrap();
            let xd = spec.dual[x];
            let cap = tensor_id(spec, &ev(spec, xd), &Object::word(b))?;
            compose(&cap, &id_tensor(spec, &Object::simple(xd), f)?)
        }
    }
}

/// Singular-value cutoff for `f`: the tolerance relative to its largest
/// entry over all charges.
pub fn rank_cutoff(spec: &CategorySpec, f: &Morphism) -> f64 {
    spec.tolerance * f.max_abs().max(f64::MIN_POSITIVE)
}

/// Factorization `f = m . e` through `bond = sum_c c^{r_c}`, with `r_c` the
/// numerical rank of the charge-`c` block.
#[derive(Debug, Clone)]
pub struct ImageDecomposition {
    pub e: Morphism,
    pub bond: Vec<usize>,
    pub m: Morphism,
}

pub fn image_decomposition(spec: &CategorySpec, f: &Morphism) -> ImageDecomposition {
    let factors: Vec<(CMatrix, CMatrix)> =
        {
        let cut = rank_cutoff(spec, f);
        f.blocks.iter().map(|b| linalg::rank_factor_abs(b, cut)).collect()
    };
    let bond: Vec<usize> = factors.iter().map(|(l, _)| l.ncols()).collect();
    let bond_obj = Object::from_multiplicities(&bond);
    let (ls, rs): (Vec<_>, Vec<_>) = factors.into_iter().unzip();
    let e = Morphism { source: f.source.clone(), target: bond_obj.clone(), blocks: rs };
    let m = Morphism { source: bond_obj, target: f.target.clone(), blocks: ls };
    ImageDecomposition { e, bond, m }
}

/// `sum_c d_c tr(M_c)`.
pub fn pivotal_trace(spec: &CategorySpec, f: &Morphism) -> Result<C64> {
    if !f.is_endo() {
        return Err(Error::Shape("trace of a non-endomorphism".into()));
    }
    Ok(f.blocks.iter().enumerate().map(|(c, b)| spec.pivotal_dim(c) * b.trace()).sum())
}

/// Projector of a word onto the trees with total charge `c`.
pub fn channel_projector(spec: &CategorySpec, w: &[usize], c: usize) -> Morphism {
    let mut p = Morphism::identity_word(spec, w);
    for (k, b) in p.blocks.iter_mut().enumerate() {
        if k != c {
            b.fill(ZERO);
        }
    }
    p
}

/// The map `W -> c` (or `c -> W`) of a single splitting tree, as a
/// morphism between the word and the one-letter word `[c]`.
pub fn tree_vector(spec: &CategorySpec, w: &[usize], c: usize, tree: usize) -> Morphism {
    let mut m = Morphism::zeros(spec, Object::simple(c), Object::word(w));
    m.blocks[c][(tree, 0)] = ONE;
    m
}

/// Dual-basis partner of `tree_vector`: `W -> [c]`.
pub fn tree_covector(spec: &CategorySpec, w: &[usize], c: usize, tree: usize) -> Morphism {
    let mut m = Morphism::zeros(spec, Object::word(w), Object::simple(c));
    m.blocks[c][(0, tree)] = ONE;
    m
}

#[derive(Serialize, Deserialize)]
struct BlockJson {
    charge: usize,
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct MorphismJson {
    source: Vec<Word>,
    target: Vec<Word>,
    blocks: Vec<BlockJson>,
}

impl Morphism {
    pub fn to_json(&self) -> String {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.nrows() * b.ncols() > 0)
            .map(|(c, b)| BlockJson {
                charge: c,
                rows: b.nrows(),
                cols: b.ncols(),
                data: (0..b.nrows())
                    .flat_map(|i| (0..b.ncols()).map(move |j| [b[(i, j)].re, b[(i, j)].im]))
                    .collect(),
            })
            .collect();
        serde_json::to_string(&MorphismJson {
            source: self.source.terms.clone(),
            target: self.target.terms.clone(),
            blocks,
        })
        .expect("serializable")
    }

    pub fn from_json(spec: &CategorySpec, text: &str) -> Result<Self> {
        let raw: MorphismJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut m = Morphism::zeros(spec, Object { terms: raw.source }, Object { terms: raw.target });
        for b in raw.blocks {
            let blk = m
                .blocks
                .get_mut(b.charge)
                .ok_or_else(|| Error::Schema(format!("charge {} out of range", b.charge)))?;
            if blk.shape() != (b.rows, b.cols) || b.data.len() != b.rows * b.cols {
                return Err(Error::Shape(format!("block {} has the wrong shape", b.charge)));
            }
            for (k, [re, im]) in b.data.into_iter().enumerate() {
                blk[(k / b.cols, k % b.cols)] = C64::new(re, im);
            }
        }
        Ok(m)
    }
}
