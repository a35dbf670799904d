//! Symmetric matrix product operators: local tensors `a x -> x' b`,
//! horizontal contraction, operator-to-MPO conversion and the
//! renormalization (dinaturality) harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fusion::CategorySpec;
use crate::homspace::{
    self, compose, dual_word, id_tensor, image_decomposition, tensor_id, Morphism, Object, Word,
};
use crate::tube::{self, TubeVector};

/// A local tensor with virtual bonds `left`, `right` and physical legs
/// `site_in`, `site_out`; `body: left site_in -> site_out right`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTensor {
    pub left: Object,
    pub site_in: Word,
    pub site_out: Word,
    pub right: Object,
    pub body: Morphism,
}

impl LocalTensor {
    pub fn new(left: Object, site_in: Word, site_out: Word, right: Object, body: Morphism) -> Result<Self> {
        let src = left.tensor(&Object::word(&site_in));
        let tgt = Object::word(&site_out).tensor(&right);
        if body.source != src || body.target != tgt {
            return Err(Error::Shape(format!(
                "body {:?} -> {:?} does not match bonds {:?} -> {:?}",
                body.source.terms, body.target.terms, src.terms, tgt.terms
            )));
        }
        Ok(LocalTensor { left, site_in, site_out, right, body })
    }

    /// The tensor with no physical leg that passes the bond through.
    pub fn identity(spec: &CategorySpec, bond: Object) -> Self {
        let body = Morphism::identity(spec, bond.clone());
        LocalTensor { left: bond.clone(), site_in: vec![], site_out: vec![], right: bond, body }
    }

    /// Complex Gaussian body.
    pub fn random<R: Rng + ?Sized>(
        spec: &CategorySpec,
        left: Object,
        site_in: Word,
        site_out: Word,
        right: Object,
        rng: &mut R,
    ) -> Self {
        let src = left.tensor(&Object::word(&site_in));
        let tgt = Object::word(&site_out).tensor(&right);
        let body = Morphism::random(spec, src, tgt, rng);
        LocalTensor { left, site_in, site_out, right, body }
    }
}

/// Horizontal contraction along the shared bond:
/// `(id_{x'} g)(f id_y): a x y -> x' y' c`.
pub fn ctr(spec: &CategorySpec, f: &LocalTensor, g: &LocalTensor) -> Result<LocalTensor> {
    if f.right != g.left {
        return Err(Error::Bond(format!(
            "right bond {:?} does not match left bond {:?}",
            f.right.terms, g.left.terms
        )));
    }
    let first = tensor_id(spec, &f.body, &Object::word(&g.site_in))?;
    let second = id_tensor(spec, &Object::word(&f.site_out), &g.body)?;
    let body = compose(&second, &first)?;
    Ok(LocalTensor {
        left: f.left.clone(),
        site_in: [f.site_in.as_slice(), &g.site_in].concat(),
        site_out: [f.site_out.as_slice(), &g.site_out].concat(),
        right: g.right.clone(),
        body,
    })
}

/// A chain of local tensors with matching bonds.
#[derive(Debug, Clone)]
pub struct Mpo {
    pub tensors: Vec<LocalTensor>,
    pub open_left: Object,
    pub open_right: Object,
}

impl Mpo {
    pub fn new(tensors: Vec<LocalTensor>) -> Result<Self> {
        let (Some(first), Some(last)) = (tensors.first(), tensors.last()) else {
            return Err(Error::Shape("an MPO needs at least one tensor; use Mpo::empty".into()));
        };
        for (k, w) in tensors.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(Error::Bond(format!("bond {k} does not chain")));
            }
        }
        let (open_left, open_right) = (first.left.clone(), last.right.clone());
        Ok(Mpo { tensors, open_left, open_right })
    }

    /// An MPO without tensors between the given open bonds.
    pub fn empty(open_left: Object, open_right: Object) -> Self {
        Mpo { tensors: vec![], open_left, open_right }
    }

    /// Summed dimension of every internal bond, per charge.
    pub fn bond_dims(&self, spec: &CategorySpec) -> Vec<Vec<usize>> {
        self.tensors.iter().take(self.tensors.len().saturating_sub(1)).map(|t| t.right.dims(spec)).collect()
    }
}

/// Left fold of `ctr` over the tensors.
pub fn evaluate(spec: &CategorySpec, m: &Mpo) -> Result<Morphism> {
    let Some((first, rest)) = m.tensors.split_first() else {
        if m.open_left == m.open_right {
            return Ok(Morphism::identity(spec, m.open_left.clone()));
        }
        return Err(Error::Bond("empty MPO with different open bonds".into()));
    };
    let mut acc = first.clone();
    for t in rest {
        acc = ctr(spec, &acc, t)?;
    }
    Ok(acc.body)
}

/// Right fold of `ctr`; agrees with `evaluate` by associativity.
pub fn evaluate_right(spec: &CategorySpec, m: &Mpo) -> Result<Morphism> {
    let Some((last, rest)) = m.tensors.split_last() else {
        return evaluate(spec, m);
    };
    let mut acc = last.clone();
    for t in rest.iter().rev() {
        acc = ctr(spec, t, &acc)?;
    }
    Ok(acc.body)
}

/// Splits `h: a P Q -> P Q b` into `f: a P -> P (Q b Q*)` and
/// `g: (Q b Q*) Q -> Q b` with `ctr(f, g) = h`, bending `Q` with left duals.
fn split_last(
    spec: &CategorySpec,
    h: &Morphism,
    a: &Word,
    p: &Word,
    q: &Word,
    b: &Word,
) -> Result<(LocalTensor, LocalTensor)> {
    let qd = dual_word(spec, q);
    let bond: Word = [q.as_slice(), b, &qd].concat();
    let ap = Object::word(&[a.as_slice(), p].concat());
    let cup = id_tensor(spec, &ap, &homspace::coev_left_word(spec, q)?)?;
    let f_body = compose(&tensor_id(spec, h, &Object::word(&qd))?, &cup)?;
    let qb = Object::word(&[q.as_slice(), b].concat());
    let g_body = id_tensor(spec, &qb, &homspace::ev_left_word(spec, q)?)?;
    let f = LocalTensor::new(Object::word(a), p.clone(), p.clone(), Object::word(&bond), f_body)?;
    let g = LocalTensor::new(Object::word(&bond), q.clone(), q.clone(), Object::word(b), g_body)?;
    Ok((f, g))
}

/// Rewrites an operator on a lattice word as an MPO with one tensor per
/// segment; `cuts` are the strictly increasing interior split positions.
pub fn operator_to_mpo(spec: &CategorySpec, o: &Morphism, cuts: &[usize]) -> Result<Mpo> {
    let x = o
        .source
        .as_word()
        .filter(|_| o.is_endo())
        .ok_or_else(|| Error::Shape("operator must be an endomorphism of a word".into()))?
        .clone();
    if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts.iter().any(|&c| c == 0 || c >= x.len()) {
        return Err(Error::Shape(format!("invalid cut points {cuts:?} for a lattice of {} sites", x.len())));
    }
    let mut bounds = vec![0];
    bounds.extend_from_slice(cuts);
    bounds.push(x.len());

    let mut tensors = Vec::new();
    let mut h = o.clone();
    let a: Word = vec![];
    let mut b: Word = vec![];
    for k in (1..bounds.len() - 1).rev() {
        let p = x[..bounds[k]].to_vec();
        let q = x[bounds[k]..bounds[k + 1]].to_vec();
        let (f, g) = split_last(spec, &h, &a, &p, &q, &b)?;
        b = f.right.as_word().expect("word bond").clone();
        h = f.body;
        tensors.push(g);
    }
    let p = x[..bounds[1]].to_vec();
    tensors.push(LocalTensor::new(Object::word(&a), p.clone(), p, Object::word(&b), h)?);
    tensors.reverse();
    Mpo::new(tensors)
}

/// Mate `x* x -> y y*` of a two-site operator `O: x y -> x y`.
pub fn mate(spec: &CategorySpec, o: &Morphism, x: &Word, y: &Word) -> Result<Morphism> {
    let xd = dual_word(spec, x);
    let yd = dual_word(spec, y);
    let xdx = Object::word(&[xd.as_slice(), x].concat());
    let cup = id_tensor(spec, &xdx, &homspace::coev_left_word(spec, y)?)?;
    let mid = tensor_id(spec, &id_tensor(spec, &Object::word(&xd), o)?, &Object::word(&yd))?;
    let cap = tensor_id(spec, &homspace::ev_left_word(spec, x)?, &Object::word(&[y.as_slice(), &yd].concat()))?;
    compose(&cap, &compose(&mid, &cup)?)
}

/// Two-tensor MPO for `O: x y -> x y` whose bond is the image of the mate.
#[derive(Debug, Clone)]
pub struct CanonicalBond {
    pub mpo: Mpo,
    /// Multiplicity of each simple in the bond.
    pub bond: Vec<usize>,
    /// Blockwise numerical rank of the mate.
    pub mate_ranks: Vec<usize>,
}

pub fn canonical_bond(spec: &CategorySpec, o: &Morphism, split: usize) -> Result<CanonicalBond> {
    let w = o
        .source
        .as_word()
        .filter(|_| o.is_endo())
        .ok_or_else(|| Error::Shape("operator must be an endomorphism of a word".into()))?;
    if split > w.len() {
        return Err(Error::Shape("split point beyond the lattice".into()));
    }
    let (x, y) = (w[..split].to_vec(), w[split..].to_vec());
    let mt = mate(spec, o, &x, &y)?;
    let cut = homspace::rank_cutoff(spec, &mt);
    let mate_ranks = mt.blocks.iter().map(|b| crate::linalg::rank_abs(b, cut)).collect();
    let dec = image_decomposition(spec, &mt);
    let bond_obj = dec.e.target.clone();

    let xo = Object::word(&x);
    let yo = Object::word(&y);
    let e_body = compose(
        &id_tensor(spec, &xo, &dec.e)?,
        &tensor_id(spec, &homspace::coev_left_word(spec, &x)?, &xo)?,
    )?;
    let m_body = compose(
        &id_tensor(spec, &yo, &homspace::ev_left_word(spec, &y)?)?,
        &tensor_id(spec, &dec.m, &yo)?,
    )?;
    let e = LocalTensor::new(Object::unit(), x.clone(), x, bond_obj.clone(), e_body)?;
    let m = LocalTensor::new(bond_obj, y.clone(), y, Object::unit(), m_body)?;
    Ok(CanonicalBond { mpo: Mpo::new(vec![e, m])?, bond: dec.bond, mate_ranks })
}

/// Outcome of the renormalization harness.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessReport {
    pub trials: usize,
    pub max_residual: f64,
}

fn random_word<R: Rng + ?Sized>(n: usize, max_len: usize, rng: &mut R) -> Word {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_range(0..n)).collect()
}

/// One dinaturality trial: `pi_x(h (id_a f)) = pi_y((f id_b) h)` for random
/// `f: x -> y` and `h: a y -> x b`.
fn dinaturality_trial(spec: &CategorySpec, a: usize, b: usize, seed: u64, max_len: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.rank();
    let x = random_word(n, max_len, &mut rng);
    let y = random_word(n, max_len, &mut rng);
    let f = Morphism::random(spec, Object::word(&x), Object::word(&y), &mut rng);
    let h = Morphism::random(
        spec,
        Object::word(&[&[a], y.as_slice()].concat()),
        Object::word(&[x.as_slice(), &[b]].concat()),
        &mut rng,
    );
    let lhs = tube::pi(spec, a, b, &x, &compose(&h, &id_tensor(spec, &Object::simple(a), &f)?)?)?;
    let rhs = tube::pi(spec, a, b, &y, &compose(&tensor_id(spec, &f, &Object::simple(b))?, &h)?)?;
    Ok(lhs.distance(&rhs))
}

/// Per-trial seeds derived from the master seed.
fn trial_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(k as u64 + 1)
}

/// Samples renormalization maps `f: x -> y` between random words of length
/// at most 2 and checks that both ways into `X(a, b)` agree.
pub fn renorm_harness(spec: &CategorySpec, a: usize, b: usize, trials: usize, seed: u64) -> Result<HarnessReport> {
    let res: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|k| dinaturality_trial(spec, a, b, trial_seed(seed, k), 2))
        .collect::<Result<_>>()?;
    Ok(HarnessReport { trials, max_residual: res.into_iter().fold(0.0, f64::max) })
}

/// `renorm_harness` cycling through all pairs of simple bonds.
pub fn renorm_harness_all(spec: &CategorySpec, trials: usize, seed: u64) -> Result<HarnessReport> {
    let n = spec.rank();
    let res: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|k| dinaturality_trial(spec, k % n, (k / n) % n, trial_seed(seed, k), 2))
        .collect::<Result<_>>()?;
    Ok(HarnessReport { trials, max_residual: res.into_iter().fold(0.0, f64::max) })
}

/// Lifts each sector of `t` in `X(a, a)` to a local tensor, contracts every
/// pair and renormalizes; returns the distance of the result from `t`.
pub fn steady_current_residual(spec: &CategorySpec, t: &TubeVector) -> Result<f64> {
    if t.a != t.b {
        return Err(Error::Bond("steady currents live in X(a, a)".into()));
    }
    let a = t.a;
    let bond = Object::simple(a);
    let lifts: Vec<LocalTensor> = t
        .support(spec)
        .into_iter()
        .map(|x| LocalTensor::new(bond.clone(), vec![x], vec![x], bond.clone(), t.sector(spec, x)))
        .collect::<Result<_>>()?;
    let mut out = TubeVector::zeros(spec, a, a);
    for f in &lifts {
        for g in &lifts {
            let c = ctr(spec, f, g)?;
            out.coeffs += tube::pi(spec, a, a, &c.site_in, &c.body)?.coeffs;
        }
    }
    Ok(out.distance(t))
}
