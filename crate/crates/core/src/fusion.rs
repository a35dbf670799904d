//! Skeletal fusion categories presented by fusion rules, F-symbols and
//! pivotal coefficients.
//!
//! F-symbol convention: for simples `a, b, c, d` the block `F[a,b,c,d]` has
//! rows indexed by right-associated splitting trees `(e, mu, nu)` (with
//! `mu: e -> b c` and `nu: d -> a e`) and columns by left-associated trees
//! `(f, rho, sigma)` (with `rho: f -> a b` and `sigma: d -> f c`). A right
//! tree expands as `|e,mu,nu> = sum F[(e,mu,nu),(f,rho,sigma)] |f,rho,sigma>`.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64, ONE, ZERO};

/// Default numerical tolerance of a category.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A right channel `(e, mu, nu)` or a left channel `(f, rho, sigma)`.
pub type Channel = (usize, usize, usize);

/// One F-move block together with its channel labels.
#[derive(Debug, Clone)]
pub struct FBlock {
    pub right: Vec<Channel>,
    pub left: Vec<Channel>,
    pub matrix: CMatrix,
}

impl FBlock {
    fn right_index(&self, ch: Channel) -> Option<usize> {
        self.right.iter().position(|&r| r == ch)
    }

    fn left_index(&self, ch: Channel) -> Option<usize> {
        self.left.iter().position(|&l| l == ch)
    }
}

/// A skeletal fusion category. Index 0 is the tensor unit.
#[derive(Debug, Clone)]
pub struct CategorySpec {
    pub name: String,
    pub simples: Vec<String>,
    pub dual: Vec<usize>,
    fusion: Vec<usize>,
    f_symbols: HashMap<(usize, usize, usize, usize), FBlock>,
    f_inverse: HashMap<(usize, usize, usize, usize), CMatrix>,
    pub pivotal: Vec<C64>,
    /// `1 / F[x, x*, x, x][(1,0,0),(1,0,0)]`, the coevaluation normalization.
    coev_scale: Vec<C64>,
    pub tolerance: f64,
}

#[derive(Deserialize)]
struct RawSpec {
    name: String,
    simples: Vec<String>,
    dual: Vec<usize>,
    fusion: Vec<[usize; 4]>,
    #[serde(rename = "F")]
    f: Vec<[f64; 12]>,
    pivotal: Vec<[f64; 3]>,
    tolerance: Option<f64>,
}

fn as_index(v: f64, what: &str) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::Schema(format!("{what} must be a non-negative integer, got {v}")));
    }
    Ok(v as usize)
}

/// Reads and structurally validates a category file.
pub fn load_spec<P: AsRef<Path>>(path: P) -> Result<CategorySpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

/// Parses a category from its JSON text.
pub fn parse_spec(text: &str) -> Result<CategorySpec> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    CategorySpec::from_raw(raw)
}

impl CategorySpec {
    fn from_raw(raw: RawSpec) -> Result<Self> {
        let n = raw.simples.len();
        if n == 0 {
            return Err(Error::Schema("no simple objects".into()));
        }
        if raw.dual.len() != n {
            return Err(Error::Schema(format!("dual has {} entries, expected {n}", raw.dual.len())));
        }
        if let Some(&bad) = raw.dual.iter().find(|&&d| d >= n) {
            return Err(Error::Schema(format!("dual index {bad} out of range")));
        }
        let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0) {
            return Err(Error::Schema("tolerance must be positive".into()));
        }

        let mut fusion = vec![0usize; n * n * n];
        for &[a, b, cc, m] in &raw.fusion {
            if a >= n || b >= n || cc >= n {
                return Err(Error::Schema(format!("fusion entry ({a},{b},{cc}) out of range")));
            }
            fusion[(a * n + b) * n + cc] = m;
        }
        let mut spec = CategorySpec {
            name: raw.name,
            simples: raw.simples,
            dual: raw.dual,
            fusion,
            f_symbols: HashMap::new(),
            f_inverse: HashMap::new(),
            pivotal: vec![ONE; n],
            coev_scale: vec![ONE; n],
            tolerance,
        };
        spec.check_units()?;

        let mut given: HashMap<(usize, usize, usize, usize), Vec<(Channel, Channel, C64)>> = HashMap::new();
        for row in &raw.f {
            let idx: Vec<usize> = row[..10]
                .iter()
                .map(|&v| as_index(v, "F index"))
                .collect::<Result<_>>()?;
            if idx[..6].iter().any(|&i| i >= n) {
                return Err(Error::Schema(format!("F entry {idx:?} has a label out of range")));
            }
            let (a, b, cc, d, e, f) = (idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]);
            let (mu, nu, rho, sigma) = (idx[6], idx[7], idx[8], idx[9]);
            given
                .entry((a, b, cc, d))
                .or_default()
                .push(((e, mu, nu), (f, rho, sigma), C64::new(row[10], row[11])));
        }

        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let right = spec.right_channels(a, b, cc, d);
                        let left = spec.left_channels(a, b, cc, d);
                        let entries = given.remove(&(a, b, cc, d));
                        if right.is_empty() && left.is_empty() {
                            if let Some(es) = entries {
                                if !es.is_empty() {
                                    return Err(Error::Schema(format!(
                                        "F entry given for empty block ({a},{b},{cc},{d})"
                                    )));
                                }
                            }
                            continue;
                        }
                        if right.len() != left.len() {
                            return Err(Error::Schema(format!(
                                "fusion rules are not associative at ({a},{b},{cc},{d})"
                            )));
                        }
                        let k = right.len();
                        let is_unit = a == 0 || b == 0 || cc == 0;
                        let mut block = FBlock { right, left, matrix: CMatrix::zeros(k, k) };
                        match entries {
                            None if is_unit => block.matrix = CMatrix::identity(k, k),
                            None => {
                                return Err(Error::Schema(format!(
                                    "missing F block ({a},{b},{cc},{d})"
                                )))
                            }
                            Some(es) => {
                                for (r, l, v) in es {
                                    let (i, j) = match (block.right_index(r), block.left_index(l)) {
                                        (Some(i), Some(j)) => (i, j),
                                        _ => {
                                            return Err(Error::Schema(format!(
                                                "F entry ({a},{b},{cc},{d}) {r:?}->{l:?} is not an allowed channel"
                                            )))
                                        }
                                    };
                                    block.matrix[(i, j)] = v;
                                }
                                if is_unit {
                                    let dev = linalg::max_abs(&(&block.matrix - CMatrix::identity(k, k)));
                                    if dev > tolerance {
                                        return Err(Error::Unit(format!(
                                            "F block ({a},{b},{cc},{d}) involves the unit but is not the identity"
                                        )));
                                    }
                                    block.matrix = CMatrix::identity(k, k);
                                }
                            }
                        }
                        let inv = block.matrix.clone().try_inverse().ok_or_else(|| {
                            Error::Schema(format!("F block ({a},{b},{cc},{d}) is singular"))
                        })?;
                        spec.f_inverse.insert((a, b, cc, d), inv);
                        spec.f_symbols.insert((a, b, cc, d), block);
                    }
                }
            }
        }

        let mut seen = vec![false; n];
        for &[a, re, im] in &raw.pivotal {
            let a = as_index(a, "pivotal label")?;
            if a >= n {
                return Err(Error::Schema(format!("pivotal label {a} out of range")));
            }
            spec.pivotal[a] = C64::new(re, im);
            seen[a] = true;
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            return Err(Error::Schema(format!("missing pivotal coefficient for simple {a}")));
        }
        if (spec.pivotal[0] - ONE).norm() > tolerance {
            return Err(Error::Unit("pivotal coefficient of the unit must be 1".into()));
        }
        if let Some(a) = spec.pivotal.iter().position(|p| p.norm() < tolerance) {
            return Err(Error::Schema(format!("pivotal coefficient of {a} vanishes")));
        }

        for x in 0..n {
            let xd = spec.dual[x];
            let v = spec.f(x, xd, x, x, (0, 0, 0), (0, 0, 0));
            if v.norm() < tolerance {
                return Err(Error::Schema(format!("simple {x} is not rigid: vanishing F[x,x*,x,x] unit entry")));
            }
            spec.coev_scale[x] = ONE / v;
        }
        Ok(spec)
    }

    fn check_units(&self) -> Result<()> {
        let n = self.rank();
        if self.dual[0] != 0 {
            return Err(Error::Unit("the unit must be self-dual".into()));
        }
        for a in 0..n {
            if self.dual[self.dual[a]] != a {
                return Err(Error::Schema(format!("dual is not an involution at {a}")));
            }
            for b in 0..n {
                let want = usize::from(a == b);
                if self.n(0, a, b) != want || self.n(a, 0, b) != want {
                    return Err(Error::Unit(format!(
                        "unit fusion fails: N[1][{a}][{b}]={} N[{a}][1][{b}]={}",
                        self.n(0, a, b),
                        self.n(a, 0, b)
                    )));
                }
                let want_dual = usize::from(b == self.dual[a]);
                if self.n(a, b, 0) != want_dual {
                    return Err(Error::Unit(format!(
                        "rigidity fails: N[{a}][{b}][1] = {} but dual({a}) = {}",
                        self.n(a, b, 0),
                        self.dual[a]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of simple objects.
    pub fn rank(&self) -> usize {
        self.simples.len()
    }

    /// Fusion multiplicity `N[a][b][c] = dim Hom(a b, c)`.
    #[inline]
    pub fn n(&self, a: usize, b: usize, c: usize) -> usize {
        let r = self.rank();
        self.fusion[(a * r + b) * r + c]
    }

    /// Simples appearing in `a b`, with multiplicity.
    pub fn fuse(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rank()).filter_map(move |c| {
            let m = self.n(a, b, c);
            (m > 0).then_some((c, m))
        })
    }

    pub fn right_channels(&self, a: usize, b: usize, cc: usize, d: usize) -> Vec<Channel> {
        let mut out = Vec::new();
        for e in 0..self.rank() {
            for mu in 0..self.n(b, cc, e) {
                for nu in 0..self.n(a, e, d) {
                    out.push((e, mu, nu));
                }
            }
        }
        out
    }

    pub fn left_channels(&self, a: usize, b: usize, cc: usize, d: usize) -> Vec<Channel> {
        let mut out = Vec::new();
        for f in 0..self.rank() {
            for rho in 0..self.n(a, b, f) {
                for sigma in 0..self.n(f, cc, d) {
                    out.push((f, rho, sigma));
                }
            }
        }
        out
    }

    pub fn f_block(&self, a: usize, b: usize, cc: usize, d: usize) -> Option<&FBlock> {
        self.f_symbols.get(&(a, b, cc, d))
    }

    /// Inverse of an F block: rows are left channels, columns right channels.
    pub fn f_block_inverse(&self, a: usize, b: usize, cc: usize, d: usize) -> Option<&CMatrix> {
        self.f_inverse.get(&(a, b, cc, d))
    }

    /// Single F-symbol entry, zero when the channels do not exist.
    pub fn f(&self, a: usize, b: usize, cc: usize, d: usize, right: Channel, left: Channel) -> C64 {
        self.f_block(a, b, cc, d)
            .and_then(|blk| Some(blk.matrix[(blk.right_index(right)?, blk.left_index(left)?)]))
            .unwrap_or(ZERO)
    }

    /// Entry of the inverse F block, mapping left coordinates to right ones.
    pub fn f_inv(&self, a: usize, b: usize, cc: usize, d: usize, left: Channel, right: Channel) -> C64 {
        match (self.f_block(a, b, cc, d), self.f_block_inverse(a, b, cc, d)) {
            (Some(blk), Some(inv)) => match (blk.left_index(left), blk.right_index(right)) {
                (Some(i), Some(j)) => inv[(i, j)],
                _ => ZERO,
            },
            _ => ZERO,
        }
    }

    /// Scalar of the coevaluation `1 -> x* x` (the evaluation `x x* -> 1` is 1).
    pub fn coev_scale(&self, x: usize) -> C64 {
        self.coev_scale[x]
    }

    /// Pivotal dimension `p_x * coev_scale(x)`, the trace of `id_x`.
    pub fn pivotal_dim(&self, x: usize) -> C64 {
        self.pivotal[x] * self.coev_scale[x]
    }

    /// Copy of the category with one F entry overwritten.
    pub fn with_f_entry(&self, key: (usize, usize, usize, usize), i: usize, j: usize, value: C64) -> Self {
        let mut out = self.clone();
        if let Some(blk) = out.f_symbols.get_mut(&key) {
            blk.matrix[(i, j)] = value;
            if let Some(inv) = blk.matrix.clone().try_inverse() {
                out.f_inverse.insert(key, inv);
            }
        }
        out
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Keys of all stored F blocks in a fixed order.
    pub fn f_keys(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut keys: Vec<_> = self.f_symbols.keys().copied().collect();
        keys.sort_unstable();
        keys
    }
}

/// Maximum deviations per family of coherence constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub pentagon: f64,
    pub unit: f64,
    pub fusion_associativity: f64,
    pub rigidity: f64,
    pub sphericality: f64,
    pub pivotal_multiplicativity: f64,
    pub f_condition: f64,
    pub tolerance: f64,
}

impl ValidationReport {
    /// `(family, residual)` pairs; the condition number is reported separately.
    pub fn families(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("pentagon", self.pentagon),
            ("unit", self.unit),
            ("fusion_associativity", self.fusion_associativity),
            ("rigidity", self.rigidity),
            ("sphericality", self.sphericality),
            ("pivotal_multiplicativity", self.pivotal_multiplicativity),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.families().iter().map(|f| f.1).fold(0.0, f64::max)
    }

    pub fn valid(&self) -> bool {
        self.max_residual() < self.tolerance && self.f_condition.is_finite()
    }
}

/// Checks every pentagon, unit, rigidity and pivotal identity.
pub fn validate_pentagon(spec: &CategorySpec) -> ValidationReport {
    let n = spec.rank();

    let mut unit: f64 = 0.0;
    let mut f_condition: f64 = 1.0;
    for key in spec.f_keys() {
        let blk = spec.f_block(key.0, key.1, key.2, key.3).unwrap();
        if key.0 == 0 || key.1 == 0 || key.2 == 0 {
            let k = blk.matrix.nrows();
            unit = unit.max(linalg::max_abs(&(&blk.matrix - CMatrix::identity(k, k))));
        }
        let s = linalg::singular_values(&blk.matrix);
        let cond = match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        };
        f_condition = f_condition.max(cond);
    }

    let mut assoc: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let lhs: usize = (0..n).map(|e| spec.n(a, b, e) * spec.n(e, cc, d)).sum();
                    let rhs: usize = (0..n).map(|f| spec.n(b, cc, f) * spec.n(a, f, d)).sum();
                    assoc = assoc.max((lhs as f64 - rhs as f64).abs());
                }
            }
        }
    }

    let pentagon = pentagon_residual(spec);

    let mut rigidity: f64 = 0.0;
    let mut sphericality: f64 = 0.0;
    for x in 0..n {
        let xd = spec.dual[x];
        // (1_{x*} ev_{x*}) (coev_x 1_{x*}) = 1_{x*}
        let z = spec.coev_scale(x) * spec.f_inv(xd, x, xd, xd, (0, 0, 0), (0, 0, 0));
        rigidity = rigidity.max((z - ONE).norm());
        let left = spec.pivotal[x] * spec.coev_scale(x);
        let right = spec.coev_scale(xd) / spec.pivotal[x];
        sphericality = sphericality.max((left - right).norm());
    }

    let mut multiplicativity: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let sum: C64 = spec.fuse(a, b).map(|(cc, m)| spec.pivotal_dim(cc) * c(m as f64)).sum();
            multiplicativity = multiplicativity.max((spec.pivotal_dim(a) * spec.pivotal_dim(b) - sum).norm());
        }
    }

    ValidationReport {
        pentagon,
        unit,
        fusion_associativity: assoc,
        rigidity,
        sphericality,
        pivotal_multiplicativity: multiplicativity,
        f_condition,
        tolerance: spec.tolerance,
    }
}

/// Max deviation between the two ways of re-associating `a (b (c x))` into
/// `((a b) c) x`.
fn pentagon_residual(spec: &CategorySpec) -> f64 {
    let n = spec.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for x in 0..n {
                    for d in 0..n {
                        worst = worst.max(pentagon_block(spec, a, b, cc, x, d));
                    }
                }
            }
        }
    }
    worst
}

fn pentagon_block(spec: &CategorySpec, a: usize, b: usize, cc: usize, x: usize, d: usize) -> f64 {
    let n = spec.rank();
    let mut worst: f64 = 0.0;
    // right tree: alpha: d -> a p, beta: p -> b q, gamma: q -> c x
    for p in 0..n {
        for q in 0..n {
            for alpha in 0..spec.n(a, p, d) {
                for beta in 0..spec.n(b, q, p) {
                    for gamma in 0..spec.n(cc, x, q) {
                        // left tree: kappa: s -> a b, delta: r -> s c, eps: d -> r x
                        for s in 0..n {
                            for r in 0..n {
                                for kappa in 0..spec.n(a, b, s) {
                                    for delta in 0..spec.n(s, cc, r) {
                                        for eps in 0..spec.n(r, x, d) {
                                            let mut lhs = ZERO;
                                            for lambda in 0..spec.n(s, q, d) {
                                                lhs += spec.f(a, b, q, d, (p, beta, alpha), (s, kappa, lambda))
                                                    * spec.f(s, cc, x, d, (q, gamma, lambda), (r, delta, eps));
                                            }
                                            let mut rhs = ZERO;
                                            for t in 0..n {
                                                for eta in 0..spec.n(b, cc, t) {
                                                    for theta in 0..spec.n(t, x, p) {
                                                        let f1 = spec.f(b, cc, x, p, (q, gamma, beta), (t, eta, theta));
                                                        if f1 == ZERO {
                                                            continue;
                                                        }
                                                        for iota in 0..spec.n(a, t, r) {
                                                            rhs += f1
                                                                * spec.f(a, t, x, d, (p, theta, alpha), (r, iota, eps))
                                                                * spec.f(a, b, cc, r, (t, eta, iota), (s, kappa, delta));
                                                        }
                                                    }
                                                }
                                            }
                                            worst = worst.max((lhs - rhs).norm());
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Perron dimensions of the simples.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDimensionTable {
    pub d: Vec<f64>,
    /// Global dimension `sum_a d_a^2`.
    pub d2: f64,
}

/// Largest real eigenvalue of each fusion matrix `(N[a][b][c])_{b,c}`.
pub fn quantum_dimensions(spec: &CategorySpec) -> Result<QuantumDimensionTable> {
    let n = spec.rank();
    let mut d = Vec::with_capacity(n);
    for a in 0..n {
        let m = CMatrix::from_fn(n, n, |b, cc| c(spec.n(a, b, cc) as f64));
        let ev = linalg::eigenvalues(&m)
            .ok_or_else(|| Error::NonConvergence(format!("fusion matrix of simple {a}")))?;
        let top = ev
            .iter()
            .filter(|z| z.im.abs() < 1e-8)
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::NonConvergence(format!("no real eigenvalue for simple {a}")));
        }
        d.push(top);
    }
    let d2 = d.iter().map(|x| x * x).sum();
    Ok(QuantumDimensionTable { d, d2 })
}
