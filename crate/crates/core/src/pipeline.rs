//! End-to-end pipelines behind the command-line tool.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::center::{self, CenterObject};
use crate::error::{Error, Result};
use crate::fusion::{self, CategorySpec};
use crate::homspace::{Morphism, Object};
use crate::linalg::C64;
use crate::mpo;
use crate::report::{float, Check, Report};
use crate::tube::{self, TubeVector};
use crate::bundled;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_FILE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Random operators used by the MPO roundtrip check.
pub const ROUNDTRIP_OPERATORS: usize = 20;
/// Random two-site operators used by the canonical bond check.
pub const CANONICAL_OPERATORS: usize = 10;
/// Trials of the renormalization harness.
pub const HARNESS_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Tube,
    Center,
    MpoDemo,
    Verify,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "validate" => Command::Validate,
            "tube" => Command::Tube,
            "center" => Command::Center,
            "mpo-demo" => Command::MpoDemo,
            "verify" => Command::Verify,
            _ => return Err(Error::Config(format!("unknown command {s}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// A file path, or the name of a bundled category.
    pub spec_path: String,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub out_path: Option<PathBuf>,
    /// Only count tube hom dimensions.
    pub dims: bool,
}

impl RunConfig {
    pub fn new(command: Command, spec_path: impl Into<String>) -> Self {
        RunConfig { command, spec_path: spec_path.into(), seed: 0, tolerance: None, out_path: None, dims: false }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    pub report: Report,
    /// Set when the run stopped on an error.
    pub error: Option<String>,
}

/// Loads a category from a file, falling back to the bundled data when no
/// such file exists.
pub fn resolve_spec(path: &str) -> Result<CategorySpec> {
    let p = Path::new(path);
    if p.exists() {
        return fusion::load_spec(p);
    }
    let name = p.file_name().and_then(|s| s.to_str()).unwrap_or(path);
    match bundled::source(name) {
        Some(text) => fusion::parse_spec(text),
        None => Err(Error::Io {
            path: path.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled category"),
        }),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Parse(_) => EXIT_FILE,
        Error::Schema(_) | Error::Unit(_) => EXIT_VALIDATION,
        _ => EXIT_INTERNAL,
    }
}

/// Sets the size of the global thread pool from `TUBECAT_THREADS`.
pub fn configure_threads() {
    if let Some(n) = std::env::var("TUBECAT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the configured pipeline and writes the report if asked to.
pub fn run(cfg: &RunConfig) -> Outcome {
    let mut report = Report::new();
    let result = run_inner(cfg, &mut report);
    let (mut exit, error) = match result {
        Ok(()) => (if report.pass() { EXIT_PASS } else { EXIT_VALIDATION }, None),
        Err(e) => (exit_code(&e), Some(e.to_string())),
    };
    if let Some(msg) = &error {
        report.section("error", Value::from(msg.clone()));
        report.push(Check::count("completed", 0, 1));
    }
    if let Some(path) = &cfg.out_path {
        if let Err(e) = crate::report::emit_report(&report, path) {
            return Outcome { exit: EXIT_FILE, report, error: Some(e.to_string()) };
        }
    }
    if exit == EXIT_PASS && !report.pass() {
        exit = EXIT_VALIDATION;
    }
    Outcome { exit, report, error }
}

fn run_inner(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    if let Some(t) = cfg.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {t}")));
        }
    }
    let mut spec = resolve_spec(&cfg.spec_path)?;
    if let Some(t) = cfg.tolerance {
        spec = spec.with_tolerance(t);
    }
    report.section("category", Value::from(spec.name.clone()));
    report.section("seed", Value::from(cfg.seed));
    let tol = spec.tolerance;

    if cfg.command == Command::Tube && cfg.dims {
        report.section("tube", tube_dims(&spec));
        return Ok(());
    }

    report.extend(validation_checks(&spec));
    if !report.pass() || cfg.command == Command::Validate {
        return Ok(());
    }

    match cfg.command {
        Command::Validate => {}
        Command::Tube => {
            report.section("tube", tube_dims(&spec));
            let alg = center::build_tube_algebra(&spec)?;
            report.extend(algebra_checks(&alg, tol));
        }
        Command::Center => {
            center_pipeline(&spec, cfg.seed, report)?;
        }
        Command::MpoDemo => {
            report.extend(mpo_checks(&spec, cfg.seed, tol)?);
        }
        Command::Verify => {
            report.section("tube", tube_dims(&spec));
            let idempotents = center_pipeline(&spec, cfg.seed, report)?;
            report.extend(mpo_checks(&spec, cfg.seed, tol)?);
            let steady = idempotents
                .iter()
                .map(|t| mpo::steady_current_residual(&spec, t))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            report.push(Check::residual("steady_current", steady, 0.1 * tol));
        }
    }
    Ok(())
}

fn validation_checks(spec: &CategorySpec) -> Vec<Check> {
    let v = fusion::validate_pentagon(spec);
    let mut out: Vec<Check> = v.families().into_iter().map(|(name, r)| Check::residual(name, r, spec.tolerance)).collect();
    out.push(Check::residual("f_condition", v.f_condition, f64::INFINITY));
    out
}

/// `{pairs: [{a, b, dim}], total}` over all pairs of simples.
pub fn tube_dims(spec: &CategorySpec) -> Value {
    let n = spec.rank();
    let mut pairs = Vec::new();
    let mut total = 0;
    for a in 0..n {
        for b in 0..n {
            let dim = tube::tube_hom_dim(spec, a, b);
            total += dim;
            pairs.push(json!({"a": a, "b": b, "dim": dim}));
        }
    }
    json!({"pairs": pairs, "total": total})
}

fn algebra_checks(alg: &center::TubeAlgebra, tol: f64) -> Vec<Check> {
    vec![
        Check::residual("tube_associativity", alg.associativity_residual, 10.0 * tol),
        Check::residual("tube_unit", alg.unit_residual, 10.0 * tol),
    ]
}

fn complex_pair(z: C64) -> Value {
    json!([float(z.re), float(z.im)])
}

/// Decomposes the tube algebra, extracts and checks the center, and records
/// the center section; returns the primitive idempotents as tube vectors.
fn center_pipeline(spec: &CategorySpec, seed: u64, report: &mut Report) -> Result<Vec<TubeVector>> {
    let tol = spec.tolerance;
    let alg = center::build_tube_algebra(spec)?;
    report.extend(algebra_checks(&alg, tol));
    let dec = center::decompose(&alg, seed)?;
    let objs = center::extract_all(spec, &dec)?;
    let rep = center::verify_center(spec, &objs, None)?;
    let md = center::modular_data(spec, &objs)?;

    let wedderburn: usize = dec.dims.iter().map(|d| d * d).sum();
    let off_diagonal = (0..rep.count)
        .flat_map(|i| (0..rep.count).map(move |j| (i, j)))
        .filter(|&(i, j)| rep.hom_dims[i][j] != usize::from(i == j))
        .count();
    report.extend([
        Check::residual("idempotent_orthogonality", dec.orthogonality_residual, 10.0 * tol),
        Check::residual("idempotent_completeness", dec.completeness_residual, 10.0 * tol),
        Check::count("center_simples", objs.len() as i64, dec.center_dim as i64),
        Check::count("wedderburn", wedderburn as i64, alg.dim() as i64),
        Check::residual("hexagon", rep.hexagon_max, 10.0 * tol),
        Check::residual("naturality", rep.naturality_max, 10.0 * tol),
        Check::residual(
            "global_dimension",
            ((rep.sum_qdim_sq - rep.global_dim) / rep.global_dim).abs(),
            10.0 * tol,
        ),
        Check::count("hom_offdiagonal", off_diagonal as i64, 0),
        Check::residual("twist_modulus", rep.twist_modulus_max, 10.0 * tol),
        Check::residual("s_unitarity", md.unitarity_residual, 10.0 * tol),
    ]);
    report.section("center", center_section(&alg, &objs, &md, &rep));

    Ok((0..dec.primitive.len())
        .map(|i| {
            let b = dec.base[i];
            alg.restrict(&dec.primitive[i], b, b)
        })
        .collect())
}

fn center_section(
    alg: &center::TubeAlgebra,
    objs: &[CenterObject],
    md: &center::ModularData,
    rep: &center::CenterReport,
) -> Value {
    let simples: Vec<Value> = objs
        .iter()
        .map(|o| json!({"n": o.n, "qdim": float(o.qdim), "twist_re": float(o.twist.re), "twist_im": float(o.twist.im)}))
        .collect();
    let k = objs.len();
    let s: Vec<Value> = (0..k).map(|i| Value::Array((0..k).map(|j| complex_pair(md.s[(i, j)])).collect())).collect();
    let t: Vec<Value> = md.t.iter().map(|&z| complex_pair(z)).collect();
    let mut section = json!({
        "algebra_dim": alg.dim(),
        "simples": simples,
        "S": s,
        "T": t,
        "checks": {
            "hexagon_max": float(rep.hexagon_max),
            "naturality_max": float(rep.naturality_max),
            "sum_dim_sq": float(rep.sum_qdim_sq),
            "global_dim": float(rep.global_dim),
        },
    });
    if !md.modular {
        section["warning"] = Value::from("S is degenerate");
    }
    section
}

fn random_word<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Vec<usize> {
    (0..len).map(|_| rng.random_range(0..n)).collect()
}

/// Roundtrip, canonical bond and renormalization checks.
pub fn mpo_checks(spec: &CategorySpec, seed: u64, tol: f64) -> Result<Vec<Check>> {
    let n = spec.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d70_6f5f_6465_6d6f);
    let mut roundtrip: f64 = 0.0;
    for _ in 0..ROUNDTRIP_OPERATORS {
        let len = rng.random_range(2..=3);
        let w = random_word(n, len, &mut rng);
        let o = Morphism::random(spec, Object::word(&w), Object::word(&w), &mut rng);
        let cuts: Vec<usize> = (1..len).filter(|_| rng.random_bool(0.5)).collect();
        let cuts = if cuts.is_empty() { vec![1] } else { cuts };
        let m = mpo::operator_to_mpo(spec, &o, &cuts)?;
        roundtrip = roundtrip.max(mpo::evaluate(spec, &m)?.distance(&o) / o.max_abs().max(1.0));
    }

    let mut canonical: f64 = 0.0;
    let mut rank_mismatch = 0;
    let mut oversized = 0;
    for _ in 0..CANONICAL_OPERATORS {
        let x = random_word(n, 1, &mut rng);
        let y = random_word(n, 1, &mut rng);
        let w = [x.as_slice(), &y].concat();
        let o = Morphism::random(spec, Object::word(&w), Object::word(&w), &mut rng);
        let cb = mpo::canonical_bond(spec, &o, 1)?;
        canonical = canonical.max(mpo::evaluate(spec, &cb.mpo)?.distance(&o) / o.max_abs().max(1.0));
        if cb.bond != cb.mate_ranks {
            rank_mismatch += 1;
        }
        let naive = mpo::operator_to_mpo(spec, &o, &[1])?;
        if bond_qdim(spec, &cb.mpo.tensors[0].right) > bond_qdim(spec, &naive.tensors[0].right) + tol {
            oversized += 1;
        }
    }

    let harness = mpo::renorm_harness_all(spec, HARNESS_TRIALS, seed)?;
    Ok(vec![
        Check::residual("mpo_roundtrip", roundtrip, 0.1 * tol),
        Check::residual("canonical_roundtrip", canonical, 0.1 * tol),
        Check::count("canonical_rank_mismatch", rank_mismatch, 0),
        Check::count("canonical_bond_oversized", oversized, 0),
        Check::residual("dinaturality", harness.max_residual, 0.1 * tol),
    ])
}

/// Total quantum dimension of a bond.
pub fn bond_qdim(spec: &CategorySpec, bond: &Object) -> f64 {
    bond.terms
        .iter()
        .map(|w| w.iter().map(|&a| spec.pivotal_dim(a).norm()).product::<f64>())
        .sum()
}
