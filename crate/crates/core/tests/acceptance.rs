//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubecat::bundled;
use tubecat::center::{self, CenterObject, IrrepDecomposition, TubeAlgebra};
use tubecat::homspace::{rank_cutoff, Morphism, Object};
use tubecat::linalg::{singular_values, C64};
use tubecat::mpo;
use tubecat::pipeline::{self, Command, RunConfig};
use tubecat::{validate_pentagon, CategorySpec};

use common::{center_dim, closed_form_algebra, cyclic_scalar_half_braidings, double_simples, group_table, has_value};

const VALIDATION_TOL: f64 = 1e-9;
const BRAIDING_TOL: f64 = 1e-8;
const GLOBAL_DIM_TOL: f64 = 1e-8;
const MPO_TOL: f64 = 1e-10;
const PERTURBATION: f64 = 0.1;
const ROUNDTRIP_OPERATORS: usize = 200;
const HARNESS_TRIALS: usize = 100;

const TUBE_DIMS: [(&str, usize); 6] =
    [("vec_z2", 4), ("vec_z2_twisted", 4), ("vec_z3", 9), ("vec_s3", 36), ("fib", 7), ("ising", 12)];
const CENTER_COUNTS: [(&str, usize); 6] =
    [("vec_z2", 4), ("vec_z2_twisted", 4), ("vec_z3", 9), ("vec_s3", 8), ("fib", 4), ("ising", 9)];

struct Outcome {
    lines: Vec<String>,
    failures: usize,
}

impl Outcome {
    fn record(&mut self, id: usize, title: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        self.lines.push(format!("[{tag}] {id:>2} {title}: {detail}"));
        if !pass {
            self.failures += 1;
        }
    }
}

struct Solved {
    spec: CategorySpec,
    alg: TubeAlgebra,
    dec: IrrepDecomposition,
    objs: Vec<CenterObject>,
}

fn validation(out: &mut Outcome) {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut rejected = 0;
    for spec in bundled::all() {
        let t0 = Instant::now();
        let r = validate_pentagon(&spec);
        slowest = slowest.max(t0.elapsed());
        worst = worst.max(r.max_residual());
        let key = spec.f_keys().into_iter().find(|&(a, b, c, _)| a * b * c != 0).expect("nontrivial F block");
        let blk = spec.f_block(key.0, key.1, key.2, key.3).unwrap();
        let bad = spec.with_f_entry(key, 0, 0, blk.matrix[(0, 0)] + C64::new(PERTURBATION, 0.0));
        let t0 = Instant::now();
        if !validate_pentagon(&bad).valid() {
            rejected += 1;
        }
        slowest = slowest.max(t0.elapsed());
    }
    let pass = worst < VALIDATION_TOL && rejected == 6 && slowest < Duration::from_secs(1);
    out.record(
        1,
        "validation",
        pass,
        format!("max residual {worst:.1e} < {VALIDATION_TOL:.0e}; perturbed rejected {rejected}/6; slowest {slowest:.2?} < 1s"),
    );
}

fn tube_dimensions(out: &mut Outcome) -> Vec<TubeAlgebra> {
    let t0 = Instant::now();
    let mut algs = Vec::new();
    let mut got = Vec::new();
    let mut pass = true;
    for (name, dim) in TUBE_DIMS {
        let spec = bundled::load(name).unwrap();
        let alg = center::build_tube_algebra(&spec).unwrap();
        pass &= alg.dim() == dim && common::tube_dim_by_channels(&spec) == dim;
        got.push(format!("{name}={}", alg.dim()));
        algs.push(alg);
    }
    let elapsed = t0.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    out.record(2, "tube algebra dimensions", pass, format!("{} in {elapsed:.2?} < 1s", got.join(" ")));
    algs
}

fn center_counts(out: &mut Outcome, algs: Vec<TubeAlgebra>) -> Vec<Solved> {
    let t0 = Instant::now();
    let mut solved = Vec::new();
    for ((name, _), alg) in CENTER_COUNTS.iter().zip(algs) {
        let spec = bundled::load(name).unwrap();
        let dec = center::decompose(&alg, 0).unwrap();
        let objs = center::extract_all(&spec, &dec).unwrap();
        solved.push(Solved { spec, alg, dec, objs });
    }
    let elapsed = t0.elapsed();
    let mut pass = elapsed < Duration::from_secs(30);
    let mut got = Vec::new();
    for ((name, count), s) in CENTER_COUNTS.iter().zip(&solved) {
        let (labels, m) = closed_form_algebra(&s.spec);
        let oracle = center_dim(labels.len(), &m);
        let group_oracle = match group_table(&s.spec) {
            Some(t) if *name != "vec_z2_twisted" => double_simples(&t),
            _ => oracle,
        };
        pass &= s.objs.len() == *count && oracle == *count && group_oracle == *count;
        got.push(format!("{name}={}/{oracle}", s.objs.len()));
    }
    out.record(3, "center simple counts (extracted/oracle)", pass, format!("{} in {elapsed:.2?} < 30s", got.join(" ")));
    solved
}

fn wedderburn(out: &mut Outcome, solved: &[Solved]) {
    let mut pass = true;
    let mut got = Vec::new();
    for s in solved {
        let sum: usize = s.dec.dims.iter().map(|d| d * d).sum();
        pass &= sum == s.alg.dim();
        got.push(format!("{}={sum}/{}", s.spec.name, s.alg.dim()));
    }
    out.record(4, "Wedderburn sum of squares", pass, got.join(" "));
}

fn braiding_quality(out: &mut Outcome, solved: &[Solved]) {
    let objs = solved.iter().flat_map(|s| &s.objs);
    let hex = objs.clone().map(|o| o.residuals.hexagon).fold(0.0, f64::max);
    let nat = objs.map(|o| o.residuals.naturality).fold(0.0, f64::max);
    out.record(
        5,
        "half-braiding residuals",
        hex < BRAIDING_TOL && nat < BRAIDING_TOL,
        format!("hexagon {hex:.1e}, naturality {nat:.1e} < {BRAIDING_TOL:.0e}"),
    );
}

fn global_dimension(out: &mut Outcome, solved: &[Solved]) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let reference = [("fib", (2.0 + phi) * (2.0 + phi)), ("ising", 16.0)];
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut shown = Vec::new();
    for s in solved {
        let sum: f64 = s.objs.iter().map(|o| o.qdim * o.qdim).sum();
        let d2: f64 = (0..s.spec.rank()).map(|a| s.spec.pivotal_dim(a).norm_sqr()).sum();
        let rel = ((sum - d2 * d2) / (d2 * d2)).abs();
        worst = worst.max(rel);
        if let Some(&(_, r)) = reference.iter().find(|(n, _)| *n == s.spec.name) {
            pass &= ((sum - r) / r).abs() < GLOBAL_DIM_TOL;
            shown.push(format!("{}={sum:.7}", s.spec.name));
        }
    }
    pass &= worst < GLOBAL_DIM_TOL;
    out.record(6, "global dimension", pass, format!("max rel error {worst:.1e} < {GLOBAL_DIM_TOL:.0e}; {}", shown.join(" ")));
}

fn twist_spectra(out: &mut Outcome, solved: &[Solved]) {
    let i = C64::new(0.0, 1.0);
    let minus = C64::new(-1.0, 0.0);
    let twists = |name: &str| -> Vec<C64> {
        solved.iter().find(|s| s.spec.name == name).unwrap().objs.iter().map(|o| o.twist).collect()
    };
    let oracle_matches = |name: &str| {
        let mut got = twists(name);
        let mut want: Vec<C64> = cyclic_scalar_half_braidings(&bundled::load(name).unwrap()).into_iter().map(|(_, t)| t).collect();
        let key = |z: &C64| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64);
        got.sort_by_key(key);
        want.sort_by_key(key);
        got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).norm() < BRAIDING_TOL)
    };
    let z2 = twists("vec_z2");
    let tw = twists("vec_z2_twisted");
    let plain_ok = has_value(&z2, minus, BRAIDING_TOL) && !has_value(&z2, i, BRAIDING_TOL) && !has_value(&z2, -i, BRAIDING_TOL);
    let twisted_ok = has_value(&tw, i, BRAIDING_TOL) && has_value(&tw, -i, BRAIDING_TOL);
    let oracle_ok = oracle_matches("vec_z2") && oracle_matches("vec_z2_twisted");
    out.record(
        7,
        "twist spectra",
        plain_ok && twisted_ok && oracle_ok,
        format!("vec_z2 has -1 and no +-i: {plain_ok}; vec_z2_twisted has +-i: {twisted_ok}; scalar solver agrees: {oracle_ok}"),
    );
}

fn fully_faithful(out: &mut Outcome, solved: &[Solved]) {
    let mut bad = 0;
    let mut pairs = 0;
    for s in solved {
        let rep = center::verify_center(&s.spec, &s.objs, None).unwrap();
        for (i, row) in rep.hom_dims.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                pairs += 1;
                if d != usize::from(i == j) {
                    bad += 1;
                }
            }
        }
    }
    out.record(8, "Hom(z_i, z_j) = delta_ij", bad == 0, format!("{bad} of {pairs} pairs off"));
}

fn mpo_roundtrips(out: &mut Outcome) {
    let specs = bundled::all();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for k in 0..ROUNDTRIP_OPERATORS {
        let spec = &specs[k % specs.len()];
        let len = rng.random_range(2..=3);
        let w: Vec<usize> = (0..len).map(|_| rng.random_range(0..spec.rank())).collect();
        let o = Morphism::random(spec, Object::word(&w), Object::word(&w), &mut rng);
        let cuts: Vec<usize> = if len == 2 { vec![1] } else { [vec![1], vec![2], vec![1, 2]][k % 3].clone() };
        let m = mpo::operator_to_mpo(spec, &o, &cuts).unwrap();
        worst = worst.max(mpo::evaluate(spec, &m).unwrap().distance(&o));
    }
    let mut rank_mismatch = 0;
    let mut canon_worst: f64 = 0.0;
    for spec in &specs {
        for x in 0..spec.rank() {
            for y in 0..spec.rank() {
                let o = Morphism::random(spec, Object::word(&[x, y]), Object::word(&[x, y]), &mut rng);
                let cb = mpo::canonical_bond(spec, &o, 1).unwrap();
                let mate = mpo::mate(spec, &o, &vec![x], &vec![y]).unwrap();
                let cut = rank_cutoff(spec, &mate);
                let svd_ranks: Vec<usize> =
                    mate.blocks.iter().map(|b| singular_values(b).into_iter().filter(|&s| s > cut).count()).collect();
                if svd_ranks != cb.bond {
                    rank_mismatch += 1;
                }
                canon_worst = canon_worst.max(mpo::evaluate(spec, &cb.mpo).unwrap().distance(&o));
            }
        }
    }
    let pass = worst < MPO_TOL && canon_worst < MPO_TOL && rank_mismatch == 0;
    out.record(
        9,
        "MPO roundtrips",
        pass,
        format!(
            "{ROUNDTRIP_OPERATORS} operators max {worst:.1e}; canonical max {canon_worst:.1e} < {MPO_TOL:.0e}; rank mismatches {rank_mismatch}"
        ),
    );
}

fn dinaturality(out: &mut Outcome) {
    let mut worst: f64 = 0.0;
    for (k, spec) in bundled::all().iter().enumerate() {
        let r = mpo::renorm_harness_all(spec, HARNESS_TRIALS, 100 + k as u64).unwrap();
        worst = worst.max(r.max_residual);
    }
    out.record(
        10,
        "dinaturality",
        worst < MPO_TOL,
        format!("{HARNESS_TRIALS} trials per category, max residual {worst:.1e} < {MPO_TOL:.0e}"),
    );
}

fn determinism(out: &mut Outcome) {
    let mut same = 0;
    for name in bundled::NAMES {
        let mut cfg = RunConfig::new(Command::Verify, name);
        cfg.seed = 17;
        let a = pipeline::run(&cfg);
        let b = pipeline::run(&cfg);
        if a.exit == 0 && a.report.to_json() == b.report.to_json() {
            same += 1;
        }
    }
    out.record(11, "determinism of verify", same == 6, format!("{same}/6 categories byte-identical and passing"));
}

fn main() -> ExitCode {
    let mut out = Outcome { lines: Vec::new(), failures: 0 };
    validation(&mut out);
    let algs = tube_dimensions(&mut out);
    let solved = center_counts(&mut out, algs);
    wedderburn(&mut out, &solved);
    braiding_quality(&mut out, &solved);
    global_dimension(&mut out, &solved);
    twist_spectra(&mut out, &solved);
    fully_faithful(&mut out, &solved);
    mpo_roundtrips(&mut out);
    dinaturality(&mut out);
    determinism(&mut out);
    println!("\nacceptance criteria");
    for line in &out.lines {
        println!("{line}");
    }
    println!("{} of {} criteria pass", out.lines.len() - out.failures, out.lines.len());
    if out.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
