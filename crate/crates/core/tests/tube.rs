mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubecat::bundled;
use tubecat::center::build_tube_algebra;
use tubecat::homspace::{compose, id_tensor, tensor_id, Morphism, Object};
use tubecat::linalg::{gaussian, C64};
use tubecat::tube::{self, tube_compose, tube_hom_dim, TubeVector};

use common::{closed_form_algebra, tube_dim_by_channels};

#[test]
fn algebra_dimension_matches_channel_count() {
    let expected = [("vec_z2", 4), ("vec_z2_twisted", 4), ("vec_z3", 9), ("vec_s3", 36), ("fib", 7), ("ising", 12)];
    for (name, dim) in expected {
        let spec = bundled::load(name).unwrap();
        assert_eq!(tube_dim_by_channels(&spec), dim, "{name}");
        let total: usize = (0..spec.rank())
            .flat_map(|a| (0..spec.rank()).map(move |b| (a, b)))
            .map(|(a, b)| tube_hom_dim(&spec, a, b))
            .sum();
        assert_eq!(total, dim, "{name}");
    }
}

#[test]
fn structure_constants_match_closed_form() {
    for spec in bundled::all() {
        let (labels, m) = closed_form_algebra(&spec);
        let alg = build_tube_algebra(&spec).unwrap();
        assert_eq!(alg.dim(), labels.len());
        for (k, idx) in alg.basis.iter().enumerate() {
            assert_eq!((idx.a, idx.b, idx.x, idx.c), labels[k]);
        }
        let dim = alg.dim();
        let mut ours = nalgebra::DMatrix::<C64>::zeros(dim, dim * dim);
        for (i, row) in alg.gamma.iter().enumerate() {
            for &(j, k, v) in row {
                ours[(k, i * dim + j)] += v;
            }
        }
        let diff = (&ours - &m).iter().fold(0.0f64, |s, z| s.max(z.norm()));
        assert!(diff < 1e-12, "{}: {diff}", spec.name);
    }
}

fn random_tube(spec: &tubecat::CategorySpec, a: usize, b: usize, seed: u64) -> TubeVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = tube_hom_dim(spec, a, b);
    TubeVector { a, b, coeffs: DVector::from_fn(dim, |_, _| gaussian(&mut rng)) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative(which in 0usize..6, a in 0usize..6, b in 0usize..6, c in 0usize..6, d in 0usize..6, seed in any::<u64>()) {
        let spec = bundled::load(bundled::NAMES[which]).unwrap();
        let n = spec.rank();
        let (a, b, c, d) = (a % n, b % n, c % n, d % n);
        let r = random_tube(&spec, a, b, seed);
        let s = random_tube(&spec, b, c, seed.wrapping_add(1));
        let t = random_tube(&spec, c, d, seed.wrapping_add(2));
        let lhs = tube_compose(&spec, &t, &tube_compose(&spec, &s, &r).unwrap()).unwrap();
        let rhs = tube_compose(&spec, &tube_compose(&spec, &t, &s).unwrap(), &r).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-10 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn renormalization_is_dinatural(which in 0usize..6, a in 0usize..6, b in 0usize..6, x0 in 0usize..6, x1 in 0usize..6, y0 in 0usize..6, seed in any::<u64>()) {
        let spec = bundled::load(bundled::NAMES[which]).unwrap();
        let n = spec.rank();
        let (a, b) = (a % n, b % n);
        let x = vec![x0 % n, x1 % n];
        let y = vec![y0 % n];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Morphism::random(&spec, Object::word(&x), Object::word(&y), &mut rng);
        let h = Morphism::random(&spec, Object::word(&[a, y[0]]), Object::word(&[x[0], x[1], b]), &mut rng);
        let lhs = tube::pi(&spec, a, b, &x, &compose(&h, &id_tensor(&spec, &Object::simple(a), &f).unwrap()).unwrap()).unwrap();
        let rhs = tube::pi(&spec, a, b, &y, &compose(&tensor_id(&spec, &f, &Object::simple(b)).unwrap(), &h).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-10);
    }
}

#[test]
fn functor_into_tubes_is_multiplicative() {
    let spec = bundled::load("ising").unwrap();
    for a in 0..3 {
        let f = Morphism::identity_word(&spec, &[a]).scale(C64::new(0.5, -1.0));
        let g = Morphism::identity_word(&spec, &[a]).scale(C64::new(2.0, 0.25));
        let lhs = tube::functor_L(&spec, &compose(&g, &f).unwrap(), a, a).unwrap();
        let rhs = tube_compose(&spec, &tube::functor_L(&spec, &g, a, a).unwrap(), &tube::functor_L(&spec, &f, a, a).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
    }
}

/// `pi` rebuilt from a skewed splitting family `v_k = sum_T G[T, k] u_T` with
/// dual family given by the rows of `G^-1`.
fn pi_with_family(spec: &tubecat::CategorySpec, a: usize, b: usize, w: &[usize], h: &Morphism, seed: u64) -> TubeVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TubeVector::zeros(spec, a, b);
    for (z, &k) in tubecat::homspace::tree_counts(spec, w).iter().enumerate() {
        if k == 0 {
            continue;
        }
        let g = nalgebra::DMatrix::from_fn(k, k, |i, j| gaussian(&mut rng) * 0.3 + if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let ginv = g.clone().try_inverse().unwrap();
        for col in 0..k {
            let mut v = Morphism::zeros(spec, Object::simple(z), Object::word(w));
            let mut cv = Morphism::zeros(spec, Object::word(w), Object::simple(z));
            for t in 0..k {
                v.blocks[z][(t, 0)] = g[(t, col)];
                cv.blocks[z][(0, t)] = ginv[(col, t)];
            }
            let piece = compose(
                &tensor_id(spec, &cv, &Object::simple(b)).unwrap(),
                &compose(h, &id_tensor(spec, &Object::simple(a), &v).unwrap()).unwrap(),
            )
            .unwrap();
            let single = tube::pi(spec, a, b, &[z], &piece).unwrap();
            out.coeffs += single.coeffs;
        }
    }
    out
}

#[test]
fn renormalization_does_not_depend_on_the_splitting_family() {
    for spec in bundled::all() {
        let n = spec.rank();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (a, b) in [(0, 0), (n - 1, n - 1), (1, n - 1)] {
            let w = vec![n - 1, n - 1, 1];
            let h = Morphism::random(&spec, Object::word(&[&[a], w.as_slice()].concat()), Object::word(&[w.as_slice(), &[b]].concat()), &mut rng);
            let std = tube::pi(&spec, a, b, &w, &h).unwrap();
            let skew = pi_with_family(&spec, a, b, &w, &h, 21);
            assert!(std.distance(&skew) < 1e-10 * (1.0 + std.max_abs()), "{}", spec.name);
        }
    }
}
