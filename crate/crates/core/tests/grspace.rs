use proptest::prelude::*;
use rand::Rng;
use torsion_core::grspace::*;
use torsion_core::random::{random_poly, rng, FieldParams};
use torsion_core::ratfunc::{RatFunc, UPoly};
use torsion_core::rational::{frac, int, Rational};
use torsion_core::scalar::Scalar;
use torsion_core::{Error, Poly, TensorField};

fn up(c: &[i64]) -> UPoly {
    UPoly::new(c.iter().map(|&x| int(x)).collect())
}

fn rf(p: &UPoly) -> RatFunc {
    RatFunc::from_poly(4, p.clone())
}

fn cosmo(s: [&[i64]; 4], n: &[i64], k: Rational) -> CosmologyMetric {
    CosmologyMetric::new(s.map(up), up(n), k).unwrap()
}

// random s_i with a positive constant term, random n, coupling in 1/2..3
fn random_cosmo(seed: u64) -> CosmologyMetric {
    let mut r = rng(seed, &[4]);
    let mut poly = |min: i64| {
        let mut c: Vec<i64> = (0..3).map(|_| r.gen_range(-3..=3)).collect();
        c[0] = r.gen_range(min..=4);
        up(&c)
    };
    let s = [poly(1), poly(1), poly(1), poly(1)];
    let n = poly(-3);
    CosmologyMetric::new(s, n, frac(rng(seed, &[5]).gen_range(1..=6), 2)).unwrap()
}

// The six nonzero lowered antisymmetric symbols, read off the listing with
// 1-based indices and t as coordinate 1; each equals sign * (-n'/2).
const LISTED: [(usize, usize, usize, i64); 6] = [
    (1, 2, 3, 1),
    (1, 3, 2, -1),
    (2, 1, 3, -1),
    (2, 3, 1, 1),
    (3, 1, 2, 1),
    (3, 2, 1, -1),
];

#[test]
fn antisymmetric_symbols_match_listing() {
    let m = cosmo([&[1], &[2, 1], &[3], &[0, 1]], &[0, 0, 1], int(1));
    let g = m.first_kind_antisym();
    let value = rf(&up(&[0, -1])); // -n'/2 with n = t^2
    let mut expected = TensorField::<RatFunc>::zeros(4, 0, 3);
    for (a, j, k, sign) in LISTED {
        expected.set(&[a - 1, j - 1, k - 1], value.scaled(&int(sign)));
    }
    assert_eq!(g, expected);
}

#[test]
fn antisymmetric_symbols_vanish_without_n() {
    let m = cosmo([&[1], &[1], &[1], &[1]], &[5], int(1));
    assert!(m.first_kind_antisym().is_zero());
}

#[test]
fn lagrangian_paths_agree() {
    for seed in 0..20 {
        let m = random_cosmo(seed);
        assert_eq!(m.matter_lagrangian(), m.matter_lagrangian_closed_form(), "seed {seed}");
    }
}

#[test]
fn lagrangian_examples() {
    let m = cosmo([&[1], &[1], &[1], &[7]], &[0, 0, 1], int(1));
    assert_eq!(m.matter_lagrangian(), rf(&up(&[0, 0, 6])));
    let c = cosmo([&[1, 1], &[2], &[1], &[1]], &[4], int(1));
    assert!(c.matter_lagrangian().is_zero());
}

#[test]
fn scalar_family_splits_into_r_plus_lagrangian() {
    for seed in 0..5 {
        let m = random_cosmo(seed);
        let diff = m.scalar_curvature_family().minus(&m.scalar_curvature_r());
        assert_eq!(diff, m.matter_lagrangian_closed_form());
    }
    let flat = cosmo([&[1], &[1], &[1], &[1]], &[0, 1], frac(2, 1));
    assert_eq!(flat.scalar_curvature_family(), RatFunc::from_poly(4, UPoly::constant(int(3))));
    let no_n = cosmo([&[1, 1], &[2, 0, 1], &[1], &[3]], &[0], int(1));
    assert_eq!(no_n.scalar_curvature_family(), no_n.scalar_curvature_r());
}

#[test]
fn scalar_curvature_of_power_law_metric() {
    // dt^2 + a^2 dx^2 in 1+3 dimensions: R = -6 (a''/a + a'^2/a^2); a = t gives -6/t^2
    let m = cosmo([&[1], &[0, 0, 1], &[0, 0, 1], &[0, 0, 1]], &[0], int(1));
    assert_eq!(m.scalar_curvature_r(), RatFunc::new(4, up(&[-6]), up(&[0, 0, 1])));
    // with -dt^2 the sign flips
    let l = cosmo([&[-1], &[0, 0, 1], &[0, 0, 1], &[0, 0, 1]], &[0], int(1));
    assert_eq!(l.scalar_curvature_r(), RatFunc::new(4, up(&[6]), up(&[0, 0, 1])));
}

#[test]
fn torsion_term_is_quadratic_in_n() {
    let m = random_cosmo(9);
    let lam = frac(-3, 2);
    let scaled = m.with_scaled_n(&lam);
    let base = m.scalar_curvature_family().minus(&m.scalar_curvature_r());
    let after = scaled.scalar_curvature_family().minus(&scaled.scalar_curvature_r());
    assert_eq!(after, base.scaled(&(&lam * &lam)));
}

#[test]
fn energy_momentum_is_diagonal_with_expected_entries() {
    for seed in 0..4 {
        let m = random_cosmo(seed);
        let t = m.energy_momentum();
        let lm = m.matter_lagrangian_closed_form();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(t.get(&[i, j]).is_zero());
                }
            }
            let s = rf(&m.s()[i]);
            let want = if i == 3 { s.times(&lm) } else { s.times(&lm).negated() };
            assert_eq!(t.get(&[i, i]), &want, "T{}{}", i + 1, i + 1);
        }
        assert_eq!(t.swap_lower(0, 1).unwrap(), t);
    }
    let none = cosmo([&[1, 1], &[2], &[3], &[4]], &[2], int(1));
    assert!(none.energy_momentum().is_zero());
}

#[test]
fn christoffel_split_matches_both_formulas() {
    let m = random_cosmo(3);
    let g = m.christoffel();
    assert_eq!(g.sym(), m.levi_civita().sym());
    // torsion half = b^{ia} G_{a.[jk]}
    let inv = m.sym_inverse();
    let low = m.first_kind_antisym();
    let raised = TensorField::from_fn(4, 1, 2, |ix| {
        let mut acc = RatFunc::zero(4);
        for a in 0..4 {
            acc = acc.plus(&inv.get(&[ix[0], a]).times(low.get(&[a, ix[1], ix[2]])));
        }
        acc
    });
    assert_eq!(g.tor_half(), &raised);
    let sym_only = cosmo([&[1, 1], &[2, 0, 1], &[1], &[3]], &[0], int(1));
    assert_eq!(sym_only.christoffel(), sym_only.levi_civita());
}

#[test]
fn recovery_is_proportional_to_n() {
    for (n, k) in [(vec![0, 1], frac(1, 1)), (vec![0, 1, 1], frac(2, 3)), (vec![0, 2, 0, 1], frac(5, 2))] {
        let m = CosmologyMetric::new([up(&[2, 1]), up(&[1]), up(&[1, 0, 1]), up(&[1])], up(&n), k.clone()).unwrap();
        let rec = m.recover_n(&int(0), &int(1), 1000).unwrap();
        let c = (2.0 / (3.0 * torsion_core::rational::to_f64(&k))).sqrt();
        for (t, v) in rec.t.iter().zip(&rec.n1) {
            let exact: f64 = n.iter().enumerate().map(|(p, a)| *a as f64 * t.powi(p as i32)).sum();
            assert!((v - c * exact).abs() < 1e-8, "t={t}: {v} vs {}", c * exact);
        }
        assert!(rec.n1.iter().zip(&rec.n2).all(|(a, b)| a + b == 0.0));
        assert_eq!(rec.t.len(), 1001);
    }
}

#[test]
fn recovery_errors_and_trivial_case() {
    let zero = cosmo([&[1], &[1], &[1], &[1]], &[0], int(1));
    let rec = zero.recover_n(&int(0), &int(1), 10).unwrap();
    assert!(rec.n1.iter().all(|x| *x == 0.0));
    let neg = cosmo([&[1], &[1], &[1], &[1]], &[0, 1], int(-1));
    assert!(matches!(neg.recover_n(&int(0), &int(1), 10), Err(Error::NonPositiveCoupling(_))));
    let vanishing = cosmo([&[0, 1], &[1], &[1], &[1]], &[0, 1], int(1));
    assert!(matches!(vanishing.recover_n(&int(0), &int(1), 10), Err(Error::Vanishing(_))));
    assert!(matches!(zero.recover_n(&int(0), &int(1), 0), Err(Error::InvalidArgument(_))));
}

fn random_metric(seed: u64, dim: usize, symmetric: bool) -> GeneralizedMetric {
    let mut r = rng(seed, &[dim as u64, 6]);
    let p = FieldParams { degree: 2, bound: 2 };
    let raw = TensorField::from_fn(dim, 0, 2, |_| random_poly(&mut r, dim, p));
    let g = if symmetric { sym_part(&raw) } else { raw };
    // push the diagonal away from singular at the sample points
    let g = g.add(&TensorField::from_fn(dim, 0, 2, |ix| Poly::constant(dim, int(if ix[0] == ix[1] { 20 } else { 0 })))).unwrap();
    GeneralizedMetric::new(g).unwrap()
}

fn point(seed: u64, dim: usize) -> Vec<Rational> {
    let mut r = rng(seed, &[1]);
    (0..dim).map(|_| frac(r.gen_range(-3..=3), r.gen_range(1..=3))).collect()
}

#[test]
fn symmetric_metric_gives_metric_levi_civita() {
    for dim in [2, 3] {
        for seed in 0..4 {
            let m = random_metric(seed, dim, true);
            let p = point(seed, dim);
            let l = m.christoffel_at(&p).unwrap();
            assert!(l.is_symmetric());
            assert!(m.einstein_metricity_residual_at(&l, &p).unwrap().is_zero());
        }
    }
}

#[test]
fn constant_metric_is_flat() {
    let g = TensorField::from_fn(3, 0, 2, |ix| Poly::constant(3, int((ix[0] * 3 + ix[1]) as i64 + if ix[0] == ix[1] { 9 } else { 0 })));
    let m = GeneralizedMetric::new(g.clone()).unwrap();
    let l = m.christoffel_at(&point(0, 3)).unwrap();
    assert!(l.coeffs().is_zero());
    assert!(einstein_metricity_residual(&g, &torsion_core::Connection::zero(3)).unwrap().is_zero());
}

#[test]
fn nonsymmetric_metric_parts() {
    let m = random_metric(2, 3, false);
    let p = point(5, 3);
    let l = m.christoffel_at(&p).unwrap();
    let sym_only = GeneralizedMetric::new(m.sym()).unwrap();
    assert_eq!(l.sym(), sym_only.christoffel_at(&p).unwrap().sym());
    let inv = m.sym_inverse_at(&p).unwrap();
    let low = christoffel_first_kind_antisym(m.g()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let want: Rational = (0..3).map(|a| inv.get(i, a) * low.get(&[a, j, k]).eval(&p)).sum();
                assert_eq!(l.tor_half().get(&[i, j, k]).eval(&p), want);
            }
        }
    }
    assert!(christoffel_first_kind_antisym(&m.sym()).unwrap().is_zero());
}

#[test]
fn bad_inputs() {
    let m = random_metric(1, 2, true);
    assert!(matches!(m.sym_inverse_at(&[int(0)]), Err(Error::DimensionMismatch { .. })));
    assert!(GeneralizedMetric::new(TensorField::<Poly>::kronecker(2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lagrangian_paths_agree_random(seed in any::<u64>()) {
        let m = random_cosmo(seed);
        prop_assert_eq!(m.matter_lagrangian(), m.matter_lagrangian_closed_form());
    }
}
