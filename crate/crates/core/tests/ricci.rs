use proptest::prelude::*;
use torsion_core::connection::{Connection, DerivKind};
use torsion_core::random::{random_tensor, rng, FieldParams};
use torsion_core::ricci::*;
use torsion_core::{Error, Poly, TensorField};

fn instance(seed: u64, dim: usize) -> (Connection<Poly>, TensorField<Poly>) {
    let mut r = rng(seed, &[dim as u64, 7]);
    let p = FieldParams::default();
    let l = Connection::new(random_tensor(&mut r, dim, 1, 2, p)).unwrap();
    let a = random_tensor(&mut r, dim, 1, 1, p);
    (l, a)
}

// Independent oracle: each coefficient as a polynomial in the kind
// signatures (upper sign u, lower sign l) of p, q, r, s. Worked out by hand
// from the composition rule, not from the catalogue.
fn analytic(c: Combination) -> [i8; 17] {
    let sig = |k: u8| DerivKind::from_number(k).unwrap().signature();
    let [(u1, l1), (u2, l2), (u3, l3), (u4, l4)] = c.0.map(sig).map(|(u, l)| (u as i32, l as i32));
    let v = [
        l1 - l4,
        (l2 - l3),
        (l2 + l4),
        (u2 - u3),
        (u1 - u4),
        2 * u1,
        -2 * u3,
        2 * u1 * u2,
        -2 * u3 * u4,
        u1 * l2 + u3 * l4,
        -2 * l1,
        2 * l3,
        2 * l3 * l4,
        -2 * l1 * l2,
        -(l1 * l2 + l3 * l4),
        -(u1 * l2 - u4 * l3),
        -(u2 * l1 - u3 * l4),
    ];
    v.map(|x| {
        assert_eq!(x % 2, 0);
        (x / 2) as i8
    })
}

#[test]
fn catalogue_agrees_with_analytic_formula() {
    for e in identity_catalogue() {
        assert_eq!(e.c, analytic(e.pqrs), "{}", e.pqrs.tag());
    }
}

#[test]
fn catalogue_identities_hold_exactly() {
    for dim in [2, 3] {
        let (l, a) = instance(11, dim);
        for e in identity_catalogue() {
            assert!(verify_identity(e.pqrs, &a, &l).unwrap().is_zero(), "{} at N={dim}", e.pqrs.tag());
        }
    }
}

#[test]
fn quoted_row_for_13_12_fails() {
    let (l, a) = instance(5, 3);
    let mut e = catalogue_entry(Combination([1, 3, 1, 2])).unwrap();
    e.c[1] = 0;
    e.c[3] = 1;
    assert!(!identity_residual(&e, &a, &l).unwrap().is_zero());
}

#[test]
fn uncatalogued_is_an_error() {
    let (l, a) = instance(1, 2);
    let c = Combination([1, 1, 2, 2]);
    assert_eq!(verify_identity(c, &a, &l).unwrap_err(), Error::Uncatalogued([1, 1, 2, 2]));
}

#[test]
fn solver_recovers_all_81_and_matches_oracle() {
    let solver = IdentitySolver::new(&SolverConfig::default()).unwrap();
    assert_eq!(solver.rank(), 17);
    for (c, res) in solver.solve_all(&Combination::all()) {
        let got = res.unwrap_or_else(|e| panic!("{}: {e}", c.tag()));
        assert_eq!(got.c, analytic(c), "{}", c.tag());
    }
}

#[test]
fn solver_reports_ambiguity() {
    // all-zero fields carry no information, so no coefficient is determined
    let cfg = SolverConfig {
        dims: vec![2],
        fit_per_dim: 1,
        fresh_per_dim: 0,
        params: FieldParams { degree: 0, bound: 0 },
        ..Default::default()
    };
    let solver = IdentitySolver::new(&cfg).unwrap();
    assert!(solver.rank() < 17);
    assert!(matches!(solver.solve(Combination([1, 1, 1, 1])), Err(Error::Ambiguous { .. })));
}

#[test]
fn uncatalogued_vectors_lie_in_catalogue_span() {
    let mut all = Vec::new();
    for c in Combination::all() {
        let e = IdentityCoefficients { pqrs: c, c: analytic(c) };
        assert!(express_in_catalogue(&e).is_some(), "{}", c.tag());
        all.push(e);
    }
    assert_eq!(coefficient_rank(&all), 15);
    assert_eq!(affine_rank(&all), 16);
    // c15 = (c14 - c13) / 2 everywhere
    for e in &all {
        assert_eq!(2 * e.c[14], e.c[13] - e.c[12]);
    }
}

#[test]
fn reversed_combination_is_antisymmetric() {
    let (l, a) = instance(21, 3);
    let basis = IdentityBasis::new(&a, &l).unwrap();
    for c in Combination::all() {
        let fwd = basis.combine(&IdentityCoefficients { pqrs: c, c: analytic(c) }.as_rationals());
        let back = basis.combine(&IdentityCoefficients { pqrs: c.reversed(), c: analytic(c.reversed()) }.as_rationals());
        assert_eq!(back, fwd.swap_lower(1, 2).unwrap().neg(), "{}", c.tag());
    }
}

#[test]
fn mixed_family_with_derived_corrections() {
    let (l, a) = instance(31, 3);
    for (k, e) in identity_catalogue().iter().enumerate() {
        let w = MixWeights::random(9, &[k as u64]);
        let res = verify_mixed_family(e.pqrs, &w, MixCorrection::Derived, &a, &l).unwrap();
        assert!(res.is_zero(), "{}", e.pqrs.tag());
    }
}

#[test]
fn pure_weights_reduce_to_plain_identity_for_matching_kinds() {
    let (l, a) = instance(32, 3);
    let e = catalogue_entry(Combination([1, 1, 1, 1])).unwrap();
    let w = MixWeights::pure(1).unwrap();
    let mixed = mixed_family_rhs(&e, &w, MixCorrection::Derived, &a, &l).unwrap();
    let lhs = torsion_core::ricci::DoubleDerivatives::new(&a, &l).unwrap().lhs(e.pqrs);
    assert_eq!(mixed, lhs);
}

#[test]
fn quoted_mixing_corrections_fail() {
    let (l, a) = instance(33, 3);
    let w = MixWeights::random(4, &[]);
    let failing = identity_catalogue()
        .iter()
        .filter(|e| !verify_mixed_family(e.pqrs, &w, MixCorrection::Halved, &a, &l).unwrap().is_zero())
        .count();
    assert!(failing > 0);
}

#[test]
fn expanded_identity_matches_compact_form() {
    let (l, a) = instance(41, 3);
    for e in identity_catalogue() {
        assert!(verify_expanded_identity(e.pqrs, &a, &l).unwrap().is_zero(), "{}", e.pqrs.tag());
    }
}

#[test]
fn product_expansions_hold() {
    for dim in [2, 3] {
        let (l, a) = instance(42, dim);
        for r in product_expansion_residuals(&a, &l).unwrap() {
            assert!(r.is_zero());
        }
    }
}

#[test]
fn identity_is_linear_in_the_field() {
    let (l, a) = instance(50, 2);
    let (_, b) = instance(51, 2);
    let e = catalogue_entry(Combination([2, 3, 2, 3])).unwrap();
    let sum = a.add(&b).unwrap();
    let lhs = evaluate_identity_rhs(&e, &sum, &l).unwrap();
    let rhs = evaluate_identity_rhs(&e, &a, &l).unwrap().add(&evaluate_identity_rhs(&e, &b, &l).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_catalogue_entry_holds(seed in any::<u64>(), k in 0usize..17) {
        let (l, a) = instance(seed, 2);
        let e = &identity_catalogue()[k];
        prop_assert!(verify_identity(e.pqrs, &a, &l).unwrap().is_zero());
    }

    #[test]
    fn random_mixing_holds(seed in any::<u64>(), k in 0usize..17) {
        let (l, a) = instance(seed, 2);
        let e = &identity_catalogue()[k];
        let w = MixWeights::random(seed, &[1]);
        prop_assert!(verify_mixed_family(e.pqrs, &w, MixCorrection::Derived, &a, &l).unwrap().is_zero());
    }
}
