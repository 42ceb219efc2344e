use proptest::prelude::*;
use torsion_core::connection::{
    covariant_derivative, covariant_derivative_literal, double_covariant_derivative,
    explicit_double_derivative, verify_derivative_relations, Connection, DerivKind,
};
use torsion_core::random::{random_tensor, rng, FieldParams};
use torsion_core::rational::{frac, int};
use torsion_core::{Poly, TensorField};

fn instance(seed: u64, dim: usize) -> (Connection<Poly>, TensorField<Poly>) {
    let mut r = rng(seed, &[dim as u64]);
    let p = FieldParams::default();
    let l = Connection::new(random_tensor(&mut r, dim, 1, 2, p)).unwrap();
    let a = random_tensor(&mut r, dim, 1, 1, p);
    (l, a)
}

#[test]
fn composition_matches_explicit_forms() {
    for seed in 0..3 {
        let (l, a) = instance(seed, 3);
        for p in DerivKind::INDEPENDENT {
            for q in DerivKind::INDEPENDENT {
                let lhs = double_covariant_derivative(p, q, &a, &l).unwrap();
                let rhs = explicit_double_derivative(p, q, &a, &l).unwrap();
                assert_eq!(lhs, rhs, "kinds {p},{q}");
            }
        }
    }
}

#[test]
fn signature_form_matches_literal_rules() {
    for dim in 2..=4 {
        let (l, a) = instance(40 + dim as u64, dim);
        for k in DerivKind::ALL {
            assert_eq!(
                covariant_derivative(k, &a, &l).unwrap(),
                covariant_derivative_literal(k, &a, &l).unwrap(),
                "kind {k}"
            );
        }
    }
}

#[test]
fn relations_hold_at_small_dimensions() {
    for dim in 2..=4 {
        for seed in 0..3 {
            let (l, a) = instance(seed, dim);
            for (tag, res) in verify_derivative_relations(&l, &a).unwrap() {
                assert!(res.is_zero(), "{tag} at N={dim}");
            }
        }
    }
}

#[test]
fn zero_connection_double_derivative_is_second_partials() {
    let (_, a) = instance(5, 3);
    let l = Connection::zero(3);
    let d = double_covariant_derivative(DerivKind::K2, DerivKind::K3, &a, &l).unwrap();
    assert_eq!(d, a.gradient().gradient());
}

#[test]
fn dimension_mismatch_is_an_error() {
    let (l, _) = instance(1, 3);
    let a = TensorField::<Poly>::kronecker(2);
    assert!(covariant_derivative(DerivKind::K1, &a, &l).is_err());
}

#[test]
fn product_rule_for_mixed_valence() {
    let mut r = rng(77, &[]);
    let p = FieldParams::default();
    let l = Connection::new(random_tensor(&mut r, 3, 1, 2, p)).unwrap();
    let a = random_tensor(&mut r, 3, 1, 1, p);
    let b = random_tensor(&mut r, 3, 0, 1, p);
    for k in DerivKind::ALL {
        // slots of a (x) b: [i; j, l]; derivative appends k
        let lhs = covariant_derivative(k, &a.outer(&b).unwrap(), &l).unwrap();
        let da_b = covariant_derivative(k, &a, &l)
            .unwrap()
            .outer(&b)
            .unwrap()
            .permute(&[0, 1, 3, 2])
            .unwrap();
        let a_db = a.outer(&covariant_derivative(k, &b, &l).unwrap()).unwrap();
        assert_eq!(lhs, da_b.add(&a_db).unwrap(), "kind {k}");
    }
}

#[test]
fn sym_is_average_of_paired_kinds() {
    let (l, a) = instance(9, 3);
    let d = |k| covariant_derivative(k, &a, &l).unwrap();
    let h = frac(1, 2);
    let avg12 = TensorField::linear_combination(&[(h.clone(), &d(DerivKind::K1)), (h.clone(), &d(DerivKind::K2))]).unwrap();
    let avg34 = TensorField::linear_combination(&[(h.clone(), &d(DerivKind::K3)), (h, &d(DerivKind::K4))]).unwrap();
    assert_eq!(d(DerivKind::Sym), avg12);
    assert_eq!(d(DerivKind::Sym), avg34);
}

#[test]
fn symmetric_connection_makes_kinds_coincide() {
    let (l, a) = instance(12, 3);
    let (assoc, _) = l.decompose();
    let base = covariant_derivative(DerivKind::Sym, &a, &assoc).unwrap();
    for k in DerivKind::ALL {
        assert_eq!(covariant_derivative(k, &a, &assoc).unwrap(), base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), dim in 2usize..=4) {
        let (l, _) = instance(seed, dim);
        let s = l.sym();
        let t = l.tor_half();
        prop_assert_eq!(&s.swap_lower(0, 1).unwrap(), s);
        prop_assert_eq!(&t.swap_lower(0, 1).unwrap(), &t.neg());
        prop_assert_eq!(&s.add(t).unwrap(), l.coeffs());
    }

    #[test]
    fn derivative_is_linear(seed in any::<u64>(), c in -4i64..=4) {
        let (l, a) = instance(seed, 2);
        let mut r = rng(seed, &[99]);
        let b = random_tensor(&mut r, 2, 1, 1, FieldParams::default());
        for k in DerivKind::ALL {
            let comb = TensorField::linear_combination(&[(int(c), &a), (int(1), &b)]).unwrap();
            let lhs = covariant_derivative(k, &comb, &l).unwrap();
            let da = covariant_derivative(k, &a, &l).unwrap();
            let db = covariant_derivative(k, &b, &l).unwrap();
            let rhs = TensorField::linear_combination(&[(int(c), &da), (int(1), &db)]).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
