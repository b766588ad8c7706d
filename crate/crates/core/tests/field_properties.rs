//! Randomised algebraic properties of the rings of integers.

use bianchi::field::CLASS_NUMBER_ONE;
use bianchi::{AlgInt, FieldContext};
use num_complex::Complex64;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldContext> {
    proptest::sample::select(CLASS_NUMBER_ONE.to_vec()).prop_map(|d| FieldContext::new(d).unwrap())
}

fn alg_int(r: i64) -> impl Strategy<Value = AlgInt> {
    (-r..=r, -r..=r).prop_map(|(a, b)| AlgInt::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_nonnegative_and_matches_modulus(ctx in field(), n in alg_int(300)) {
        let norm = ctx.norm(n);
        prop_assert!(norm >= 0);
        prop_assert_eq!(norm == 0, n.is_zero());
        let m = ctx.to_complex(n).norm_sqr();
        prop_assert!((norm as f64 - m).abs() <= 1e-9 * m.max(1.0));
    }

    #[test]
    fn conjugation_is_a_norm_preserving_involution(ctx in field(), n in alg_int(300)) {
        let c = ctx.conj(n);
        prop_assert_eq!(ctx.conj(c), n);
        prop_assert_eq!(ctx.norm(c), ctx.norm(n));
        prop_assert!((ctx.to_complex(c) - ctx.to_complex(n).conj()).norm() < 1e-9);
    }

    #[test]
    fn norm_is_multiplicative(ctx in field(), m in alg_int(100), n in alg_int(100)) {
        prop_assert_eq!(ctx.norm(ctx.mul(m, n)), ctx.norm(m) * ctx.norm(n));
    }

    #[test]
    fn divisor_sum_ignores_units(ctx in field(), n in alg_int(12), re in -1.0..2.0f64, im in -5.0..5.0f64) {
        prop_assume!(!n.is_zero());
        let s = Complex64::new(re, im);
        let base = ctx.divisor_sum(n, s).unwrap();
        for &u in ctx.units() {
            let v = ctx.divisor_sum(ctx.mul(u, n), s).unwrap();
            prop_assert!((v - base).norm() <= 1e-11 * base.norm().max(1.0));
        }
    }

    #[test]
    fn divisor_sum_is_multiplicative(ctx in field(), m in alg_int(6), n in alg_int(6), im in -3.0..3.0f64) {
        prop_assume!(!m.is_zero() && !n.is_zero() && ctx.coprime(m, n));
        let s = Complex64::new(0.5, im);
        let lhs = ctx.divisor_sum(ctx.mul(m, n), s).unwrap();
        let rhs = ctx.divisor_sum(m, s).unwrap() * ctx.divisor_sum(n, s).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
    }

    #[test]
    fn pairing_phase_is_unimodular_and_periodic(
        ctx in field(),
        n in alg_int(20),
        lam in alg_int(20),
        x in -3.0..3.0f64,
        y in -3.0..3.0f64,
    ) {
        let z = Complex64::new(x, y);
        let base = ctx.dual_pairing_phase(n, z);
        prop_assert!((base.norm() - 1.0).abs() < 1e-13);
        let shifted = ctx.dual_pairing_phase(n, z + ctx.to_complex(lam));
        prop_assert!((shifted - base).norm() < 1e-8);
    }

    #[test]
    fn canonical_representative_is_a_unit_multiple(ctx in field(), n in alg_int(50)) {
        prop_assume!(!n.is_zero());
        let c = ctx.canonical(n);
        prop_assert!(ctx.units().iter().any(|&u| ctx.mul(u, n) == c));
        for &u in ctx.units() {
            prop_assert_eq!(ctx.canonical(ctx.mul(u, n)), c);
        }
    }
}

#[test]
fn enumeration_counts_every_associate_class_once() {
    for d in CLASS_NUMBER_ONE {
        let ctx = FieldContext::new(d).unwrap();
        let bound = 10_000;
        let all = ctx.elements_up_to_norm(bound).iter().filter(|n| !n.is_zero()).count();
        let reps = ctx.enumerate_up_to_units(bound).len();
        assert_eq!(all, ctx.unit_count() * reps, "D={d}");
    }
}
