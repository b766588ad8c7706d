//! The continuous-spectrum lemma and sweep bookkeeping.

use bianchi::eisenstein::SpectralParam;
use bianchi::hyperbolic::Region;
use bianchi::que::{lemma_cont_check, selftest, theorem2_sweep, theorem3_sweep, ScheduleSpec, SWEEP_EPS};
use bianchi::testfn::TestFunction;
use bianchi::FieldContext;

#[test]
fn lemma_first_case_converges() {
    let ctx = FieldContext::new(-1).unwrap();
    let h = TestFunction::by_name("bump23").unwrap();
    let sched = ScheduleSpec::constant(1.5, vec![10.0, 20.0, 40.0]).unwrap();
    let mut dev = Vec::new();
    for &t in &sched.t_grid {
        let r = lemma_cont_check(&ctx, &h, &sched.param(t).unwrap()).unwrap();
        assert!(r.lhs > 0.0 && r.rhs_main > 0.0);
        dev.push((r.ratio - 1.0).abs());
    }
    assert!(dev[2] < 0.1, "deviations {dev:?}");
    assert!(dev[2] < dev[0], "deviations {dev:?}");
}

/// The approach-one main term omits the bounded constant-term contribution,
/// which is still comparable to it at these heights of `t`.
#[test]
#[ignore = "red: ratios 2.6, 4.5, 2.5 at t = 10, 20, 40 do not trend toward 1"]
fn lemma_second_case_trends_to_one() {
    let ctx = FieldContext::new(-1).unwrap();
    let h = TestFunction::by_name("bump23").unwrap();
    let sched = ScheduleSpec::approach_one(1.0, vec![10.0, 20.0, 40.0]).unwrap();
    let dev: Vec<f64> = sched
        .t_grid
        .iter()
        .map(|&t| (lemma_cont_check(&ctx, &h, &sched.param(t).unwrap()).unwrap().ratio - 1.0).abs())
        .collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "deviations {dev:?}");
}

#[test]
fn lemma_rejects_unbounded_support() {
    let ctx = FieldContext::new(-1).unwrap();
    let sp = SpectralParam::new(1.5, 10.0, "constant_sigma").unwrap();
    assert!(lemma_cont_check(&ctx, &TestFunction::exp_decay(), &sp).is_err());
}

#[test]
fn sweeps_are_bit_reproducible() {
    let ctx = FieldContext::new(-3).unwrap();
    let a = Region::default_a().certify(&ctx).unwrap();
    let sched = ScheduleSpec::constant(1.5, vec![5.0, 10.0]).unwrap();
    let first = theorem3_sweep(&ctx, &a, "A", &sched, SWEEP_EPS).unwrap();
    let second = theorem3_sweep(&ctx, &a, "A", &sched, SWEEP_EPS).unwrap();
    assert_eq!(first, second);
}

#[test]
fn approach_one_rows_carry_decreasing_hypothesis() {
    let ctx = FieldContext::new(-1).unwrap();
    let a = Region::default_a().certify(&ctx).unwrap();
    let b = Region::default_b().certify(&ctx).unwrap();
    let sched = ScheduleSpec::approach_one(1.0, vec![5.0, 10.0]).unwrap();
    let rows = theorem2_sweep(&ctx, &a, &b, &sched, SWEEP_EPS).unwrap();
    let hyp: Vec<f64> = rows.iter().filter(|r| r.region == "A").map(|r| r.hypothesis.unwrap()).collect();
    assert!(hyp[1] < hyp[0]);
    for r in &rows {
        let noise = r.quad_delta.max(r.trunc_eps);
        assert_eq!(r.inconclusive, r.deviation() < 10.0 * noise);
        assert!(r.quad_delta < 1e-5 && r.trunc_eps < 1e-6);
    }
    assert!(theorem2_sweep(&ctx, &a, &b, &ScheduleSpec::constant(1.5, vec![5.0]).unwrap(), SWEEP_EPS).is_err());
}

#[test]
fn selftest_passes_on_two_fields() {
    for d in [-2, -11] {
        let checks = selftest(&FieldContext::new(d).unwrap()).unwrap();
        for c in checks {
            assert!(c.passed, "D={d} {}: {} ≥ {}", c.name, c.value, c.tolerance);
        }
    }
}
