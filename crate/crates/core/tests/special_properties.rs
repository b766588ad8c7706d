//! Identities satisfied by the special functions and the quadrature.

use std::f64::consts::PI;

use bianchi::special::quad::GaussLegendre;
use bianchi::special::{bessel_k_scaled, log_gamma, mellin_transform};
use bianchi::testfn::{registry, Support};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gamma_reflection(re in -4.0..5.0f64, im in 0.05..20.0f64) {
        let z = c(re, im);
        let lhs = log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap();
        let rhs = (PI / (PI * z).sin()).ln();
        prop_assert!(((lhs - rhs).exp() - 1.0).norm() < 1e-10, "z = {z}");
    }

    #[test]
    fn gamma_duplication(re in 0.05..20.0f64, im in -40.0..40.0f64) {
        let z = c(re, im);
        let lhs = log_gamma(z).unwrap() + log_gamma(z + 0.5).unwrap();
        let rhs = (1.0 - 2.0 * z) * 2f64.ln() + 0.5 * PI.ln() + log_gamma(2.0 * z).unwrap();
        prop_assert!(((lhs - rhs).exp() - 1.0).norm() < 1e-10, "z = {z}");
    }

    #[test]
    fn scaled_bessel_is_finite_nonzero_and_even(
        mu in -3.0..3.0f64,
        t in -100.0..100.0f64,
        lx in -6.0..(700f64.ln()),
    ) {
        let x = lx.exp();
        let a = bessel_k_scaled(c(mu, t), x).unwrap().value;
        let b = bessel_k_scaled(c(-mu, -t), x).unwrap().value;
        prop_assert!(a.is_finite() && a.norm() > 0.0, "ν = {mu}+{t}i, x = {x}: {a}");
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}

/// `K_{ν−1}(x) + K_{ν+1}(x) = −2K_ν′(x)`, derivative by Richardson-extrapolated
/// central differences. All three orders share `Im ν`, hence the scale factor.
#[test]
fn bessel_recurrence() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let nu = c(rng.gen_range(-2.0..2.0), rng.gen_range(-30.0..30.0));
        let x: f64 = rng.gen_range(0.5..40.0);
        let k = |n: Complex64, x: f64| bessel_k_scaled(n, x).unwrap().value;
        let d = |h: f64| (k(nu, x + h) - k(nu, x - h)) / (2.0 * h);
        let h = 1e-3 * x;
        let deriv = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        let lhs = k(nu - 1.0, x) + k(nu + 1.0, x);
        let scale = lhs.norm().max(2.0 * deriv.norm()).max(k(nu + 1.0, x).norm());
        let rel = (lhs + 2.0 * deriv).norm() / scale;
        assert!(rel < 1e-6, "ν = {nu}, x = {x}: rel {rel:e}");
    }
}

/// Composite Gauss–Legendre with `n` and `2n` panels over each registry
/// function's support agree to 10⁻¹⁰ and match the Mellin transform at 0.
#[test]
fn quadrature_refinement_on_registry() {
    let gl = GaussLegendre::new(20);
    for h in registry() {
        let (lo, hi) = match h.support {
            Support::Compact { lo, hi } => (lo, hi),
            // e^{−y} is below 10⁻¹⁷ past 40
            Support::HalfLine { .. } => (1e-12, 40.0),
        };
        // log-spaced panels resolve the 1/y weight near 0
        let integrate = |n: usize| -> f64 {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    let u0 = a + (b - a) * k as f64 / n as f64;
                    let u1 = a + (b - a) * (k + 1) as f64 / n as f64;
                    gl.integrate(|u| h.eval(u.exp()), u0, u1)
                })
                .sum()
        };
        let coarse = integrate(64);
        let fine = integrate(128);
        assert!((coarse - fine).abs() < 1e-10 * fine.abs().max(1.0), "{}: {coarse} vs {fine}", h.name);
        if let Ok(m) = mellin_transform(&h, c(0.0, 0.0)) {
            assert!((m.re - fine).abs() < 1e-10 * fine.abs().max(1.0), "{}: {m} vs {fine}", h.name);
        }
    }
}
