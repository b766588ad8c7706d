//! Mellin transform `H(s) = ∫₀^∞ h(y) y^{−s} dy/y` of a registry test function.

use num_complex::Complex64;

use super::quad::{adaptive, adaptive_half_line};
use crate::error::{Error, Result};
use crate::testfn::{Support, TestFunction};

pub fn mellin_transform(h: &TestFunction, s: Complex64) -> Result<Complex64> {
    let integrand = |y: f64| {
        if y <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let ly = y.ln();
        h.eval(y) * (-(s + 1.0) * ly).exp()
    };
    let (epsabs, epsrel) = (1e-13, 1e-13);
    let r = match h.support {
        Support::Compact { lo, hi } => {
            // panel count tracks the oscillation of y^{−i Im s}
            let swing = s.im.abs() * (hi / lo).ln();
            let n = (swing / 3.0).ceil().max(4.0) as usize;
            let bps: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
            adaptive(integrand, &bps, epsabs, epsrel, 4000)
        }
        Support::HalfLine { order_at_zero } => {
            if s.re >= order_at_zero {
                return Err(Error::Divergent(format!(
                    "{} has no Mellin transform at Re s = {} (needs Re s < {order_at_zero})",
                    h.name, s.re
                )));
            }
            let head = adaptive(integrand, &[0.0, 0.25, 1.0], epsabs, epsrel, 4000);
            let tail = adaptive_half_line(integrand, 1.0, epsabs, epsrel, 4000);
            let mut r = head;
            r.value += tail.value;
            r.abserr += tail.abserr;
            r.converged &= tail.converged;
            r
        }
    };
    if !r.converged || !r.value.is_finite() {
        return Err(Error::NoConvergence { delta: r.abserr });
    }
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::TestFunction;

    #[test]
    fn euler_integral() {
        let h = TestFunction::exp_decay();
        let v = mellin_transform(&h, Complex64::new(-2.0, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-10);
        let v = mellin_transform(&h, Complex64::new(-0.5, 0.0)).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-9);
        assert!(matches!(
            mellin_transform(&h, Complex64::new(0.5, 1.0)),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn bump_at_zero_is_its_log_integral() {
        let h = TestFunction::bump("b", 2.0, 3.0);
        let direct: f64 = crate::special::quad::GaussLegendre::new(200).integrate(|y| h.eval(y) / y, 2.0, 3.0);
        let v = mellin_transform(&h, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.re - direct).abs() < 1e-10);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn bump_at_two_refines() {
        let h = TestFunction::bump("b", 2.0, 3.0);
        let v = mellin_transform(&h, Complex64::new(2.0, 0.0)).unwrap();
        // mpmath.quad of the same bump
        assert!((v.re - 0.040_137_122_886_144_085).abs() < 1e-10, "{v}");
    }
}
