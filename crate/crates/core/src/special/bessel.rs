//! Modified Bessel function `K_ν(x)` of complex order and positive argument,
//! returned with the factor `exp(π|Im ν|/2)` so that large imaginary orders
//! neither underflow nor lose relative accuracy.
//!
//! Two regimes:
//! * small `x`: `K_ν = π/(2 sin νπ)·(I_{−ν} − I_ν)` from the power series,
//!   accepted only when its cancellation is mild;
//! * otherwise the integral `½∫ exp(−x cosh u + νu) du` along the contour
//!   `u = v + iθ(v)`, `sin θ = (T/x)·v/sinh v`, which is the steepest-descent
//!   path for a purely imaginary order `iT`. When `T > x` the path runs along
//!   `Im u = π/2` for `|v| ≤ a′` (`T a′ = x sinh a′`), where the integrand is
//!   bounded but oscillates.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{log_gamma, rgamma};
use super::quad::adaptive;
use crate::error::{Error, Result};

/// `exp(π|Im ν|/2)·K_ν(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledBesselValue {
    pub value: Complex64,
    pub nu: Complex64,
    pub x: f64,
}

impl ScaledBesselValue {
    /// `log` of the scale factor that was multiplied in.
    pub fn log_scale(&self) -> f64 {
        PI * self.nu.im.abs() / 2.0
    }

    /// The unscaled `K_ν(x)`; may underflow for large `|Im ν|`.
    pub fn unscaled(&self) -> Complex64 {
        self.value * (-self.log_scale()).exp()
    }
}

pub fn bessel_k_scaled(nu: Complex64, x: f64) -> Result<ScaledBesselValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Bessel K needs a positive argument, got x = {x}"
        )));
    }
    Ok(ScaledBesselValue {
        value: k_scaled(nu, x),
        nu,
        x,
    })
}

/// Scaled `K_ν(x)` without argument validation.
pub(crate) fn k_scaled(nu: Complex64, x: f64) -> Complex64 {
    // reduce to Re ν ≥ 0, Im ν ≥ 0 using K_ν = K_{−ν} and K_{ν̄} = conj K_ν
    let (mu, t) = (nu.re, nu.im);
    let flip = (mu < 0.0) != (t < 0.0);
    let v = k_scaled_quadrant(mu.abs(), t.abs(), x);
    if flip {
        v.conj()
    } else {
        v
    }
}

fn k_scaled_quadrant(mu: f64, t: f64, x: f64) -> Complex64 {
    if x <= 2.0 {
        if let Some(v) = series(Complex64::new(mu, t), x) {
            return v;
        }
    }
    contour(mu, t, x)
}

/// Power-series evaluation; `None` if cancellation would cost more than
/// about four digits.
fn series(nu: Complex64, x: f64) -> Option<Complex64> {
    let sin = (nu * PI).sin();
    if sin.norm() < 1e-3 || nu.im > 200.0 {
        return None;
    }
    let half = x / 2.0;
    let q = half * half;
    let lnh = half.ln();
    let mut parts = [Complex64::new(0.0, 0.0); 2];
    let mut mass = 0.0;
    for (idx, order) in [-nu, nu].into_iter().enumerate() {
        // t_0 = (x/2)^ν / Γ(ν+1), built in log space to stay finite
        let lead = match log_gamma(order + 1.0) {
            Ok(lg) => (order * lnh - lg).exp(),
            Err(_) => (order * lnh).exp() * rgamma(order + 1.0),
        };
        let mut term = lead;
        let mut sum = term;
        let mut abs_sum = term.norm();
        for k in 1..200 {
            let kf = k as f64;
            term = term * q / ((order + kf) * kf);
            sum += term;
            abs_sum += term.norm();
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        parts[idx] = sum;
        mass += abs_sum;
    }
    let scale = Complex64::new(PI / 2.0, 0.0) * (nu.im.abs() * FRAC_PI_2).exp() / sin;
    let value = scale * (parts[0] - parts[1]);
    let cond = scale.norm() * mass / value.norm();
    if value.is_finite() && cond < 1e4 {
        Some(value)
    } else {
        None
    }
}

/// Geometry of the integration path for a given `(μ, T, x)`, `μ, T ≥ 0`.
struct Path {
    mu: f64,
    t: f64,
    x: f64,
    /// plateau half-width (0 when `T ≤ x`)
    a: f64,
    /// log of the peak modulus, factored out of the integrand
    peak: f64,
}

impl Path {
    fn new(mu: f64, t: f64, x: f64) -> Self {
        let a = if t > x { plateau_edge(t, x) } else { 0.0 };
        let mut p = Path {
            mu,
            t,
            x,
            a,
            peak: 0.0,
        };
        p.peak = p.log_modulus_peak();
        p
    }

    /// `(1 − g, 1 + g, g′)` at `|v| = a′ + e`, with `g` evaluated at `v`.
    fn g_parts(&self, v: f64, e: f64) -> (f64, f64, f64) {
        let av = v.abs();
        let (one_m_g, g) = if av == 0.0 {
            (1.0 - self.t / self.x, self.t / self.x)
        } else {
            let sh = av.sinh();
            // x sinh|v| − T|v| = x(sinh|v| − sinh a′) − T e, using T a′ = x sinh a′
            let half = e / 2.0;
            let sinhc = if half < 1e-4 { 1.0 + half * half / 6.0 } else { half.sinh() / half };
            let num = e * (self.x * (self.a + half).cosh() * sinhc - self.t);
            let omg = num / (self.x * sh);
            (omg, 1.0 - omg)
        };
        // g′(v) = (T/x)(sinh v − v cosh v)/sinh² v, odd in v
        let dg = if av < 1e-2 {
            let v2 = av * av;
            -(self.t / self.x) * av * (1.0 / 3.0 - v2 / 30.0 + v2 * v2 * 31.0 / 15120.0)
        } else {
            let sh = av.sinh();
            (self.t / self.x) * (sh - av * av.cosh()) / (sh * sh)
        };
        (one_m_g.max(0.0), 1.0 + g, dg * v.signum())
    }

    /// Real part of the exponent on the descent part, and `θ`.
    fn descent_exponent(&self, v: f64, e: f64) -> (f64, f64, f64) {
        let (omg, opg, dg) = self.g_parts(v, e);
        let cos_th = (omg * opg).sqrt();
        let g = opg - 1.0;
        let th = g.atan2(cos_th);
        let re = -self.x * v.cosh() * cos_th + self.mu * v - self.t * th + FRAC_PI_2 * self.t;
        let dth = if cos_th > 0.0 { dg / cos_th } else { 0.0 };
        (re, th, dth)
    }

    fn descent(&self, v: f64, e: f64) -> Complex64 {
        let (re, th, dth) = self.descent_exponent(v, e);
        Complex64::from_polar((re - self.peak).exp(), self.mu * th) * Complex64::new(1.0, dth)
    }

    fn plateau(&self, v: f64) -> Complex64 {
        let phase = self.t * v + self.mu * FRAC_PI_2 - self.x * v.sinh();
        Complex64::from_polar((self.mu * v - self.peak).exp(), phase)
    }

    fn log_modulus(&self, v: f64) -> f64 {
        if self.a > 0.0 && v.abs() <= self.a {
            self.mu * v
        } else {
            self.descent_exponent(v, v.abs() - self.a).0
        }
    }

    fn step(&self) -> f64 {
        0.01 * (1.0 / self.x.sqrt()).min(1.0)
    }

    /// Sample offsets `e ≥ 0` past the plateau edge with geometrically growing spacing.
    fn offsets(&self) -> impl Iterator<Item = f64> {
        let h = self.step();
        (1..400).map(move |k| h * (1.08f64.powi(k) - 1.0) / 0.08)
    }

    fn log_modulus_peak(&self) -> f64 {
        let mut best = if self.a > 0.0 {
            self.mu * self.a
        } else {
            self.log_modulus(0.0)
        };
        for dir in [1.0, -1.0] {
            let mut local = f64::NEG_INFINITY;
            for e in self.offsets() {
                let lm = self.log_modulus(dir * (self.a + e));
                local = local.max(lm);
                if lm < local - 60.0 || e > 80.0 {
                    break;
                }
            }
            best = best.max(local);
        }
        best
    }

    /// Offset past the plateau edge beyond which the integrand stays below
    /// `e^{−48}` of the peak.
    fn cutoff(&self, dir: f64) -> f64 {
        let below = |e: f64| self.log_modulus(dir * (self.a + e)) < self.peak - 48.0;
        let mut prev = 0.0;
        for e in self.offsets() {
            if below(e) && below(1.5 * e) {
                // refine between the previous sample and e
                let (mut lo, mut hi) = (prev, e);
                for _ in 0..30 {
                    let mid = 0.5 * (lo + hi);
                    if below(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return hi;
            }
            prev = e;
            if e > 80.0 {
                return e;
            }
        }
        prev
    }
}

/// Root `a > 0` of `x sinh a = T a` for `T > x`.
fn plateau_edge(t: f64, x: f64) -> f64 {
    let f = |a: f64| x * a.sinh() - t * a;
    let mut lo = (t / x).acosh();
    let mut hi = lo.max(1e-8) * 2.0 + 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    if lo == 0.0 {
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    // x sinh a − T a vanishes at 0 too; a tiny bracket means T ≈ x
    0.5 * (lo + hi)
}

fn contour(mu: f64, t: f64, x: f64) -> Complex64 {
    let path = Path::new(mu, t, x);
    let a = path.a;
    let mut total = Complex64::new(0.0, 0.0);
    let epsabs = 1e-15;
    let epsrel = 1e-11;
    let limit = 40_000;

    if a > 0.0 {
        // oscillatory plateau, panels of roughly half a period
        let v0 = (t / x).acosh().min(a);
        let swing = 4.0 * (t * v0 - x * v0.sinh()).abs() + 2.0 * mu * a;
        let panels = ((swing / PI).ceil() as usize + 2).min(8000);
        let bps: Vec<f64> = (0..=panels)
            .map(|k| -a + 2.0 * a * k as f64 / panels as f64)
            .collect();
        total += adaptive(|v| path.plateau(v), &bps, epsabs, epsrel, limit).value;

        // descent arms, v = ±(a′ + w²)
        for dir in [1.0, -1.0] {
            let w_max = path.cutoff(dir).sqrt();
            let bps: Vec<f64> = (0..=8).map(|k| w_max * k as f64 / 8.0).collect();
            let arm = adaptive(
                |w| {
                    let e = w * w;
                    path.descent(dir * (a + e), e) * (2.0 * w)
                },
                &bps,
                epsabs,
                epsrel,
                limit,
            );
            total += arm.value;
        }
    } else {
        for dir in [1.0, -1.0] {
            let v_max = path.cutoff(dir);
            let bps: Vec<f64> = (0..=16).map(|k| v_max * k as f64 / 16.0).collect();
            let arm = adaptive(|v| path.descent(dir * v, v), &bps, epsabs, epsrel, limit);
            total += arm.value;
        }
    }
    0.5 * total * path.peak.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(mu: f64, t: f64, x: f64) -> Complex64 {
        bessel_k_scaled(Complex64::new(mu, t), x).unwrap().value
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm()
    }

    #[test]
    fn closed_form_half_order() {
        for x in [1e-3, 0.3, 1.0, 2.5, 17.0, 400.0] {
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let got = k(0.5, 0.0, x);
            assert!(close(got, Complex64::new(want, 0.0), 1e-12), "x={x}: {got}");
            let via_contour = contour(0.5, 0.0, x);
            assert!(close(via_contour, Complex64::new(want, 0.0), 1e-11), "x={x}");
        }
    }

    #[test]
    fn order_zero_at_one() {
        let got = k(0.0, 0.0, 1.0);
        assert!((got.re - 0.421_024_438_240_708_34).abs() < 1e-14);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_k_scaled(Complex64::new(1.0, 0.0), 0.0).is_err());
        assert!(bessel_k_scaled(Complex64::new(1.0, 0.0), -2.0).is_err());
    }

    #[test]
    fn even_in_order() {
        for (mu, t, x) in [(0.0, 10.0, 1.0), (0.4, 37.0, 12.0), (1.5, -80.0, 90.0), (2.7, 3.0, 0.01)] {
            let a = k(mu, t, x);
            let b = k(-mu, -t, x);
            assert!(close(a, b, 1e-11), "{mu} {t} {x}");
        }
    }

    #[test]
    fn series_and_contour_agree_where_both_apply() {
        for (mu, t, x) in [
            (0.3, 0.0, 1.5),
            (0.0, 5.0, 0.7),
            (1.0, 40.0, 1.9),
            (2.2, 99.0, 0.05),
            (0.0, 100.0, 1.0),
            (2.9, 17.5, 0.2),
        ] {
            let s = series(Complex64::new(mu, t), x).expect("series accepted");
            let c = contour(mu, t, x);
            assert!(close(c, s, 1e-10), "{mu}+{t}i at {x}: {c} vs {s}");
        }
    }
    #[test]
    fn mpmath_reference_values() {
        // mpmath.besselk(ν, x)·exp(π|Im ν|/2) at 30 digits
        let cases = [
            (0.0, 10.0, 1.0, 0.749_463_924_941_299, 0.0),
            (3.0, 100.0, 1e-3, 985_465_284_157_139.4, -186_200_208_931_787.99),
            (0.0, 100.0, 1.0, -0.054_852_077_041_674_495, 0.0),
            (1.0, 40.0, 30.0, 0.426_762_404_407_252_94, -0.099_391_552_088_425_16),
            (0.3, 5.0, 0.01, -2.644_043_398_780_971, -3.637_829_126_241_22),
            (2.5, 60.0, 70.0, -0.004_989_143_345_869_619, 0.003_574_343_212_012_743),
            (0.0, 1e-3, 500.0, 3.998_597_657_151_446_3e-219, -8.482_039_964_173_648e-272),
            (3.0, 0.0, 1e-3, 7_999_999_000.000_125, 0.0),
            (0.0, 50.0, 49.9, 0.391_088_827_779_943_49, 0.0),
            (0.0, 50.0, 50.1, 0.371_768_514_491_240_5, 0.0),
            (1.5, 20.0, 0.5, 199.990_584_602_502_33, 15.329_362_926_076_48),
        ];
        for (mu, t, x, re, im) in cases {
            let want = Complex64::new(re, im);
            let got = k(mu, t, x);
            assert!(close(got, want, 1e-9), "{mu}+{t}i at {x}: {got} vs {want}");
        }
    }
}
