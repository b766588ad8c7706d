//! Complex log-Gamma and digamma.
//!
//! Both use upward recurrence until `|z| ≥ 15` and `Re z ≥ 0`, then the
//! Stirling series. The log-Gamma branch is the analytic one (cut along the
//! negative real axis), obtained by subtracting principal logarithms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k(2k−1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

// B_{2k} / (2k) for k = 1..=10
const DIGAMMA_SERIES: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
    -174611.0 / 6600.0,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn shift_count(z: Complex64) -> usize {
    let mut n = 0usize;
    let mut w = z;
    while w.re < 0.0 || w.norm() < 15.0 {
        w += 1.0;
        n += 1;
    }
    n
}

/// `log Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole {
            function: "log_gamma",
            at: z,
        });
    }
    let n = shift_count(z);
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..n {
        correction += (z + k as f64).ln();
    }
    let w = z + n as f64;
    Ok(stirling(w) - correction)
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

/// `log Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    log_gamma(Complex64::new(x, 0.0))
        .expect("positive argument")
        .re
}

/// `Γ(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}

/// `1/Γ(z)`, entire; exactly zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// `ψ(z) = Γ′(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole {
            function: "digamma",
            at: z,
        });
    }
    // reflection keeps the recurrence short far left of the axis
    if z.re < -20.0 {
        let w = Complex64::new(1.0, 0.0) - z;
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma(w)? - cot * PI);
    }
    let n = shift_count(z);
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..n {
        correction += (z + k as f64).inv();
    }
    let w = z + n as f64;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in DIGAMMA_SERIES {
        series += p * c;
        p *= inv2;
    }
    Ok(w.ln() - inv * 0.5 - series - correction)
}
