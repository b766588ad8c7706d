//! The Eisenstein series `E(p, s)` of `PSL₂(O)` at its single cusp.
//!
//! Two independent evaluators:
//! * [`EisensteinEvaluator`]: the Fourier expansion
//!   `y^s + φ(s) y^{2−s} + (2y/ξ_K(s)) Σ_{n≠0} |n|^{s−1} σ_{1−s}(n) K_{s−1}(4π|n|y/√|d_K|) e(⟨n*, z⟩)`,
//!   valid wherever `ξ_K(s) ≠ 0`;
//! * [`coset_sum_eval`]: the defining sum over `Γ_∞\Γ`, for `Re s > 2` only.
//!
//! Agreement of the two fixes every normalisation (pairing, dual lattice,
//! unit counting, factor 2).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldContext};
use crate::hyperbolic::{pairwise_sum, PointH3};
use crate::lfunctions::{dedekind_log_derivative, dedekind_zeta, log_completed_xi, CriticalZero};
use crate::special::bessel::k_scaled;
use crate::special::quad::adaptive;
use crate::testfn::TestFunction;

/// `s = σ + it` together with the name of the schedule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    pub sigma: f64,
    pub t: f64,
    pub schedule_tag: String,
}

impl SpectralParam {
    pub fn new(sigma: f64, t: f64, schedule_tag: impl Into<String>) -> Result<Self> {
        if !(sigma >= 1.0) || !sigma.is_finite() || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "spectral parameter needs σ ≥ 1, got σ = {sigma}, t = {t}"
            )));
        }
        Ok(SpectralParam {
            sigma,
            t,
            schedule_tag: schedule_tag.into(),
        })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_phi_domain(s: Complex64) -> Result<()> {
    if s == c(1.0) || s == c(2.0) {
        return Err(Error::Pole {
            function: "scattering_phi",
            at: s,
        });
    }
    Ok(())
}

/// `φ(s) = ξ_K(s−1)/ξ_K(s)`, computed from log-magnitudes so that neither
/// factor over- or underflows at large `|Im s|`.
pub fn scattering_phi(ctx: &FieldContext, s: Complex64) -> Result<Complex64> {
    check_phi_domain(s)?;
    let den = log_completed_xi(ctx, s)?;
    if !den.is_finite() {
        return Err(Error::Pole {
            function: "scattering_phi",
            at: s,
        });
    }
    Ok((log_completed_xi(ctx, s - 1.0)? - den).exp())
}

/// `φ(s) = (2π/√|d_K|)·ζ_K(s−1)/((s−1) ζ_K(s))`.
pub fn scattering_phi_explicit(ctx: &FieldContext, s: Complex64) -> Result<Complex64> {
    check_phi_domain(s)?;
    let den = dedekind_zeta(ctx, s)?.value;
    if den == c(0.0) {
        return Err(Error::Pole {
            function: "scattering_phi",
            at: s,
        });
    }
    let num = dedekind_zeta(ctx, s - 1.0)?.value;
    Ok(2.0 * PI / ctx.sqrt_abs_disc() * num / ((s - 1.0) * den))
}

/// `φ′/φ(s) = −1/(s−1) + ζ_K′/ζ_K(s−1) − ζ_K′/ζ_K(s)`.
pub fn phi_log_derivative(ctx: &FieldContext, s: Complex64) -> Result<Complex64> {
    check_phi_domain(s)?;
    Ok(-1.0 / (s - 1.0) + dedekind_log_derivative(ctx, s - 1.0)?
        - dedekind_log_derivative(ctx, s)?)
}

/// Residue of `E(p, s)` at `s = 2`: `1/(|O^×| ξ_K(2))`.
pub fn pole_residue(ctx: &FieldContext) -> Result<f64> {
    let xi2 = log_completed_xi(ctx, c(2.0))?.exp().re;
    Ok(1.0 / (ctx.unit_count() as f64 * xi2))
}

/// One unit orbit `{εn}` of Fourier indices.
#[derive(Debug, Clone)]
struct Orbit {
    /// index into the table of distinct norms
    norm_index: usize,
    /// `2|n|^{s−1}σ_{1−s}(n)/ξ_K(s)` times `exp(−π|t|/2)` (Bessel scale)
    coeff: Complex64,
    /// `2π·n*` for each member of the orbit
    duals: Vec<Complex64>,
}

type BesselRow = Arc<OnceLock<Arc<Vec<Complex64>>>>;

/// Fourier-expansion evaluator of `E(·, s)` on heights `y ∈ [lo, hi]`.
///
/// Built once per `s`; evaluations are pure. Scaled Bessel values are
/// memoised per height, so quadratures on a tensor grid reuse each row.
pub struct EisensteinEvaluator {
    ctx: FieldContext,
    sp: SpectralParam,
    s: Complex64,
    y_range: (f64, f64),
    eps: f64,
    phi: Complex64,
    norms: Vec<i64>,
    orbits: Vec<Orbit>,
    trunc_norm: i64,
    /// largest Bessel argument kept
    x_stop: f64,
    bessel_cache: Mutex<HashMap<u64, BesselRow>>,
}

impl std::fmt::Debug for EisensteinEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EisensteinEvaluator")
            .field("d", &self.ctx.d())
            .field("s", &self.s)
            .field("y_range", &self.y_range)
            .field("eps", &self.eps)
            .field("trunc_norm", &self.trunc_norm)
            .field("orbits", &self.orbits.len())
            .finish()
    }
}

/// Default absolute accuracy of Fourier evaluations.
pub const DEFAULT_EPS: f64 = 1e-9;

impl EisensteinEvaluator {
    pub fn new(ctx: &FieldContext, sp: SpectralParam, y_range: (f64, f64), eps: f64) -> Result<Self> {
        Self::with_radius_scale(ctx, sp, y_range, eps, 1.0)
    }

    /// As [`new`](Self::new), with the minimum truncation radius in the
    /// Bessel argument multiplied by `scale` (used for cross-checks).
    pub fn with_radius_scale(
        ctx: &FieldContext,
        sp: SpectralParam,
        y_range: (f64, f64),
        eps: f64,
        scale: f64,
    ) -> Result<Self> {
        let (lo, hi) = y_range;
        if !(lo > 0.0) || hi < lo || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("bad height range {y_range:?}")));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let s = sp.s();
        let phi = scattering_phi(ctx, s)?;
        let log_xi = log_completed_xi(ctx, s)?;
        let log_pref = -log_xi - PI * sp.t.abs() / 2.0;
        let nu = s - 1.0;
        let xfac = 4.0 * PI * lo / ctx.sqrt_abs_disc();
        let units = ctx.unit_count() as f64;

        // grow the orbit list in Bessel-argument bands of width 1 until two
        // bands past the turning region contribute less than eps/100
        let x_min = scale * (sp.t.abs() + 5.0 + 2.0 * sp.t.abs().cbrt());
        let mut bound = (((x_min + 10.0) / xfac).powi(2).ceil() as i64).max(4);
        let (reps, x_stop) = loop {
            let reps = ctx.enumerate_up_to_units(bound);
            let mut band = -1i64;
            let mut band_sum = 0.0;
            let mut quiet = 0;
            let mut stop = None;
            let mut k_memo: HashMap<i64, f64> = HashMap::new();
            for (i, n) in reps.iter().enumerate() {
                let nn = ctx.norm(*n);
                let x = xfac * (nn as f64).sqrt();
                let b = x.floor() as i64;
                if b != band {
                    if band >= 0 && (band as f64) >= x_min {
                        if band_sum < 1e-2 * eps {
                            quiet += 1;
                            if quiet == 2 {
                                stop = Some((i, band as f64 + 1.0));
                                break;
                            }
                        } else {
                            quiet = 0;
                        }
                    }
                    band = b;
                    band_sum = 0.0;
                }
                let k = *k_memo
                    .entry(nn)
                    .or_insert_with(|| k_scaled(nu, x).norm());
                let coeff = orbit_coeff(ctx, *n, s, log_pref)?;
                band_sum += lo * units * coeff.norm() * k;
            }
            match stop {
                Some((i, xs)) => {
                    let mut reps = reps;
                    reps.truncate(i);
                    break (reps, xs);
                }
                None => bound *= 2,
            }
        };

        let mut norms: Vec<i64> = reps.iter().map(|&n| ctx.norm(n)).collect();
        norms.dedup();
        let trunc_norm = norms.last().copied().unwrap_or(0);
        let orbits = reps
            .iter()
            .map(|&n| {
                let nn = ctx.norm(n);
                let norm_index = norms.binary_search(&nn).expect("norm listed");
                let duals = ctx
                    .units()
                    .iter()
                    .map(|&u| 2.0 * PI * ctx.dual_vector(ctx.mul(u, n)))
                    .collect();
                Ok(Orbit {
                    norm_index,
                    coeff: orbit_coeff(ctx, n, s, log_pref)?,
                    duals,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(EisensteinEvaluator {
            ctx: ctx.clone(),
            sp,
            s,
            y_range,
            eps,
            phi,
            norms,
            orbits,
            trunc_norm,
            x_stop,
            bessel_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn param(&self) -> &SpectralParam {
        &self.sp
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn phi(&self) -> Complex64 {
        self.phi
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    /// Largest `N(n)` kept in the expansion.
    pub fn trunc_norm(&self) -> i64 {
        self.trunc_norm
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    fn check_height(&self, y: f64) -> Result<()> {
        let (lo, hi) = self.y_range;
        if y < lo || y > hi {
            return Err(Error::OutOfGrid { y, lo, hi });
        }
        Ok(())
    }

    /// Scaled `K_{s−1}(4π√N y/√|d_K|)` for every retained norm `N`, zero
    /// past the certified cut-off.
    fn bessel_row(&self, y: f64) -> Arc<Vec<Complex64>> {
        let cell = {
            let mut cache = self.bessel_cache.lock().expect("Bessel cache poisoned");
            cache.entry(y.to_bits()).or_default().clone()
        };
        cell.get_or_init(|| {
            let xfac = 4.0 * PI * y / self.ctx.sqrt_abs_disc();
            let nu = self.s - 1.0;
            Arc::new(
                self.norms
                    .iter()
                    .map(|&nn| {
                        let x = xfac * (nn as f64).sqrt();
                        if x > self.x_stop {
                            c(0.0)
                        } else {
                            k_scaled(nu, x)
                        }
                    })
                    .collect(),
            )
        })
        .clone()
    }

    /// Fills the Bessel cache for the given heights in parallel.
    pub fn prefetch(&self, ys: &[f64]) {
        let mut ys: Vec<f64> = ys
            .iter()
            .copied()
            .filter(|&y| y >= self.y_range.0 && y <= self.y_range.1)
            .collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        ys.par_iter().for_each(|&y| {
            self.bessel_row(y);
        });
    }

    /// The constant term `y^s + φ(s) y^{2−s}`.
    pub fn constant_term(&self, y: f64) -> Complex64 {
        let ly = y.ln();
        (self.s * ly).exp() + self.phi * ((2.0 - self.s) * ly).exp()
    }

    /// `E(p, s)`.
    pub fn eval(&self, p: &PointH3) -> Result<Complex64> {
        self.check_height(p.y)?;
        let row = self.bessel_row(p.y);
        let z = p.z();
        let mut terms: Vec<Complex64> = Vec::with_capacity(self.orbits.len());
        for o in &self.orbits {
            let k = row[o.norm_index];
            if k == c(0.0) {
                continue;
            }
            let phase: Complex64 = o
                .duals
                .iter()
                .map(|mu| Complex64::from_polar(1.0, mu.re * z.re + mu.im * z.im))
                .sum();
            terms.push(o.coeff * k * phase);
        }
        let re: Vec<f64> = terms.iter().map(|v| v.re).collect();
        let im: Vec<f64> = terms.iter().map(|v| v.im).collect();
        let fourier = Complex64::new(pairwise_sum(&re), pairwise_sum(&im));
        Ok(self.constant_term(p.y) + p.y * fourier)
    }
}

fn orbit_coeff(ctx: &FieldContext, n: AlgInt, s: Complex64, log_pref: Complex64) -> Result<Complex64> {
    let ln_norm = (ctx.norm(n) as f64).ln();
    let sigma = ctx.divisor_sum(n, 1.0 - s)?;
    Ok(2.0 * sigma * ((s - 1.0) * 0.5 * ln_norm + log_pref).exp())
}

/// `E(p, s)` through a prepared evaluator.
pub fn eisenstein_eval(ev: &EisensteinEvaluator, p: &PointH3) -> Result<Complex64> {
    ev.eval(p)
}

/// A truncated coset sum with the analytic tail that was added back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosetSum {
    pub value: Complex64,
    pub tail: Complex64,
    pub norm_bound: i64,
}

/// Inner cut-off scale for the `d`-sums: `χ = 1` for `|cz+d|² + N(c)y² ≤ R`.
const COSET_R0: f64 = 1000.0;

/// `1` on `(−∞, 0]`, `0` on `[1, ∞)`, smooth in between.
fn smooth_cutoff(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        b / (a + b)
    }
}

/// `∫_0^∞ y^s r^{−s} (1 − χ(r/R − 1)) dr`, the part of `Σ_d` removed by the
/// cut-off, per unit lattice density.
fn cutoff_tail(s: Complex64, y: f64, r: f64) -> Result<Complex64> {
    let ys = (s * y.ln()).exp();
    let f = |u: f64| {
        let rr = r * (1.0 + u);
        ys * (-s * rr.ln()).exp() * (1.0 - smooth_cutoff(u)) * r
    };
    let q = adaptive(f, &[0.0, 0.5, 1.0], 0.0, 1e-12, 2000);
    if !q.converged {
        return Err(Error::NoConvergence { delta: q.abserr });
    }
    let beyond = ys * ((1.0 - s) * (2.0 * r).ln()).exp() / (s - 1.0);
    Ok(q.value + beyond)
}

/// `E(p, s) = Σ_{Γ_∞\Γ} y(γp)^s` summed directly for `Re s > 2`.
///
/// Cosets are bottom rows `(c, d)` coprime, modulo units; `c` runs over unit
/// orbit representatives with `N(c) ≤ norm_bound`, `d` over all of `O` with
/// a smooth cut-off in `|cz+d|²`. Both truncations are closed with their
/// mean-density tails: `Φ(c)/(N(c)|F|)` per unit area for the `d`-sum, and
/// `ζ_K(s−1)/ζ_K(s) − Σ_{N(c) ≤ B} Φ(c)N(c)^{−s}` for the `c`-sum.
pub fn coset_sum_eval(ctx: &FieldContext, p: &PointH3, s: Complex64, norm_bound: i64) -> Result<CosetSum> {
    if !(s.re > 2.0) {
        return Err(Error::InvalidArgument(format!(
            "the coset sum converges absolutely only for Re s > 2, got s = {s}"
        )));
    }
    let y = p.y;
    let identity = (s * y.ln()).exp();
    if norm_bound <= 0 {
        return Ok(CosetSum {
            value: identity,
            tail: c(0.0),
            norm_bound: 0,
        });
    }
    let area = ctx.lattice_covolume();
    let z = p.z();
    let reps = ctx.enumerate_up_to_units(norm_bound);
    let per_c = reps
        .par_iter()
        .map(|&cc| -> Result<(Complex64, Complex64, f64)> {
            let nc = ctx.norm(cc) as f64;
            let phi = ctx.euler_phi(cc)? as f64;
            let floor = nc * y * y;
            let r = COSET_R0.max(2.0 * floor);
            let cz = ctx.to_complex(cc) * z;
            let primes: Vec<_> = ctx.factor(cc)?.into_iter().map(|(q, _)| q).collect();
            let coprime = |d: AlgInt| {
                let nd = ctx.norm(d) as u64;
                !primes
                    .iter()
                    .any(|q| nd.is_multiple_of(q.norm) && ctx.divides(q.generator, d))
            };
            let mut terms = Vec::new();
            for d in ctx.elements_in_disc(-cz, (2.0 * r - floor).max(0.0).sqrt()) {
                let den = (cz + ctx.to_complex(d)).norm_sqr() + floor;
                let w = smooth_cutoff(den / r - 1.0);
                if w == 0.0 || !coprime(d) {
                    continue;
                }
                let v = if s.im == 0.0 {
                    c((y / den).powf(s.re))
                } else {
                    (s * (y / den).ln()).exp()
                };
                terms.push(w * v);
            }
            let re: Vec<f64> = terms.iter().map(|v| v.re).collect();
            let im: Vec<f64> = terms.iter().map(|v| v.im).collect();
            let head = Complex64::new(pairwise_sum(&re), pairwise_sum(&im));
            let d_tail = phi / nc * PI / area * cutoff_tail(s, y, r)?;
            Ok((head, d_tail, phi))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut head = c(0.0);
    let mut d_tail = c(0.0);
    let mut mean_density = c(0.0);
    for (&cc, (h, t, phi)) in reps.iter().zip(&per_c) {
        head += h;
        d_tail += t;
        let nc = ctx.norm(cc) as f64;
        mean_density += phi * (-s * nc.ln()).exp();
    }
    let ratio = dedekind_zeta(ctx, s - 1.0)?.value / dedekind_zeta(ctx, s)?.value;
    let c_tail = PI * ((2.0 - s) * y.ln()).exp() / (area * (s - 1.0)) * (ratio - mean_density);
    Ok(CosetSum {
        value: identity + head + d_tail + c_tail,
        tail: d_tail + c_tail,
        norm_bound,
    })
}

/// Doubles the norm bound from `start` until two successive coset sums agree
/// to `tol`; returns the last value.
pub fn coset_sum_certified(
    ctx: &FieldContext,
    p: &PointH3,
    s: Complex64,
    start: i64,
    tol: f64,
    max_bound: i64,
) -> Result<CosetSum> {
    let mut bound = start.max(1);
    let mut prev = coset_sum_eval(ctx, p, s, bound)?;
    let mut delta = f64::INFINITY;
    while bound < max_bound {
        bound *= 2;
        let cur = coset_sum_eval(ctx, p, s, bound)?;
        delta = (cur.value - prev.value).norm();
        if delta < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence { delta })
}

/// `Σ_{Γ_∞\Γ} h(y(γp))` for compactly supported `h`: a finite sum, since
/// `y(γp) ≥ lo` forces `N(c) ≤ 1/(lo·y)` and `|cz+d|² ≤ y/lo`.
pub fn incomplete_eisenstein(ctx: &FieldContext, h: &TestFunction, p: &PointH3) -> Result<f64> {
    let (lo, _) = h.compact_interval()?;
    let y = p.y;
    let z = p.z();
    let mut total = h.eval(y);
    let bound = (1.0 / (lo * y)).floor() as i64;
    let mut vals = Vec::new();
    for cc in ctx.enumerate_up_to_units(bound) {
        let nc = ctx.norm(cc) as f64;
        let cz = ctx.to_complex(cc) * z;
        let radius = (y / lo - nc * y * y).max(0.0).sqrt();
        for d in ctx.elements_in_disc(-cz, radius) {
            if !ctx.coprime(cc, d) {
                continue;
            }
            let yy = y / ((cz + ctx.to_complex(d)).norm_sqr() + nc * y * y);
            vals.push(h.eval(yy));
        }
    }
    total += pairwise_sum(&vals);
    Ok(total)
}

/// `E(p, 2 − ρ)` at `ρ = 1/2 + iγ`, whose squared modulus is the density of
/// the residue measure attached to `ρ`.
pub fn residue_measure_eval(ctx: &FieldContext, zero: &CriticalZero, p: &PointH3) -> Result<Complex64> {
    let sp = SpectralParam::new(1.5, -zero.gamma, "residue")?;
    let ev = EisensteinEvaluator::new(ctx, sp, (p.y, p.y), DEFAULT_EPS)?;
    ev.eval(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CLASS_NUMBER_ONE;
    use crate::lfunctions::{completed_xi, ZeroSource};
    use crate::special::quad::GaussLegendre;

    fn gaussian() -> FieldContext {
        FieldContext::new(-1).unwrap()
    }

    fn pt(x1: f64, x2: f64, y: f64) -> PointH3 {
        PointH3::new(x1, x2, y).unwrap()
    }

    #[test]
    fn phi_unitarity_and_formulas_agree() {
        for d in CLASS_NUMBER_ONE {
            let ctx = FieldContext::new(d).unwrap();
            let s = Complex64::new(1.3, 9.0);
            let prod = scattering_phi(&ctx, s).unwrap() * scattering_phi(&ctx, 2.0 - s).unwrap();
            assert!((prod - 1.0).norm() < 1e-10, "D={d}: {prod}");
            let a = scattering_phi(&ctx, s).unwrap();
            let b = scattering_phi_explicit(&ctx, s).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm(), "D={d}");
            let on_line = scattering_phi(&ctx, Complex64::new(1.0, 5.0)).unwrap();
            assert!((on_line.norm() - 1.0).abs() < 1e-10);
        }
        let ctx = gaussian();
        let xi2 = completed_xi(&ctx, c(2.0)).unwrap().value;
        let xi3 = completed_xi(&ctx, c(3.0)).unwrap().value;
        assert!((scattering_phi(&ctx, c(3.0)).unwrap() - xi2 / xi3).norm() < 1e-12);
        assert!(matches!(scattering_phi(&ctx, c(2.0)), Err(Error::Pole { .. })));
        assert!(matches!(scattering_phi(&ctx, c(1.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn phi_log_derivative_checks() {
        let ctx = gaussian();
        let s = Complex64::new(1.5, 3.0);
        let h = 1e-4;
        let lp = |z: Complex64| scattering_phi(&ctx, z).unwrap().ln();
        let fd = (lp(s + h) - lp(s - h)) / (2.0 * h);
        let v = phi_log_derivative(&ctx, s).unwrap();
        assert!((fd - v).norm() < 1e-6, "{fd} vs {v}");
        let w = phi_log_derivative(&ctx, s.conj()).unwrap();
        assert!((w.conj() - v).norm() < 1e-10);
        let sym = phi_log_derivative(&ctx, Complex64::new(1.1, 40.0)).unwrap()
            + phi_log_derivative(&ctx, Complex64::new(1.1, -40.0)).unwrap();
        assert!(sym.im.abs() < 1e-8);
        // mpmath, 30 digits
        assert!((sym.re - -10.143_202_306_927_49).abs() < 1e-8, "{sym}");
    }

    #[test]
    fn periodic_and_conjugate_symmetric() {
        let ctx = FieldContext::new(-3).unwrap();
        let sp = SpectralParam::new(1.2, 7.0, "test").unwrap();
        let ev = EisensteinEvaluator::new(&ctx, sp, (0.8, 2.0), 1e-10).unwrap();
        let p = pt(0.13, -0.31, 0.9);
        let e = ev.eval(&p).unwrap();
        for lam in ctx.elements_up_to_norm(3) {
            let l = ctx.to_complex(lam);
            let q = pt(p.x1 + l.re, p.x2 + l.im, p.y);
            assert!((ev.eval(&q).unwrap() - e).norm() < 1e-10);
        }
        let sp = SpectralParam::new(1.2, -7.0, "test").unwrap();
        let evc = EisensteinEvaluator::new(&ctx, sp, (0.8, 2.0), 1e-10).unwrap();
        assert!((evc.eval(&p).unwrap() - e.conj()).norm() < 1e-10);
        assert!(matches!(ev.eval(&pt(0.0, 0.0, 3.0)), Err(Error::OutOfGrid { .. })));
    }

    #[test]
    fn fourier_matches_coset_sum_gaussian() {
        let ctx = gaussian();
        let sp = SpectralParam::new(3.0, 0.0, "oracle").unwrap();
        let ev = EisensteinEvaluator::new(&ctx, sp, (0.5, 2.0), 1e-10).unwrap();
        for p in [pt(0.0, 0.0, 1.0), pt(0.3, 0.2, 1.1), pt(-0.4, 0.45, 0.7)] {
            let f = ev.eval(&p).unwrap();
            let o = coset_sum_certified(&ctx, &p, c(3.0), 200, 1e-8, 6400).unwrap();
            assert!((f - o.value).norm() < 1e-6, "{p:?}: {f} vs {}", o.value);
        }
        let bare = coset_sum_eval(&ctx, &pt(0.1, 0.1, 1.3), c(3.0), 0).unwrap();
        assert!((bare.value - 1.3f64.powi(3)).norm() < 1e-13);
        assert!(coset_sum_eval(&ctx, &pt(0.0, 0.0, 1.0), c(2.0), 10).is_err());
    }

    #[test]
    fn coset_sum_is_automorphic() {
        let ctx = gaussian();
        let p = pt(0.3, 0.2, 1.1);
        let q = crate::hyperbolic::apply_isometry(&ctx, &crate::hyperbolic::Mat2::INVERSION, &p).unwrap();
        let a = coset_sum_eval(&ctx, &p, c(3.0), 800).unwrap().value;
        let b = coset_sum_eval(&ctx, &q, c(3.0), 800).unwrap().value;
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn constant_term_extraction() {
        let ctx = FieldContext::new(-2).unwrap();
        let sp = SpectralParam::new(2.4, 0.0, "test").unwrap();
        let ev = EisensteinEvaluator::new(&ctx, sp, (1.7, 1.7), 1e-12).unwrap();
        let gl = GaussLegendre::new(24);
        let tau = ctx.tau();
        let mut acc = c(0.0);
        for (a, wa) in gl.on_interval(0.0, 1.0) {
            for (b, wb) in gl.on_interval(0.0, 1.0) {
                let z = Complex64::new(a, 0.0) + tau * b;
                acc += wa * wb * ev.eval(&pt(z.re, z.im, 1.7)).unwrap();
            }
        }
        let expect = ev.constant_term(1.7);
        assert!((acc - expect).norm() < 1e-10 * expect.norm(), "{acc} vs {expect}");
    }

    #[test]
    fn incomplete_series_examples() {
        let ctx = gaussian();
        let h = TestFunction::bump("b", 2.0, 3.0);
        assert_eq!(incomplete_eisenstein(&ctx, &h, &pt(0.1, 0.2, 1.0)).unwrap(), 0.0);
        let v = incomplete_eisenstein(&ctx, &h, &pt(0.0, 0.0, 2.5)).unwrap();
        assert!((v - h.eval(2.5)).abs() < 1e-15);
        assert!(incomplete_eisenstein(&ctx, &TestFunction::exp_decay(), &pt(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn residue_measure_conjugation() {
        let ctx = gaussian();
        let z = CriticalZero {
            gamma: 14.134725141734695,
            source: ZeroSource::RiemannFactor,
            bracket: (14.13, 14.14),
        };
        let zc = CriticalZero { gamma: -z.gamma, ..z };
        let p = pt(0.1, 0.2, 1.5);
        let a = residue_measure_eval(&ctx, &z, &p).unwrap();
        let b = residue_measure_eval(&ctx, &zc, &p).unwrap();
        assert!(a.norm() > 1e-3 && a.is_finite());
        assert!((a - b.conj()).norm() < 1e-10);
    }
}
