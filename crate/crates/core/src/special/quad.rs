//! Quadrature rules: fixed Gauss–Legendre and globally adaptive
//! Gauss–Kronrod (21 points) for complex-valued integrands.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared, cached rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// weights of the embedded 10-point Gauss rule, on XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub abserr: f64,
    /// Estimate of `∫|f|`, the natural scale for absolute tolerances.
    pub l1: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    l1: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut l1 = fc.norm() * WGK[10];
    let mut vals = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for (j, v) in vals.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += (f1 + f2) * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        *v = (f1, f2);
    }
    // QUADPACK-style error scaling
    let mean = kron * 0.5;
    let mut asc = (fc - mean).norm() * WGK[10];
    for (j, (f1, f2)) in vals.iter().enumerate() {
        asc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let hab = h.abs();
    let resasc = asc * hab;
    let resabs = l1 * hab;
    let mut err = ((kron - gauss) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        a,
        b,
        value: kron * h,
        err,
        l1: resabs,
    }
}

/// Globally adaptive integration over consecutive panels `[p₀,p₁], [p₁,p₂], …`.
/// Bisects the panel with the largest error estimate until the total error
/// drops below `max(epsabs, epsrel·|I|)` or `limit` panels are in use.
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    breakpoints: &[f64],
    epsabs: f64,
    epsrel: f64,
    limit: usize,
) -> QuadResult {
    assert!(breakpoints.len() >= 2);
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[0] != w[1] {
            heap.push(gk21(&f, w[0], w[1]));
        }
    }
    loop {
        let (value, err, l1) = heap.iter().fold(
            (Complex64::new(0.0, 0.0), 0.0, 0.0),
            |(v, e, l), p| (v + p.value, e + p.err, l + p.l1),
        );
        // never ask for more than the rounding level of ∫|f|
        let tol = epsabs.max(epsrel * value.norm()).max(100.0 * f64::EPSILON * l1);
        if err <= tol || heap.len() >= limit || heap.is_empty() {
            return QuadResult {
                value,
                abserr: err,
                l1,
                converged: err <= tol,
            };
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel can no longer be split in floating point
            let mut frozen = worst;
            frozen.err = 0.0;
            heap.push(frozen);
            continue;
        }
        heap.push(gk21(&f, worst.a, mid));
        heap.push(gk21(&f, mid, worst.b));
    }
}

/// [`adaptive`] for a real integrand, failing when the tolerance is not met.
pub fn adaptive_real<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    epsabs: f64,
    epsrel: f64,
) -> Result<(f64, f64)> {
    let r = adaptive(|x| Complex64::new(f(x), 0.0), breakpoints, epsabs, epsrel, 2000);
    if r.converged {
        Ok((r.value.re, r.abserr))
    } else {
        Err(Error::NoConvergence { delta: r.abserr })
    }
}

/// `∫_a^∞ f` through `x = a + u/(1−u)`, `u ∈ [0, 1)`.
pub fn adaptive_half_line<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    epsabs: f64,
    epsrel: f64,
    limit: usize,
) -> QuadResult {
    let g = |u: f64| {
        if u >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let one_m = 1.0 - u;
        let x = a + u / one_m;
        let v = f(x) / (one_m * one_m);
        if v.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    adaptive(g, &[0.0, 0.5, 0.9, 1.0], epsabs, epsrel, limit)
}
