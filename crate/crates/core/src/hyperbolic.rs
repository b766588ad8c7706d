//! Upper half-space `H³ = {(z, y) : z ∈ C, y > 0}`, the action of
//! `PSL₂(O)`, reduction to the Ford fundamental domain and quadrature of the
//! invariant measure `dμ = dx₁ dx₂ dy / y³` over boxes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eisenstein::EisensteinEvaluator;
use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldContext};
use crate::special::quad::GaussLegendre;

/// A point `z + jy` of upper half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointH3 {
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
}

impl PointH3 {
    pub fn new(x1: f64, x2: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x1.is_finite() || !x2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "({x1}, {x2}, {y}) is not a point of upper half-space"
            )));
        }
        Ok(PointH3 { x1, x2, y })
    }

    pub fn from_z(z: Complex64, y: f64) -> Result<Self> {
        PointH3::new(z.re, z.im, y)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }
}

/// A 2×2 matrix over `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: AlgInt,
    pub b: AlgInt,
    pub c: AlgInt,
    pub d: AlgInt,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: AlgInt::ONE,
        b: AlgInt::ZERO,
        c: AlgInt::ZERO,
        d: AlgInt::ONE,
    };

    /// `(0, −1; 1, 0)`.
    pub const INVERSION: Mat2 = Mat2 {
        a: AlgInt::ZERO,
        b: AlgInt::new(-1, 0),
        c: AlgInt::ONE,
        d: AlgInt::ZERO,
    };

    pub fn new(a: AlgInt, b: AlgInt, c: AlgInt, d: AlgInt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn translation(lambda: AlgInt) -> Self {
        Mat2 {
            b: lambda,
            ..Mat2::IDENTITY
        }
    }

    pub fn det(&self, ctx: &FieldContext) -> AlgInt {
        ctx.sub(ctx.mul(self.a, self.d), ctx.mul(self.b, self.c))
    }

    pub fn mul(&self, ctx: &FieldContext, o: &Mat2) -> Mat2 {
        let m = |x, y| ctx.mul(x, y);
        Mat2 {
            a: ctx.add(m(self.a, o.a), m(self.b, o.c)),
            b: ctx.add(m(self.a, o.b), m(self.b, o.d)),
            c: ctx.add(m(self.c, o.a), m(self.d, o.c)),
            d: ctx.add(m(self.c, o.b), m(self.d, o.d)),
        }
    }

    /// Whether the matrix is `±1` (the identity of `PSL₂`).
    pub fn is_identity(&self) -> bool {
        let neg = Mat2 {
            a: AlgInt::new(-1, 0),
            d: AlgInt::new(-1, 0),
            ..Mat2::IDENTITY
        };
        *self == Mat2::IDENTITY || *self == neg
    }
}

/// Height of `γp` for `γ` with bottom row `(c, d)`.
pub fn image_height(ctx: &FieldContext, c: AlgInt, d: AlgInt, p: &PointH3) -> f64 {
    let w = ctx.to_complex(c) * p.z() + ctx.to_complex(d);
    p.y / (w.norm_sqr() + ctx.norm(c) as f64 * p.y * p.y)
}

/// The Poincaré extension of the Möbius action of a unimodular `g`.
pub fn apply_isometry(ctx: &FieldContext, g: &Mat2, p: &PointH3) -> Result<PointH3> {
    if g.det(ctx) != AlgInt::ONE {
        return Err(Error::InvalidArgument(format!(
            "matrix {g:?} has determinant {:?}, not 1",
            g.det(ctx)
        )));
    }
    let (a, b, c, d) = (
        ctx.to_complex(g.a),
        ctx.to_complex(g.b),
        ctx.to_complex(g.c),
        ctx.to_complex(g.d),
    );
    let z = p.z();
    let y2 = p.y * p.y;
    let czd = c * z + d;
    let den = czd.norm_sqr() + c.norm_sqr() * y2;
    let num = (a * z + b) * czd.conj() + a * c.conj() * y2;
    PointH3::from_z(num / den, p.y / den)
}

/// Iteration cap for [`reduce_to_fundamental`].
pub const REDUCTION_CAP: usize = 1000;

/// Among bottom rows `(c, d)` with `c ≠ 0` coprime and `N(c) ≤ bound`, the
/// one that lifts `p` highest, provided it beats the current height.
fn best_lift(ctx: &FieldContext, p: &PointH3, bound: i64) -> Option<(AlgInt, AlgInt, f64)> {
    let z = p.z();
    let y2 = p.y * p.y;
    let mut best: Option<(AlgInt, AlgInt, f64)> = None;
    let mut best_den = 1.0 - 1e-13;
    for c in ctx.enumerate_up_to_units(bound) {
        let nc = ctx.norm(c) as f64;
        let floor = nc * y2;
        if floor >= best_den {
            continue;
        }
        let cz = ctx.to_complex(c) * z;
        let radius = (best_den - floor).sqrt();
        for d in ctx.elements_in_disc(-cz, radius) {
            let den = (cz + ctx.to_complex(d)).norm_sqr() + floor;
            if den < best_den && ctx.coprime(c, d) {
                best_den = den;
                best = Some((c, d, p.y / den));
            }
        }
    }
    best
}

/// Moves `p` to its highest `Γ`-translate, with `z` in the lattice cell.
/// Returns the reduced point and the matrix `γ` with `γp` equal to it.
///
/// Lifts are searched over `c` in growing norm shells; any lift is taken as
/// soon as one is found, and the point is final once the whole range
/// `N(c) y² < 1` (necessary for `|cz+d|² + N(c)y² < 1`) comes up empty.
pub fn reduce_to_fundamental(ctx: &FieldContext, p: &PointH3) -> Result<(PointH3, Mat2)> {
    let mut gamma = Mat2::IDENTITY;
    let mut cur = *p;
    let mut bound = 4i64;
    for _ in 0..REDUCTION_CAP {
        let (_, lambda) = ctx.reduce_mod_lattice(cur.z());
        let shift = Mat2::translation(ctx.neg(lambda));
        cur = apply_isometry(ctx, &shift, &cur)?;
        gamma = shift.mul(ctx, &gamma);
        let full = (1.0 / (cur.y * cur.y)).floor().min(i64::MAX as f64 / 2.0) as i64;
        let limit = bound.min(full);
        match best_lift(ctx, &cur, limit) {
            None if limit >= full => return Ok((cur, gamma)),
            None => bound *= 4,
            Some((c, d, _)) => {
                bound = 4;
                let (a, b) = ctx
                    .complete_bottom_row(c, d)
                    .expect("coprime bottom row completes");
                // a d − b c = 1 for the matrix (a, b; c, d)
                let g = Mat2::new(a, b, c, d);
                cur = apply_isometry(ctx, &g, &cur)?;
                gamma = g.mul(ctx, &gamma);
            }
        }
    }
    Err(Error::ReductionCap(REDUCTION_CAP))
}

/// Height of the floor of the Ford domain above `z`: `h(z)² = max (1 − |cz+d|²)/N(c)`.
pub fn floor_height_sq(ctx: &FieldContext, z: Complex64) -> f64 {
    let mut best = 0.0f64;
    let mut bound = 1i64;
    let mut processed = 0i64;
    // widen the norm range until no larger c can beat the current floor
    loop {
        for c in ctx.enumerate_up_to_units(bound) {
            let nc = ctx.norm(c);
            if nc <= processed {
                continue;
            }
            let ncf = nc as f64;
            if 1.0 / ncf <= best {
                continue;
            }
            let cz = ctx.to_complex(c) * z;
            let radius = (1.0 - best * ncf).max(0.0).sqrt();
            for d in ctx.elements_in_disc(-cz, radius) {
                let v = (1.0 - (cz + ctx.to_complex(d)).norm_sqr()) / ncf;
                best = best.max(v);
            }
        }
        processed = bound;
        if best > 0.0 && 1.0 / (bound as f64) <= best {
            return best;
        }
        bound *= 2;
    }
}

/// `vol(Γ\H³)` by quadrature of `(1/|O^×|)∫_cell dz / h(z)²` on a composite
/// Gauss–Legendre grid with `panels × panels` cells of `order²` nodes.
pub fn fundamental_volume(ctx: &FieldContext, panels: usize, order: usize) -> f64 {
    let gl = GaussLegendre::cached(order);
    let tau = ctx.tau();
    // cell {α + βτ : α, β ∈ [0, 1)}; area element Im τ dα dβ
    let pts: Vec<(f64, f64)> = (0..panels)
        .flat_map(|i| {
            let lo = i as f64 / panels as f64;
            let hi = (i + 1) as f64 / panels as f64;
            gl.on_interval(lo, hi).collect::<Vec<_>>()
        })
        .collect();
    let rows: Vec<f64> = pts
        .par_iter()
        .map(|&(beta, wb)| {
            pts.iter()
                .map(|&(alpha, wa)| {
                    let z = Complex64::new(alpha, 0.0) + tau * beta;
                    wa * wb / floor_height_sq(ctx, z)
                })
                .sum()
        })
        .collect();
    let integral: f64 = rows.iter().sum::<f64>() * tau.im;
    integral / ctx.unit_count() as f64
}

/// A coordinate box in `H³` with per-axis base node counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x1_range: (f64, f64),
    pub x2_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nodes: [usize; 3],
    #[serde(default)]
    pub inside_certificate: bool,
}

impl Region {
    pub fn new(x1: (f64, f64), x2: (f64, f64), y: (f64, f64), nodes: [usize; 3]) -> Result<Self> {
        if !(y.0 > 0.0) || y.1 < y.0 || x1.1 < x1.0 || x2.1 < x2.0 {
            return Err(Error::InvalidArgument(format!(
                "malformed region {x1:?} × {x2:?} × {y:?}"
            )));
        }
        if nodes.contains(&0) {
            return Err(Error::InvalidArgument("node counts must be positive".into()));
        }
        Ok(Region {
            x1_range: x1,
            x2_range: x2,
            y_range: y,
            nodes,
            inside_certificate: false,
        })
    }

    /// The default box `A = [0, 1/4]² × [1, 3/2]`.
    pub fn default_a() -> Self {
        Region::new((0.0, 0.25), (0.0, 0.25), (1.0, 1.5), [6, 6, 8]).expect("valid box")
    }

    /// The default box `B = [0, 1/4]² × [3/2, 9/4]`.
    pub fn default_b() -> Self {
        Region::new((0.0, 0.25), (0.0, 0.25), (1.5, 2.25), [6, 6, 8]).expect("valid box")
    }

    /// Hyperbolic volume `μ(A)` in closed form.
    pub fn volume(&self) -> f64 {
        let (y0, y1) = self.y_range;
        (self.x1_range.1 - self.x1_range.0)
            * (self.x2_range.1 - self.x2_range.0)
            * 0.5
            * (1.0 / (y0 * y0) - 1.0 / (y1 * y1))
    }

    fn corners_in_cell(&self, ctx: &FieldContext) -> bool {
        let inside = |x1: f64, x2: f64| {
            let z = Complex64::new(x1, x2);
            let beta = z.im / ctx.tau().im;
            let alpha = z.re - beta * ctx.tau().re;
            (-0.5..=0.5).contains(&alpha) && (-0.5..=0.5).contains(&beta)
        };
        [self.x1_range.0, self.x1_range.1]
            .iter()
            .all(|&a| [self.x2_range.0, self.x2_range.1].iter().all(|&b| inside(a, b)))
    }

    /// Sets the certificate after checking that the box lies in the reduced
    /// fundamental domain: every quadrature node (at every refinement level)
    /// must be fixed by [`reduce_to_fundamental`]. Boxes with `y ≥ 1` above
    /// a convex cell region pass by the hemisphere bound `N(c) y² ≥ 1`.
    pub fn certify(mut self, ctx: &FieldContext) -> Result<Self> {
        if !self.corners_in_cell(ctx) {
            return Err(Error::UncertifiedRegion);
        }
        if self.y_range.0 < 1.0 {
            for level in 0..=MAX_DOUBLINGS {
                let nodes = self.nodes.map(|n| n << level);
                for p in self.grid(nodes) {
                    let (q, _) = reduce_to_fundamental(ctx, &p.0)?;
                    let moved = q.y > p.0.y * (1.0 + 1e-12) || (q.z() - p.0.z()).norm() > 1e-12;
                    if moved {
                        return Err(Error::UncertifiedRegion);
                    }
                }
            }
        }
        self.inside_certificate = true;
        Ok(self)
    }

    /// Tensor grid of points with their `dμ` weights.
    pub fn grid(&self, nodes: [usize; 3]) -> Vec<(PointH3, f64)> {
        let g1 = GaussLegendre::cached(nodes[0]);
        let g2 = GaussLegendre::cached(nodes[1]);
        let gy = inverse_cube_rule(self.y_range.0, self.y_range.1, nodes[2]);
        let mut out = Vec::with_capacity(nodes.iter().product());
        for (y, wy) in gy.iter().copied() {
            for (x1, w1) in g1.on_interval(self.x1_range.0, self.x1_range.1) {
                for (x2, w2) in g2.on_interval(self.x2_range.0, self.x2_range.1) {
                    out.push((PointH3 { x1, x2, y }, w1 * w2 * wy));
                }
            }
        }
        out
    }
}

/// Node-doubling cap of [`integrate_measure`].
pub const MAX_DOUBLINGS: u32 = 3;
const REFINE_TOL: f64 = 1e-5;

/// A quadrature value with the relative change of the last refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureIntegral {
    pub value: f64,
    pub delta: f64,
}

/// Pairwise summation, fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

fn integrate_on_grid<F>(region: &Region, nodes: [usize; 3], f: &F) -> Result<f64>
where
    F: Fn(&PointH3) -> Result<f64> + Sync,
{
    let grid = region.grid(nodes);
    let vals: Result<Vec<f64>> = grid.par_iter().map(|(p, w)| Ok(w * f(p)?)).collect();
    Ok(pairwise_sum(&vals?))
}

/// `∫_A f dμ` by tensor quadrature (Gauss–Legendre in `x₁, x₂`, Gauss rule for
/// the weight `y⁻³` in `y`), doubling the nodes until the relative change is
/// below `10⁻⁵`.
pub fn integrate_measure<F>(region: &Region, f: F) -> Result<MeasureIntegral>
where
    F: Fn(&PointH3) -> Result<f64> + Sync,
{
    integrate_measure_prepared(region, |_| {}, f)
}

/// As [`integrate_measure`], calling `prepare` with the height nodes of each
/// refinement level before the level is evaluated.
pub fn integrate_measure_prepared<P, F>(region: &Region, prepare: P, f: F) -> Result<MeasureIntegral>
where
    P: Fn(&[f64]),
    F: Fn(&PointH3) -> Result<f64> + Sync,
{
    if region.volume() == 0.0 {
        return Ok(MeasureIntegral {
            value: 0.0,
            delta: 0.0,
        });
    }
    let level = |nodes: [usize; 3]| -> Result<f64> {
        let ys: Vec<f64> = inverse_cube_rule(region.y_range.0, region.y_range.1, nodes[2])
            .iter()
            .map(|&(y, _)| y)
            .collect();
        prepare(&ys);
        integrate_on_grid(region, nodes, &f)
    };
    let mut nodes = region.nodes;
    let mut prev = level(nodes)?;
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        nodes = nodes.map(|n| 2 * n);
        let cur = level(nodes)?;
        delta = if cur == prev {
            0.0
        } else {
            (cur - prev).abs() / cur.abs().max(prev.abs())
        };
        prev = cur;
        if delta < REFINE_TOL {
            return Ok(MeasureIntegral { value: cur, delta });
        }
    }
    Err(Error::NoConvergence { delta })
}

/// `μ_s(A) = ∫_A |E(p, s)|² dμ` for a certified box.
pub fn mu_measure(region: &Region, ev: &EisensteinEvaluator) -> Result<MeasureIntegral> {
    if !region.inside_certificate {
        return Err(Error::UncertifiedRegion);
    }
    integrate_measure_prepared(region, |ys| ev.prefetch(ys), |p| Ok(ev.eval(p)?.norm_sqr()))
}

/// Gauss rule for `∫_a^b g(y) y⁻³ dy`: exact for polynomials of degree `2n−1`.
pub fn inverse_cube_rule(a: f64, b: f64, n: usize) -> Arc<Vec<(f64, f64)>> {
    type Key = (u64, u64, usize);
    type Rule = Arc<Vec<(f64, f64)>>;
    static CACHE: OnceLock<Mutex<HashMap<Key, Rule>>> = OnceLock::new();
    let key = (a.to_bits(), b.to_bits(), n);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&key) {
        return r.clone();
    }
    let rule = Arc::new(build_weighted_rule(a, b, n, |y| y.powi(-3)));
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, rule.clone());
    rule
}

/// Gauss rule for a smooth positive weight: Stieltjes recurrence on a fine
/// discretisation of the weight, then the Golub–Welsch eigenproblem.
fn build_weighted_rule(a: f64, b: f64, n: usize, w: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    if a == b {
        return vec![(a, 0.0); n];
    }
    let m = (4 * n).max(200);
    let gl = GaussLegendre::new(m);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    // work in t ∈ [−1, 1] for conditioning
    let (xs, ws): (Vec<f64>, Vec<f64>) = gl
        .nodes
        .iter()
        .zip(&gl.weights)
        .map(|(&t, &wt)| (t, wt * h * w(c + h * t)))
        .unzip();
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut p_prev = vec![0.0; m];
    let mut p = vec![1.0; m];
    let mut norm_prev = 1.0;
    for k in 0..n {
        let norm: f64 = (0..m).map(|i| ws[i] * p[i] * p[i]).sum();
        alpha[k] = (0..m).map(|i| ws[i] * xs[i] * p[i] * p[i]).sum::<f64>() / norm;
        beta[k] = if k == 0 { norm } else { norm / norm_prev };
        let next: Vec<f64> = (0..m)
            .map(|i| (xs[i] - alpha[k]) * p[i] - if k == 0 { 0.0 } else { beta[k] * p_prev[i] })
            .collect();
        p_prev = std::mem::replace(&mut p, next);
        norm_prev = norm;
    }
    let mut diag = alpha.clone();
    let mut off: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { beta[k].sqrt() }).collect();
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    tridiagonal_eigen(&mut diag, &mut off, &mut z);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| (c + h * diag[k], beta[0] * z[0][k] * z[0][k]))
        .collect();
    rule.sort_by(|x, y| x.0.total_cmp(&y.0));
    rule
}

/// Implicit QL for a symmetric tridiagonal matrix; `e[i]` couples `i−1, i`.
/// On return `d` holds eigenvalues and column `k` of `z` the `k`-th eigenvector.
fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal eigen solver did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
