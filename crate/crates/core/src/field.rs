//! Arithmetic in the ring of integers `O` of the nine imaginary quadratic
//! fields of class number one.
//!
//! Elements are stored in the integral basis `(1, ω)` with
//! `ω = (d_K + √d_K)/2`. Every ideal is principal, so ideal divisors are
//! represented by a generator and enumerated up to units.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunctions;

/// The square-free `D < 0` with `Q(√D)` of class number one.
pub const CLASS_NUMBER_ONE: [i64; 9] = [-1, -2, -3, -7, -11, -19, -43, -67, -163];

/// An element `a + b·ω` of `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgInt {
    pub a: i64,
    pub b: i64,
}

impl AlgInt {
    pub const ZERO: AlgInt = AlgInt { a: 0, b: 0 };
    pub const ONE: AlgInt = AlgInt { a: 1, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        AlgInt { a, b }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// A nonzero prime ideal, stored by a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub generator: AlgInt,
    pub norm: u64,
}

/// Immutable per-field data shared by every computation.
#[derive(Debug, Clone)]
pub struct FieldContext {
    d: i64,
    disc: i64,
    omega: Complex64,
    tau: Complex64,
    units: Vec<AlgInt>,
    zeta_k_2: f64,
}

impl FieldContext {
    pub fn new(d: i64) -> Result<Self> {
        if !CLASS_NUMBER_ONE.contains(&d) {
            return Err(Error::UnsupportedField(d));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let sqrt_abs = (disc.unsigned_abs() as f64).sqrt();
        let omega = Complex64::new(disc as f64 / 2.0, sqrt_abs / 2.0);
        let tau = if disc % 2 == 0 {
            Complex64::new(0.0, sqrt_abs / 2.0)
        } else {
            Complex64::new(0.5, sqrt_abs / 2.0)
        };
        let zeta_k_2 = lfunctions::dedekind_zeta_raw(disc, Complex64::new(2.0, 0.0)).re;
        let mut ctx = FieldContext {
            d,
            disc,
            omega,
            tau,
            units: Vec::new(),
            zeta_k_2,
        };
        let mut units: Vec<AlgInt> = ctx.elements_up_to_norm(1);
        units.sort();
        ctx.units = units;
        Ok(ctx)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// The discriminant `d_K`.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn abs_disc(&self) -> f64 {
        self.disc.unsigned_abs() as f64
    }

    pub fn sqrt_abs_disc(&self) -> f64 {
        self.abs_disc().sqrt()
    }

    /// `ω = (d_K + √d_K)/2`.
    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// Second vector of the reduced basis `(1, τ)` used for the fundamental cell.
    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn units(&self) -> &[AlgInt] {
        &self.units
    }

    /// `|O^×|`.
    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    /// Area of a fundamental parallelogram of `O ⊂ C`, `√|d_K|/2`.
    pub fn lattice_covolume(&self) -> f64 {
        self.sqrt_abs_disc() / 2.0
    }

    /// Area of a fundamental domain for the stabiliser of `∞` acting on `C`:
    /// the lattice cell divided by the `|O^×|/2` unit rotations `z ↦ ε²z`.
    pub fn cusp_section_area(&self) -> f64 {
        2.0 * self.lattice_covolume() / self.unit_count() as f64
    }

    pub fn zeta_k_2(&self) -> f64 {
        self.zeta_k_2
    }

    /// `vol(PSL₂(O)\H³) = |d_K|^{3/2} ζ_K(2) / (4π²)`.
    pub fn manifold_volume(&self) -> f64 {
        self.abs_disc().powf(1.5) * self.zeta_k_2 / (4.0 * PI * PI)
    }

    pub fn to_complex(&self, n: AlgInt) -> Complex64 {
        n.a as f64 + self.omega * n.b as f64
    }

    pub fn norm(&self, n: AlgInt) -> i64 {
        let d = self.disc;
        n.a * n.a + n.a * n.b * d + n.b * n.b * ((d * d - d) / 4)
    }

    pub fn conj(&self, n: AlgInt) -> AlgInt {
        AlgInt::new(n.a + n.b * self.disc, -n.b)
    }

    pub fn add(&self, x: AlgInt, y: AlgInt) -> AlgInt {
        AlgInt::new(x.a + y.a, x.b + y.b)
    }

    pub fn sub(&self, x: AlgInt, y: AlgInt) -> AlgInt {
        AlgInt::new(x.a - y.a, x.b - y.b)
    }

    pub fn neg(&self, x: AlgInt) -> AlgInt {
        AlgInt::new(-x.a, -x.b)
    }

    pub fn mul(&self, x: AlgInt, y: AlgInt) -> AlgInt {
        let d = self.disc;
        let c = (d * d - d) / 4;
        AlgInt::new(
            x.a * y.a - x.b * y.b * c,
            x.a * y.b + x.b * y.a + x.b * y.b * d,
        )
    }

    /// Exact quotient `x / y` if it lies in `O`.
    pub fn div_exact(&self, x: AlgInt, y: AlgInt) -> Option<AlgInt> {
        let n = self.norm(y);
        if n == 0 {
            return None;
        }
        let p = self.mul(x, self.conj(y));
        if p.a % n == 0 && p.b % n == 0 {
            Some(AlgInt::new(p.a / n, p.b / n))
        } else {
            None
        }
    }

    pub fn divides(&self, y: AlgInt, x: AlgInt) -> bool {
        self.div_exact(x, y).is_some()
    }

    pub fn is_unit(&self, x: AlgInt) -> bool {
        self.norm(x) == 1
    }

    /// Nearest element of `O` to a complex number (up to the reduced-cell convention).
    pub fn nearest(&self, z: Complex64) -> AlgInt {
        let (_, lambda) = self.reduce_mod_lattice(z);
        lambda
    }

    /// Writes `z = w + λ` with `λ ∈ O` and `w` in the cell
    /// `{α + βτ : α, β ∈ [−1/2, 1/2)}`.
    pub fn reduce_mod_lattice(&self, z: Complex64) -> (Complex64, AlgInt) {
        let beta = z.im / self.tau.im;
        let alpha = z.re - beta * self.tau.re;
        let kb = (beta + 0.5).floor();
        let ka = (alpha + 0.5).floor();
        let lambda = self.from_tau_coords(ka as i64, kb as i64);
        (z - self.to_complex(lambda), lambda)
    }

    /// The element `a + b·τ` in `(1, ω)` coordinates.
    pub fn from_tau_coords(&self, a: i64, b: i64) -> AlgInt {
        // τ = ω − m with m = (d_K − [d_K odd]) / 2
        let m = if self.disc % 2 == 0 {
            self.disc / 2
        } else {
            (self.disc - 1) / 2
        };
        AlgInt::new(a - b * m, b)
    }

    /// Every element with `0 < N(n) ≤ bound`, in no particular order.
    pub fn elements_up_to_norm(&self, bound: i64) -> Vec<AlgInt> {
        let mut out = Vec::new();
        if bound <= 0 {
            return out;
        }
        let absd = self.disc.unsigned_abs() as f64;
        let bmax = (4.0 * bound as f64 / absd).sqrt().floor() as i64 + 1;
        for b in -bmax..=bmax {
            let centre = -(b as f64) * self.disc as f64 / 2.0;
            let rem = bound as f64 - (b * b) as f64 * absd / 4.0;
            if rem < -1.0 {
                continue;
            }
            let r = rem.max(0.0).sqrt() + 1.0;
            let lo = (centre - r).floor() as i64;
            let hi = (centre + r).ceil() as i64;
            for a in lo..=hi {
                let n = AlgInt::new(a, b);
                let nn = self.norm(n);
                if nn > 0 && nn <= bound {
                    out.push(n);
                }
            }
        }
        out
    }

    /// Every element (including 0) with `|n − centre| < radius`.
    pub fn elements_in_disc(&self, centre: Complex64, radius: f64) -> Vec<AlgInt> {
        let mut out = Vec::new();
        if radius <= 0.0 {
            return out;
        }
        let im_w = self.omega.im;
        let b_lo = ((centre.im - radius) / im_w).ceil() as i64;
        let b_hi = ((centre.im + radius) / im_w).floor() as i64;
        let r2 = radius * radius;
        for b in b_lo..=b_hi {
            let dy = b as f64 * im_w - centre.im;
            let rem = r2 - dy * dy;
            if rem < 0.0 {
                continue;
            }
            let half = rem.sqrt();
            let shift = centre.re - b as f64 * self.omega.re;
            let a_lo = (shift - half).ceil() as i64;
            let a_hi = (shift + half).floor() as i64;
            for a in a_lo..=a_hi {
                let n = AlgInt::new(a, b);
                if (self.to_complex(n) - centre).norm_sqr() < r2 {
                    out.push(n);
                }
            }
        }
        out
    }

    /// `|(O/cO)^×|`, Euler's function for the ideal `(c)`.
    pub fn euler_phi(&self, c: AlgInt) -> Result<u64> {
        let mut phi = self.norm(c) as u64;
        for (prime, _) in self.factor(c)? {
            phi = phi / prime.norm * (prime.norm - 1);
        }
        Ok(phi)
    }

    /// The orbit representative: smallest `(a, b)` among `{εn : ε ∈ O^×}`.
    pub fn canonical(&self, n: AlgInt) -> AlgInt {
        self.units
            .iter()
            .map(|&u| self.mul(u, n))
            .min()
            .unwrap_or(n)
    }

    /// One representative per unit orbit of nonzero elements with
    /// `N(n) ≤ norm_bound`, ordered by `(norm, a, b)`.
    pub fn enumerate_up_to_units(&self, norm_bound: i64) -> Vec<AlgInt> {
        let mut reps: Vec<AlgInt> = self
            .elements_up_to_norm(norm_bound)
            .into_iter()
            .filter(|&n| self.canonical(n) == n)
            .collect();
        reps.sort_by_key(|&n| (self.norm(n), n.a, n.b));
        reps
    }

    /// Kronecker symbol `(d_K / n)`, the character of `Q(√D)/Q`.
    pub fn chi(&self, n: i64) -> i32 {
        kronecker(self.disc, n)
    }

    /// A generator of norm `p` for a split or ramified rational prime `p`.
    fn element_of_norm(&self, p: i64) -> Option<AlgInt> {
        let absd = self.disc.abs();
        let bmax = ((4 * p) as f64 / absd as f64).sqrt().floor() as i64 + 1;
        for b in 0..=bmax {
            // N(a + bω) = p  ⇔  a = (−bd ± √(b²d + 4p)) / 2
            let disc = b * b * self.disc + 4 * p;
            if disc < 0 {
                continue;
            }
            let r = isqrt(disc);
            if r * r != disc {
                continue;
            }
            for sign in [1, -1] {
                let num = -b * self.disc + sign * r;
                if num % 2 == 0 {
                    let cand = AlgInt::new(num / 2, b);
                    if self.norm(cand) == p {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }

    /// The prime ideals above a rational prime `p`.
    pub fn primes_above(&self, p: i64) -> Vec<PrimeIdeal> {
        match kronecker(self.disc, p) {
            -1 => vec![PrimeIdeal {
                generator: AlgInt::new(p, 0),
                norm: (p * p) as u64,
            }],
            0 => {
                let g = self.element_of_norm(p).expect("ramified prime has a generator");
                vec![PrimeIdeal {
                    generator: g,
                    norm: p as u64,
                }]
            }
            _ => {
                let g = self.element_of_norm(p).expect("split prime has a generator");
                vec![
                    PrimeIdeal {
                        generator: g,
                        norm: p as u64,
                    },
                    PrimeIdeal {
                        generator: self.conj(g),
                        norm: p as u64,
                    },
                ]
            }
        }
    }

    /// Prime ideal factorisation of `(n)`.
    pub fn factor(&self, n: AlgInt) -> Result<Vec<(PrimeIdeal, u32)>> {
        if n.is_zero() {
            return Err(Error::InvalidArgument("cannot factor 0".into()));
        }
        let mut out = Vec::new();
        let mut rest = n;
        for (p, _) in factor_u64(self.norm(n) as u64) {
            for prime in self.primes_above(p as i64) {
                let mut e = 0;
                while let Some(q) = self.div_exact(rest, prime.generator) {
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    out.push((prime, e));
                }
            }
        }
        debug_assert!(self.is_unit(rest));
        Ok(out)
    }

    /// `σ_s(n) = Σ_{(δ) | (n)} |δ|^{2s}`, each ideal divisor counted once.
    pub fn divisor_sum(&self, n: AlgInt, s: Complex64) -> Result<Complex64> {
        let mut total = Complex64::new(1.0, 0.0);
        for (prime, e) in self.factor(n)? {
            let q = (s * (prime.norm as f64).ln()).exp();
            let mut local = Complex64::new(1.0, 0.0);
            let mut pw = Complex64::new(1.0, 0.0);
            for _ in 0..e {
                pw *= q;
                local += pw;
            }
            total *= local;
        }
        Ok(total)
    }

    /// The character `z ↦ exp(2πi⟨2n̄/√d_K, z⟩)`, with `⟨·,·⟩` the Euclidean
    /// inner product of the plane. Trivial on `O`-translations.
    pub fn dual_pairing_phase(&self, n: AlgInt, z: Complex64) -> Complex64 {
        let mu = self.dual_vector(n);
        let arg = 2.0 * PI * (mu.re * z.re + mu.im * z.im);
        Complex64::from_polar(1.0, arg)
    }

    /// `2n̄/√d_K`, the dual-lattice vector attached to `n`.
    pub fn dual_vector(&self, n: AlgInt) -> Complex64 {
        let sqrt_d = Complex64::new(0.0, self.sqrt_abs_disc());
        2.0 * self.to_complex(n).conj() / sqrt_d
    }

    /// Whether the ideals `(c)` and `(d)` are coprime.
    pub fn coprime(&self, c: AlgInt, d: AlgInt) -> bool {
        if c.is_zero() {
            return self.is_unit(d);
        }
        if d.is_zero() {
            return self.is_unit(c);
        }
        let g = gcd_u64(self.norm(c) as u64, self.norm(d) as u64);
        if g == 1 {
            return true;
        }
        for (p, _) in factor_u64(g) {
            for prime in self.primes_above(p as i64) {
                if self.divides(prime.generator, c) && self.divides(prime.generator, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Finds `(a, b)` with `a·d − b·c = 1` for a coprime pair `(c, d)`.
    pub fn complete_bottom_row(&self, c: AlgInt, d: AlgInt) -> Option<(AlgInt, AlgInt)> {
        if c.is_zero() {
            // d is a unit: a = d⁻¹, b = 0
            let inv = self.div_exact(AlgInt::ONE, d)?;
            return Some((inv, AlgInt::ZERO));
        }
        // a·d ≡ 1 (mod c), a running over a complete residue system
        for a in self.residues_mod(c) {
            let ad1 = self.sub(self.mul(a, d), AlgInt::ONE);
            if let Some(b) = self.div_exact(ad1, c) {
                return Some((a, b));
            }
        }
        None
    }

    /// A complete residue system of `O/cO` from the Hermite normal form of
    /// the lattice `cO` in `(1, ω)` coordinates.
    pub fn residues_mod(&self, c: AlgInt) -> Vec<AlgInt> {
        let v1 = c;
        let v2 = self.mul(c, AlgInt::new(0, 1));
        let (g, _, _) = ext_gcd(v1.b, v2.b);
        let g = g.abs();
        // generator of the sublattice with vanishing ω-coordinate
        let e = (v2.b / g) * v1.a - (v1.b / g) * v2.a;
        let h_a = e.abs();
        let h_b = g;
        debug_assert_eq!(h_a * h_b, self.norm(c));
        let mut out = Vec::with_capacity((h_a * h_b) as usize);
        for y in 0..h_b {
            for x in 0..h_a {
                out.push(AlgInt::new(x, y));
            }
        }
        out
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Kronecker symbol `(d / n)` for `n ≥ 1`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    assert!(n >= 0, "kronecker symbol needs n ≥ 0");
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        match d.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    if n == 1 {
        return result;
    }
    result * jacobi(d.rem_euclid(n), n)
}

fn jacobi(mut a: i64, mut n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut result = 1;
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Trial-division factorisation of a rational integer.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
