//! Test functions `h` on the positive half-line, used for incomplete
//! Eisenstein series and Mellin transforms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `h` behaves near the endpoints of `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    /// `h` vanishes outside `[lo, hi]`, `0 < lo < hi < ∞`.
    Compact { lo: f64, hi: f64 },
    /// `h(y) = O(y^order_at_zero)` as `y → 0` and decays faster than any
    /// power as `y → ∞`.
    HalfLine { order_at_zero: f64 },
}

/// A smooth test function with a name, so configs can refer to it.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    pub support: Support,
    /// Highest derivative the harness relies on.
    pub smoothness: u32,
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        support: Support,
        smoothness: u32,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            name: name.into(),
            support,
            smoothness,
            h: Arc::new(h),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self.support {
            Support::Compact { lo, hi } if y <= lo || y >= hi => 0.0,
            _ => (self.h)(y),
        }
    }

    /// The support interval, with `∞` as upper end for half-line functions.
    pub fn interval(&self) -> (f64, f64) {
        match self.support {
            Support::Compact { lo, hi } => (lo, hi),
            Support::HalfLine { .. } => (0.0, f64::INFINITY),
        }
    }

    pub fn compact_interval(&self) -> Result<(f64, f64)> {
        match self.support {
            Support::Compact { lo, hi } => Ok((lo, hi)),
            Support::HalfLine { .. } => Err(Error::InvalidArgument(format!(
                "test function {} does not have compact support",
                self.name
            ))),
        }
    }

    /// Smooth bump `exp(1 − 1/(1 − u²))` on `[lo, hi]`, `u` the affine
    /// coordinate mapping the interval to `[−1, 1]`; peak value 1.
    pub fn bump(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        TestFunction::new(name, Support::Compact { lo, hi }, u32::MAX, move |y| {
            let u = (y - c) / r;
            let q = 1.0 - u * u;
            if q <= 0.0 {
                0.0
            } else {
                (1.0 - 1.0 / q).exp()
            }
        })
    }

    /// The same bump in the variable `log y`, on `[lo, hi]`. Its Mellin
    /// transform decays fastest along vertical lines for a given support.
    pub fn log_bump(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        let c = 0.5 * (lo.ln() + hi.ln());
        let r = 0.5 * (hi.ln() - lo.ln());
        TestFunction::new(name, Support::Compact { lo, hi }, u32::MAX, move |y| {
            let u = (y.ln() - c) / r;
            let q = 1.0 - u * u;
            if q <= 0.0 {
                0.0
            } else {
                (1.0 - 1.0 / q).exp()
            }
        })
    }

    /// `h(y) = e^{−y}` on the whole half-line.
    pub fn exp_decay() -> Self {
        TestFunction::new(
            "exp_decay",
            Support::HalfLine { order_at_zero: 0.0 },
            u32::MAX,
            |y| (-y).exp(),
        )
    }

    /// The identically zero function on `[2, 3]`.
    pub fn zero() -> Self {
        TestFunction::new("zero", Support::Compact { lo: 2.0, hi: 3.0 }, u32::MAX, |_| 0.0)
    }

    /// Looks a function up by name in [`registry`].
    pub fn by_name(name: &str) -> Result<Self> {
        registry()
            .into_iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown test function {name}")))
    }
}

/// The built-in test functions.
pub fn registry() -> Vec<TestFunction> {
    vec![
        TestFunction::bump("bump23", 2.0, 3.0),
        TestFunction::bump("bump_wide", 0.5, 4.0),
        TestFunction::log_bump("log_bump", 0.05, 20.0),
        TestFunction::exp_decay(),
        TestFunction::zero(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_a_bump_on_two_three() {
        let h = TestFunction::by_name("bump23").unwrap();
        assert_eq!(h.compact_interval().unwrap(), (2.0, 3.0));
        assert_eq!(h.eval(2.0), 0.0);
        assert_eq!(h.eval(3.5), 0.0);
        assert!((h.eval(2.5) - 1.0).abs() < 1e-15);
        assert!(TestFunction::exp_decay().compact_interval().is_err());
        assert!(TestFunction::by_name("nope").is_err());
    }
}
