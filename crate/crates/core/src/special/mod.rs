//! Special functions and quadrature.

pub mod bessel;
pub mod gamma;
pub mod mellin;
pub mod quad;

pub use bessel::{bessel_k_scaled, ScaledBesselValue};
pub use gamma::{digamma, log_gamma, rgamma};
pub use mellin::mellin_transform;
