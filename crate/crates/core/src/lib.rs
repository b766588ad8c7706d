//! Eisenstein series, scattering matrices and Dedekind zeta functions for the
//! Bianchi groups `PSL₂(O_K)` of the nine imaginary quadratic fields of class
//! number one, together with a harness that tests the equidistribution
//! ("quantum limit") behaviour of `|E(p, s)|² dμ` numerically.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eisenstein;
pub mod error;
pub mod field;
pub mod hyperbolic;
pub mod lfunctions;
pub mod que;
pub mod special;
pub mod testfn;

pub use error::{Error, Result};
pub use field::{AlgInt, FieldContext};
