// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference values in tests are quoted with all published digits
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analysis;
pub mod error;
pub mod gates;
pub mod ode;
pub mod quadrature;
pub mod root;
pub mod shooting;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};
pub use specfun::DimensionParams;
