//! Spectra of fourth-order operators `∂⁴ + 2∂p∂ + q` and Euler-Bernoulli beams on `[0, 1]`.

#![allow(
    clippy::excessive_precision,
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::suspicious_arithmetic_impl
)]

pub mod acceptance;
pub mod asymptotics;
pub mod coefficients;
pub mod determinant;
pub mod error;
pub mod inverse;
pub mod jet;
pub mod ode;
pub mod oracle;
pub mod perturbation;
pub mod quad;
pub mod spectrum;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
