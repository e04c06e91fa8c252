//! Noncommutative polynomial algebra, free semicircular moments and the
//! topological expansion of GUE traces.
//!
//! The crate is organised bottom-up:
//!
//! * [`ncalg`]: exact polynomials in the letters `X_i`, `Y_j`, derivatives
//!   and tensor actions.
//! * [`ncexp`]: words with exponential atoms `e^{i s y P}` carrying
//!   integration parameters, and chains of derivatives.
//! * [`freemoments`]: non-crossing pairing sums and mixed traces with
//!   deterministic matrices.
//! * [`expansion`]: index families, the `L` operator, the coefficients
//!   `alpha_k` and the genus oracle.
//! * [`rmt`]: GUE sampling and Monte Carlo estimators.
//! * [`verify`]: the self-check suites.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeff;
pub mod error;
pub mod expansion;
pub mod freemoments;
pub mod ncalg;
pub mod ncexp;
pub mod quadrature;
pub mod rmt;
pub mod verify;

pub use coeff::Coeff;
pub use error::{Error, Result};
pub use ncalg::{Letter, LetterKind, NcPolynomial, TensorPoly, Word};
