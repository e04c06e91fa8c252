//! Moments of semicircular systems: non-crossing pairing sums, mixed traces
//! with deterministic matrices and the Schwinger-Dyson residual.

mod moments;
mod pairings;
mod trace;

pub(crate) use moments::normalized_trace_of_product;
pub use moments::{kreweras_trace, mixed_trace, wick_moment, CovarianceSpec, MixedItem, Scalar, SemiLetter, MAX_MIXED_LETTERS};
pub use pairings::{catalan, enumerate_nc_pairings, for_each_pairing, semicircle_moment, Pairing, MAX_PAIRING_POINTS};
pub use trace::{sd_residual, trace_of_polynomial, ExactFreeTrace, FreeBinding, TraceFunctional};
