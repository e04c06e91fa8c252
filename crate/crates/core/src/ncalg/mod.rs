//! Exact noncommutative polynomials in the letters `X_1..X_d` (self-adjoint)
//! and `Y_1..Y_{2r}` (with `Y_i* = Y_{i+r}`).

mod deriv;
mod letter;
mod parse;
mod poly;

pub use deriv::{cyclic_derivative, cyclic_derivative_where, derivative_where, nc_derivative, tensor_apply, TensorAction};
pub use letter::{Letter, LetterKind, Word};
pub use parse::{parse_polynomial, Alphabet};
pub use poly::{NcPolynomial, TensorPoly};
