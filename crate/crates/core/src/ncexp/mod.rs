//! The extended algebra of words in letters and exponential atoms
//! `e^{i s y P}`, its parameter-indexed derivatives and their evaluation.

mod deriv;
mod eval;
mod expr;
mod parse;
mod scalar;

pub(crate) use deriv::word_derivative;
pub(crate) use expr::map_fword;
pub use deriv::{boxtimes_contract, compose_chain, param_cyclic_derivative, param_derivative, ChainResult, ChainStep, LetterMap, Selector};
pub use eval::{duhamel_residual, evaluate_numeric, evaluate_tensor, integrate_params};
pub use expr::{ExpAtom, FAtom, FExpression, FPoly, FWord, MultiTensor, TensorFExpr};
pub use parse::parse_fexpression;
pub use scalar::{ParamName, ParamSupply, ScalarExpr, Symbol};

#[cfg(test)]
mod tests;
