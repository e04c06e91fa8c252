//! Coefficients of the `1/N^2` expansion: the index families `J_n`, the
//! interpolating families `x^T`, the operators `L_l`, exact coefficients of
//! polynomial observables, map counts and the pairing oracles.

mod alpha;
mod fit;
mod genus;
mod jfamily;
mod lop;
mod times;

pub use alpha::{alpha_polynomial, alpha_series, merged_integrand, AlphaReport, QuadConfig};
pub use fit::{alpha_fit_mc, fit_expansion, ExpansionFit, McFitReport, Observation, MAX_CONDITION};
pub use genus::{colored_word, finite_n_expectation, genus_oracle, map_count, map_table, GenusTable, MapCount, QuadSummary, MAX_ORACLE_LETTERS};
pub use jfamily::{build_j, c_level, depth, depth_in, depth_table, Cell, IndexList, JFamily, DEFAULT_MAX_LEVEL, HARD_MAX_LEVEL};
pub use lop::{apply_full_l, apply_l, apply_l_fpoly, j_letter, split_letter, LParams};
pub use times::{xt_binding, xt_covariance, xt_index, xt_semis, TimeVector};
