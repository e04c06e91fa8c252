//! GUE sampling, evaluation on matrices, Monte Carlo estimators and the
//! matrix-side experiments.

mod eval;
mod experiments;
mod linalg;
mod mc;
mod sample;
mod spectral;

pub use eval::{binding_dim, eval_polynomial, normalized_trace, MatrixBinding};
pub use experiments::{
    norm_fluctuation_experiment, norm_tail_experiment, spectrum_confinement_experiment, spectrum_reference, Confinement, ConfinementRow,
    FluctuationRow, NormTail, ReferenceKind, SpectrumReference, TailPoint, SURROGATE_SIZE,
};
pub use linalg::{check_hermitian, cmul, exp_i, hermitian_defect, hermitian_eigenvalues, kron, op_norm, spectral_apply, symmetrize, trace_of_product, CMatrix};
pub use mc::{
    bind_family, covariance_identity_check, jackknife_covariance, jackknife_mean, mc_trace, mc_trace_values, sd_matrix_residual, ComplexEstimate,
    CovarianceCheck, McEstimate, SdMatrixResidual,
};
pub use sample::{gue_matrix, sample_gue, sample_gue_family, stream, stream_seed, GueConfig};
pub use spectral::{h_bump, h_step, SpectralFunctionSpec};

#[cfg(test)]
mod tests;
