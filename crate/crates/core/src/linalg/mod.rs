//! Dense complex linear algebra: matrix arithmetic, Kronecker products,
//! Hermitian eigendecomposition, unitary propagators, vectorization, and
//! null-space solvers. Everything downstream builds on this module.

mod eig;
mod matrix;
mod solve;

pub use eig::{expm, expm_i, hermitian_eig, propagator_from_eigen, spectral_norm, HermitianEigen};
pub use matrix::{apply_matrix_triple, dagger, devectorize, hs_inner, kron, vectorize, Matrix};
pub use solve::{fixed_point_null_space, null_space, LuDecomp};

/// Errors from the linear-algebra kernels.
#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (relative asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue iteration for index {index} did not converge within {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },

    #[error("numerical rank is ambiguous: pivot {pivot:e} falls in the undecidable decade below threshold {threshold:e}")]
    NumericalRankAmbiguity { pivot: f64, threshold: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("map has no fixed point; input is not a valid trace-preserving superoperator")]
    NoFixedPoint,
}
