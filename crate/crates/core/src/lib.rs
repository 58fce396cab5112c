//! Simulation and verification toolkit for collision-model open quantum
//! dynamics: spin-chain Hamiltonians coupled to a stream of fresh ancillas,
//! the induced quantum channels, dynamical-symmetry verification, stochastic
//! trajectories with random free-evolution windows, and oscillation spectra
//! of the resulting time series.
//!
//! All numerics are generic over the floating-point [`Scalar`]; the aliases
//! at the crate root pin the common double-precision instantiation.

pub mod channels;
pub mod dynamics;
pub mod linalg;
pub mod models;
pub mod scalar;
pub mod spectra;
pub mod symmetry;

pub use scalar::Scalar;

/// Complex scalar over `f64`, the default precision everywhere.
pub type C64 = num_complex::Complex<f64>;

/// Dense complex matrix over `f64`.
pub type ComplexMatrix = linalg::Matrix<f64>;

/// Dense complex matrix over `f32`.
pub type ComplexMatrix32 = linalg::Matrix<f32>;

/// Hermitian eigendecomposition over `f64`.
pub type HermitianEigen = linalg::HermitianEigen<f64>;
