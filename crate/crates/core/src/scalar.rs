use num_traits::{Float, FloatConst, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar underlying every numerical kernel in this crate.
///
/// All matrix, channel, and trajectory code is generic over `Scalar`, so the
/// same algorithms run in single or double precision. Concrete aliases for the
/// common double-precision instantiation live at the crate root.
///
/// Default tolerances are *anchored per type*: a threshold that is generous at
/// `f64` precision (say `1e-10`) is unreachable at `f32`, so each
/// implementation declares its own defaults rather than sharing one constant.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Relative Hermiticity tolerance used as a precondition for
    /// eigendecomposition and Hermitian-only observables.
    fn hermiticity_tol() -> Self;

    /// Relative pivot threshold separating "numerically zero" from "nonzero"
    /// pivots during rank determination.
    fn rank_tol() -> Self;

    /// Default residual below which a state is accepted as stationary under a
    /// channel.
    fn fix_tol() -> Self;

    /// Magnitude below which an operator or mode is treated as identically
    /// zero (guards against normalizing by ~0).
    fn zero_tol() -> Self;

    /// Allowed drift of the trace of an evolving density matrix before the
    /// integrator reports an error.
    fn drift_tol() -> Self;

    /// Allowed spurious imaginary part when a real expectation value is
    /// extracted from a Hermitian observable.
    fn imag_tol() -> Self;

    /// Allowed deviation of a Kraus set from exact trace preservation.
    fn tp_tol() -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    fn hermiticity_tol() -> Self {
        1e-10
    }
    fn rank_tol() -> Self {
        1e-9
    }
    fn fix_tol() -> Self {
        1e-8
    }
    fn zero_tol() -> Self {
        1e-14
    }
    fn drift_tol() -> Self {
        1e-8
    }
    fn imag_tol() -> Self {
        1e-10
    }
    fn tp_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn hermiticity_tol() -> Self {
        1e-4
    }
    fn rank_tol() -> Self {
        1e-4
    }
    fn fix_tol() -> Self {
        1e-3
    }
    fn zero_tol() -> Self {
        1e-6
    }
    fn drift_tol() -> Self {
        1e-3
    }
    fn imag_tol() -> Self {
        1e-4
    }
    fn tp_tol() -> Self {
        1e-4
    }
}
