//! Verification of the algebraic conditions under which a randomly timed
//! sequence of collisions still produces persistent, phase-coherent
//! oscillations, plus the asymptotic model that predicts them.
//!
//! A mode operator `Ξ` supports persistent oscillations at frequency `λ` when
//! two conditions hold: (i) `[H_S, Ξ] = λ Ξ`, and (ii) every
//! interaction-picture Kraus operator of the collision channel commutes with
//! `Ξ` on the support of the stationary state, `[Ω_I(τ), Ξ] ω = 0` for all
//! collision durations. Together these make `Ξ ω` an eigenoperator of every
//! collision + free-evolution step with unit-modulus eigenvalue
//! `e^{−iλ(τ+θ)}`, so the oscillation survives averaging over random θ.

use crate::channels::{
    ancilla_matrix_element, apply, composite, interaction_picture, ChannelError, CompositeMap,
    KrausChannel,
};
use crate::linalg::{
    hermitian_eig, hs_inner, kron, vectorize, LinalgError, LuDecomp, Matrix,
};
use crate::models::SymmetryOperator;
use crate::scalar::Scalar;
use num_complex::Complex;

/// Default residual threshold for the commutator eigenvalue condition.
pub const DEFAULT_TOL_CONDITION_I: f64 = 1e-10;
/// Default residual threshold for the Kraus commutation condition and the
/// step-evolution check.
pub const DEFAULT_TOL_CONDITION_II: f64 = 1e-8;

/// Errors from symmetry verification and model construction.
#[derive(Debug, thiserror::Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error(transparent)]
    Channel(#[from] ChannelError),

    #[error("mode operator has vanishing norm")]
    ZeroOperator,

    #[error("mode operator annihilates the stationary state")]
    ZeroMode,

    #[error("supplied state is not stationary (residual {residual:e})")]
    StationaryStateMismatch { residual: f64 },

    #[error("step eigenvalues too close to separate (separation {separation:e})")]
    DegenerateEigenvalue { separation: f64 },

    #[error("left and right eigenvectors are nearly orthogonal (overlap {overlap:e})")]
    NonBiorthogonalMode { overlap: f64 },

    #[error("ancilla average of the interaction does not vanish (relative norm {norm:e})")]
    NonvanishingFirstMoment { norm: f64 },
}

fn commutator<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    &(a * b) - &(b * a)
}

fn vec_norm<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Outcome of the commutator eigenvalue check `[H_S, Ξ] = λ Ξ`.
#[derive(Clone, Copy, Debug)]
pub struct ConditionIReport<T> {
    /// Rayleigh estimate `⟨Ξ, [H_S, Ξ]⟩ / ⟨Ξ, Ξ⟩`; real for a genuine mode.
    pub lambda: Complex<T>,
    /// `‖[H_S, Ξ] − λ Ξ‖_F / ‖Ξ‖_F`.
    pub residual: T,
    pub pass: bool,
}

/// Check that `Ξ` is an eigenoperator of the commutator with the system
/// Hamiltonian and extract its frequency.
pub fn check_condition_i<T: Scalar>(
    h_sys: &Matrix<T>,
    xi: &Matrix<T>,
    tol: T,
) -> Result<ConditionIReport<T>, SymmetryError> {
    let norm = xi.frob_norm();
    if norm < T::zero_tol() {
        return Err(SymmetryError::ZeroOperator);
    }
    let comm = commutator(h_sys, xi);
    let norm_sq = hs_inner(xi, xi)?;
    let lambda = hs_inner(xi, &comm)? / norm_sq;
    let residual = (&comm - &xi.scale(lambda)).frob_norm() / norm;
    Ok(ConditionIReport {
        lambda,
        residual,
        pass: residual < tol,
    })
}

/// Outcome of the Kraus commutation check on a grid of collision durations.
#[derive(Clone, Debug)]
pub struct ConditionIIReport<T> {
    /// One `(τ, max-over-Kraus residual)` entry per grid point.
    pub per_tau: Vec<(T, T)>,
    pub max_residual: T,
    pub pass: bool,
}

/// Default collision-duration grid around a base value: quarter, half, base,
/// and double.
pub fn default_tau_grid<T: Scalar>(tau: T) -> [T; 4] {
    let two = T::from_f64(2.0);
    [tau / (two * two), tau / two, tau, tau * two]
}

/// Check that every interaction-picture Kraus operator commutes with `Ξ` on
/// the support of the stationary state, for each collision duration in the
/// grid: `‖[Ω_I(τ), Ξ] ω‖_F / (‖Ξ‖_F ‖ω‖_F)` must stay below `tol`.
///
/// The supplied `ω` must actually be stationary: it has to commute with the
/// free Hamiltonian and be a fixed point of every collision channel in the
/// grid, else `StationaryStateMismatch` is returned.
pub fn check_condition_ii<T, F>(
    channel_for_tau: F,
    h_sys: &Matrix<T>,
    xi: &Matrix<T>,
    omega: &Matrix<T>,
    tau_grid: &[T],
    tol: T,
) -> Result<ConditionIIReport<T>, SymmetryError>
where
    T: Scalar,
    F: Fn(T) -> Result<KrausChannel<T>, ChannelError>,
{
    let xi_norm = xi.frob_norm();
    if xi_norm < T::zero_tol() {
        return Err(SymmetryError::ZeroOperator);
    }
    let free_residual =
        commutator(h_sys, omega).frob_norm() / h_sys.frob_norm().max(T::one());
    if free_residual > T::fix_tol() {
        return Err(SymmetryError::StationaryStateMismatch {
            residual: free_residual.to_f64(),
        });
    }
    let scale = xi_norm * omega.frob_norm();

    let mut per_tau = Vec::with_capacity(tau_grid.len());
    let mut max_residual = T::zero();
    for &tau in tau_grid {
        let channel = channel_for_tau(tau)?;
        let fixed_residual = (&apply(&channel, omega)? - omega).frob_norm();
        if fixed_residual > T::fix_tol() {
            return Err(SymmetryError::StationaryStateMismatch {
                residual: fixed_residual.to_f64(),
            });
        }
        let rotated = interaction_picture(&channel, h_sys)?;
        let mut worst = T::zero();
        for k in &rotated.kraus {
            let r = (&commutator(k, xi) * omega).frob_norm() / scale;
            worst = worst.max(r);
        }
        max_residual = max_residual.max(worst);
        per_tau.push((tau, worst));
    }
    Ok(ConditionIIReport {
        per_tau,
        max_residual,
        pass: max_residual < tol,
    })
}

/// Outcome of the one-step eigenoperator check.
#[derive(Clone, Copy, Debug)]
pub struct EigenEvolutionReport<T> {
    /// The predicted step multiplier `e^{−iλ(τ+θ)}`.
    pub multiplier: Complex<T>,
    /// `‖Λ̃[Ξω] − e^{−iλ(τ+θ)} Ξω‖_F / ‖Ξω‖_F`.
    pub residual: T,
    pub pass: bool,
}

/// Verify that `Ξ ω` is an eigenoperator of one full collision + free step
/// with the unit-modulus eigenvalue predicted by the mode frequency.
pub fn verify_eigen_evolution<T: Scalar>(
    map: &CompositeMap<T>,
    xi: &Matrix<T>,
    lambda: T,
    omega: &Matrix<T>,
    tol: T,
) -> Result<EigenEvolutionReport<T>, SymmetryError> {
    let mode = xi * omega;
    let norm = mode.frob_norm();
    if norm < T::zero_tol() {
        return Err(SymmetryError::ZeroMode);
    }
    let step = map.channel.tau + map.theta;
    let multiplier = Complex::from_polar(T::one(), -(lambda * step));
    let evolved = map.apply_linear(&mode);
    let residual = (&evolved - &mode.scale(multiplier)).frob_norm() / norm;
    Ok(EigenEvolutionReport {
        multiplier,
        residual,
        pass: residual < tol,
    })
}

/// Duplicate each mode operator with its adjoint partner at the opposite
/// frequency; the pair is what makes real observables oscillate.
pub fn with_conjugates<T: Scalar>(modes: &[SymmetryOperator<T>]) -> Vec<SymmetryOperator<T>> {
    let mut out = Vec::with_capacity(modes.len() * 2);
    for m in modes {
        out.push(SymmetryOperator {
            xi: m.xi.clone(),
            lambda_expected: m.lambda_expected,
        });
        out.push(SymmetryOperator {
            xi: m.xi.dagger(),
            lambda_expected: -m.lambda_expected,
        });
    }
    out
}

/// One oscillating component of the long-time state.
#[derive(Clone)]
pub struct AsymptoticMode<T> {
    pub lambda: T,
    /// Right eigenmatrix of the step map, `Ξ ω`.
    pub op: Matrix<T>,
    /// Biorthogonal weight `Tr[ζ† ρ₀]` with `ζ` the matching left
    /// eigenvector, normalized so that `⟨ζ, Ξω⟩ = 1`. This is the coefficient
    /// that actually multiplies the mode at late times.
    pub weight: Complex<T>,
    /// Naive overlap `Tr[(Ξω)† ρ₀]`; reported for comparison but not a valid
    /// expansion coefficient because the step map is not normal.
    pub weight_literal: Complex<T>,
    /// `‖S vec(Ξω) − μ vec(Ξω)‖ / ‖Ξω‖` for the reference step map.
    pub eigen_residual: T,
    /// Residual of the left eigenvector after inverse iteration.
    pub left_residual: T,
}

/// Long-time model of the state: stationary part plus unit-modulus rotating
/// modes, `ρ(t) ≈ ω + Σ_α r_α e^{−iλ_α t} Ξ_α ω`.
#[derive(Clone)]
pub struct AsymptoticModel<T> {
    pub stationary: Matrix<T>,
    pub modes: Vec<AsymptoticMode<T>>,
    /// Duration τ+θ of the reference step the weights were extracted from.
    pub step: T,
}

impl<T: Scalar> AsymptoticModel<T> {
    /// Predicted expectation value of an observable at time `t` (complex;
    /// imaginary part is a numerical diagnostic for Hermitian observables).
    pub fn predict(&self, obs: &Matrix<T>, t: T) -> Complex<T> {
        let mut val = (obs * &self.stationary).trace();
        for m in &self.modes {
            let phase = Complex::from_polar(T::one(), -(m.lambda * t));
            val += m.weight * phase * (obs * &m.op).trace();
        }
        val
    }

    /// Real part of [`AsymptoticModel::predict`].
    pub fn predict_re(&self, obs: &Matrix<T>, t: T) -> T {
        self.predict(obs, t).re
    }
}

/// Build the asymptotic oscillation model for a reference step map.
///
/// For each mode the right eigenmatrix is `Ξ_α ω` with eigenvalue
/// `μ_α = e^{−iλ_α(τ+θ)}`; the matching left eigenvector is found by inverse
/// iteration of the adjoint step matrix with a slightly regularized shift,
/// then normalized biorthogonally. The stationary component always carries
/// weight one because the identity is the left fixed point of a
/// trace-preserving map.
pub fn build_asymptotic_model<T: Scalar>(
    map: &CompositeMap<T>,
    modes: &[SymmetryOperator<T>],
    omega: &Matrix<T>,
    rho0: &Matrix<T>,
) -> Result<AsymptoticModel<T>, SymmetryError> {
    let step = map.channel.tau + map.theta;
    let stat_residual = (&map.apply_linear(omega) - omega).frob_norm();
    if stat_residual > T::fix_tol() {
        return Err(SymmetryError::StationaryStateMismatch {
            residual: stat_residual.to_f64(),
        });
    }

    // All step eigenvalues, stationary included, must be well separated for
    // the single-vector inverse iteration to target the right mode.
    let one = Complex::new(T::one(), T::zero());
    let mut mus = vec![one];
    for m in modes {
        mus.push(Complex::from_polar(T::one(), -(m.lambda_expected * step)));
    }
    for i in 0..mus.len() {
        for j in (i + 1)..mus.len() {
            let sep = (mus[i] - mus[j]).norm();
            if sep < T::fix_tol() {
                return Err(SymmetryError::DegenerateEigenvalue {
                    separation: sep.to_f64(),
                });
            }
        }
    }

    let s = map.superoperator_matrix().matrix;
    let s_dag = s.dagger();
    let d2 = s.rows();
    let rho0_vec = vectorize(rho0);

    let mut out = Vec::with_capacity(modes.len());
    for (idx, m) in modes.iter().enumerate() {
        let op = &m.xi * omega;
        let op_norm = op.frob_norm();
        if op_norm < T::zero_tol() {
            return Err(SymmetryError::ZeroMode);
        }
        let w = vectorize(&op);
        let mu = mus[idx + 1];

        let sw = s.matvec(&w);
        let eigen_residual = {
            let mut acc = T::zero();
            for (a, b) in sw.iter().zip(w.iter()) {
                acc += (*a - mu * *b).norm_sqr();
            }
            acc.sqrt() / op_norm
        };

        // Inverse iteration on (S† − μ̄ I), shift nudged off the exact
        // eigenvalue so the factorization stays regular.
        let shift = mu.conj() * Complex::new(T::one() + T::from_f64(1e-13), T::zero());
        let mut a = s_dag.clone();
        for i in 0..d2 {
            let entry = &mut a[(i, i)];
            *entry -= shift;
        }
        let lu = LuDecomp::new(&a)?;
        let mut z: Vec<Complex<T>> = w.clone();
        let zn = vec_norm(&z);
        for zi in z.iter_mut() {
            *zi = *zi / zn;
        }
        for _ in 0..3 {
            z = lu.solve(&z);
            let n = vec_norm(&z);
            for zi in z.iter_mut() {
                *zi = *zi / n;
            }
        }
        let left_residual = {
            let sz = s_dag.matvec(&z);
            let mut acc = T::zero();
            let mu_bar = mu.conj();
            for (a_i, b_i) in sz.iter().zip(z.iter()) {
                acc += (*a_i - mu_bar * *b_i).norm_sqr();
            }
            acc.sqrt()
        };

        // Biorthogonal normalization ⟨ζ, Ξω⟩ = 1: because the inner product
        // conjugates its first argument, the raw vector is divided by the
        // conjugate of the overlap.
        let mut kappa = Complex::new(T::zero(), T::zero());
        for (zi, wi) in z.iter().zip(w.iter()) {
            kappa += zi.conj() * *wi;
        }
        if kappa.norm() / op_norm < T::from_f64(1e-6) {
            return Err(SymmetryError::NonBiorthogonalMode {
                overlap: (kappa.norm() / op_norm).to_f64(),
            });
        }
        let inv = one / kappa.conj();
        let mut weight = Complex::new(T::zero(), T::zero());
        for (zi, ri) in z.iter().zip(rho0_vec.iter()) {
            weight += (*zi * inv).conj() * *ri;
        }
        let weight_literal = hs_inner(&op, rho0)?;

        out.push(AsymptoticMode {
            lambda: m.lambda_expected,
            op,
            weight,
            weight_literal,
            eigen_residual,
            left_residual,
        });
    }

    Ok(AsymptoticModel {
        stationary: omega.clone(),
        modes: out,
        step,
    })
}

/// Jump operators of the continuous weak-coupling limit.
#[derive(Clone)]
pub struct LindbladOps<T> {
    pub ops: Vec<Matrix<T>>,
    pub tau: T,
}

/// Extract the jump operators of the τ → 0 limit of the collision model:
/// `L_{αβ} = √(p_α τ) ⟨β| H_int |α⟩` over ancilla eigenpairs with `β ≠ α`.
/// When the interaction strength scales like `1/√τ` these are τ-independent.
///
/// The ancilla-averaged interaction `Σ_α p_α ⟨α|H_int|α⟩` must vanish,
/// otherwise the limit picks up an unmodeled drift Hamiltonian and
/// `NonvanishingFirstMoment` is returned. Ancilla states with nonzero weight
/// on several eigenvectors are supported only through their eigenbasis;
/// degenerate-weight cross terms are not separated.
pub fn lindblad_limit<T: Scalar>(
    h_int: &Matrix<T>,
    rho_anc: &Matrix<T>,
    d_sys: usize,
    tau: T,
) -> Result<LindbladOps<T>, SymmetryError> {
    let d_anc = rho_anc.dim();
    if h_int.dim() != d_sys * d_anc {
        return Err(SymmetryError::Linalg(LinalgError::DimensionMismatch {
            expected: format!("{0}x{0}", d_sys * d_anc),
            found: format!("{}x{}", h_int.rows(), h_int.cols()),
        }));
    }
    let trace_err = (rho_anc.trace() - Complex::new(T::one(), T::zero())).norm();
    if trace_err > T::tp_tol() {
        return Err(SymmetryError::Channel(ChannelError::InvalidAncillaState(
            format!("trace deviates from one by {:e}", trace_err.to_f64()),
        )));
    }
    let anc_eig = hermitian_eig(rho_anc)?;
    if let Some(&min) = anc_eig.eigenvalues.first() {
        if min < -T::tp_tol() {
            return Err(SymmetryError::Channel(ChannelError::InvalidAncillaState(
                format!("negative eigenvalue {:e}", min.to_f64()),
            )));
        }
    }
    let column = |idx: usize| -> Vec<Complex<T>> {
        (0..d_anc).map(|row| anc_eig.eigenvectors[(row, idx)]).collect()
    };

    let mut first_moment = Matrix::zeros(d_sys, d_sys);
    for (alpha, &p) in anc_eig.eigenvalues.iter().enumerate() {
        if p <= T::zero() {
            continue;
        }
        let col = column(alpha);
        let diag = ancilla_matrix_element(h_int, &col, &col, d_sys);
        first_moment = &first_moment + &diag.scale_re(p);
    }
    let moment_rel = first_moment.frob_norm() / h_int.frob_norm().max(T::one());
    if moment_rel > T::fix_tol() {
        return Err(SymmetryError::NonvanishingFirstMoment {
            norm: moment_rel.to_f64(),
        });
    }

    let mut ops = Vec::new();
    for (alpha, &p) in anc_eig.eigenvalues.iter().enumerate() {
        if !(p > T::zero()) {
            continue;
        }
        let ket = column(alpha);
        let weight = (p * tau).sqrt();
        for beta in 0..d_anc {
            if beta == alpha {
                continue;
            }
            let l = ancilla_matrix_element(h_int, &column(beta), &ket, d_sys).scale_re(weight);
            if l.frob_norm() > T::zero_tol() {
                ops.push(l);
            }
        }
    }
    Ok(LindbladOps { ops, tau })
}

/// Generator matrix of the continuous-limit master equation in the
/// column-stacking convention:
/// `vec(−i[H,ρ] + Σ L ρ L† − ½{L†L, ρ})  =  G vec(ρ)`.
pub fn lindblad_generator<T: Scalar>(h_sys: &Matrix<T>, ops: &LindbladOps<T>) -> Matrix<T> {
    let d = h_sys.dim();
    let eye = Matrix::identity(d);
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut gen =
        (&kron(&eye, h_sys) - &kron(&h_sys.transpose(), &eye)).scale(minus_i);
    let half = T::from_f64(0.5);
    for l in &ops.ops {
        let ldl = &l.dagger() * l;
        gen = &gen + &kron(&l.conj(), l);
        gen = &gen - &kron(&ldl.transpose(), &eye).scale_re(half);
        gen = &gen - &kron(&eye, &ldl).scale_re(half);
    }
    gen
}

/// Outcome of the continuous-limit symmetry check.
#[derive(Clone, Debug)]
pub struct LindbladConditionReport<T> {
    pub lambda: Complex<T>,
    pub lambda_residual: T,
    /// Per jump operator: residuals of `[L, Ξ] ω` and `[L†, Ξ] L ω`.
    pub per_op: Vec<(T, T)>,
    pub max_residual: T,
    pub pass: bool,
}

/// Check the continuous-limit analogues of the two symmetry conditions: the
/// commutator eigenvalue relation for `H_S`, and for every jump operator the
/// vanishing of both `[L, Ξ] ω` and `[L†, Ξ] L ω`. Together they make `Ξ ω`
/// an eigenoperator of the master-equation generator: the first moves `Ξ`
/// through the jump term, the second through the anticommutator.
pub fn check_lindblad_conditions<T: Scalar>(
    h_sys: &Matrix<T>,
    ops: &LindbladOps<T>,
    xi: &Matrix<T>,
    omega: &Matrix<T>,
    tol_i: T,
    tol_ii: T,
) -> Result<LindbladConditionReport<T>, SymmetryError> {
    let cond_i = check_condition_i(h_sys, xi, tol_i)?;
    let base = xi.frob_norm() * omega.frob_norm();
    let mut per_op = Vec::with_capacity(ops.ops.len());
    let mut max_residual = T::zero();
    for l in &ops.ops {
        let l_norm = l.frob_norm().max(T::zero_tol());
        let scale_direct = (l_norm * base).max(T::zero_tol());
        let scale_closure = (l_norm * l_norm * base).max(T::zero_tol());
        let r_direct = (&commutator(l, xi) * omega).frob_norm() / scale_direct;
        let r_closure =
            (&commutator(&l.dagger(), xi) * &(l * omega)).frob_norm() / scale_closure;
        max_residual = max_residual.max(r_direct).max(r_closure);
        per_op.push((r_direct, r_closure));
    }
    let pass = cond_i.pass && max_residual < tol_ii;
    Ok(LindbladConditionReport {
        lambda: cond_i.lambda,
        lambda_residual: cond_i.residual,
        per_op,
        max_residual,
        pass,
    })
}

/// Orthogonal projector onto the subspace of operators that rotate without
/// decaying under the step maps: the span of the stationary state multiplied
/// on both sides by words in the mode operators and their adjoints. The
/// complement of this subspace is strictly contracted by long products of
/// random steps. Returns the projector (acting on vectorized operators) and
/// the subspace dimension.
pub fn peripheral_projector<T: Scalar>(
    omega: &Matrix<T>,
    modes: &[SymmetryOperator<T>],
) -> Result<(Matrix<T>, usize), SymmetryError> {
    let d = omega.dim();
    let d2 = d * d;
    let mut ops: Vec<Matrix<T>> = vec![Matrix::identity(d)];
    for m in modes {
        ops.push(m.xi.clone());
        ops.push(m.xi.dagger());
    }

    let drop_tol = T::from_f64(1e-7);
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    for a in &ops {
        for c in &ops {
            let ac = a * c;
            let ac_omega = &ac * omega;
            for b in &ops {
                let mono = &ac_omega * &b.dagger();
                let mut v = vectorize(&mono);
                let n0 = vec_norm(&v);
                if n0 < T::zero_tol() {
                    continue;
                }
                for x in v.iter_mut() {
                    *x = *x / n0;
                }
                // Two orthogonalization passes keep the basis orthonormal to
                // working precision.
                for _ in 0..2 {
                    for q in &basis {
                        let mut ip = Complex::new(T::zero(), T::zero());
                        for (qi, vi) in q.iter().zip(v.iter()) {
                            ip += qi.conj() * *vi;
                        }
                        for (vi, qi) in v.iter_mut().zip(q.iter()) {
                            *vi -= ip * *qi;
                        }
                    }
                }
                let n1 = vec_norm(&v);
                if n1 > drop_tol {
                    for x in v.iter_mut() {
                        *x = *x / n1;
                    }
                    basis.push(v);
                }
            }
        }
    }

    let rank = basis.len();
    let mut p = Matrix::zeros(d2, d2);
    for q in &basis {
        for i in 0..d2 {
            if q[i].norm_sqr() == T::zero() {
                continue;
            }
            for j in 0..d2 {
                let entry = &mut p[(i, j)];
                *entry += q[i] * q[j].conj();
            }
        }
    }
    Ok((p, rank))
}

/// Combined verification for one mode operator.
#[derive(Clone, Debug)]
pub struct ModeReport<T> {
    pub lambda_expected: T,
    pub condition_i: ConditionIReport<T>,
    pub condition_ii: ConditionIIReport<T>,
    /// One entry per sampled `(τ, θ)` step.
    pub eigen_evolution: Vec<EigenEvolutionReport<T>>,
    pub pass: bool,
}

/// Full verification outcome across all supplied modes.
#[derive(Clone, Debug)]
pub struct SymmetryReport<T> {
    pub modes: Vec<ModeReport<T>>,
    pub pass: bool,
}

/// Run the complete verification for a set of mode operators: the commutator
/// eigenvalue condition, the Kraus commutation condition on a duration grid,
/// and the one-step eigenoperator relation at the sampled `(τ, θ)` pairs.
pub fn full_symmetry_report<T, F>(
    channel_for_tau: &F,
    h_sys: &Matrix<T>,
    modes: &[SymmetryOperator<T>],
    omega: &Matrix<T>,
    tau_grid: &[T],
    step_samples: &[(T, T)],
    tol_i: T,
    tol_ii: T,
) -> Result<SymmetryReport<T>, SymmetryError>
where
    T: Scalar,
    F: Fn(T) -> Result<KrausChannel<T>, ChannelError>,
{
    let mut mode_reports = Vec::with_capacity(modes.len());
    let mut all_pass = true;
    for m in modes {
        let condition_i = check_condition_i(h_sys, &m.xi, tol_i)?;
        let condition_ii =
            check_condition_ii(&channel_for_tau, h_sys, &m.xi, omega, tau_grid, tol_ii)?;
        let lambda = condition_i.lambda.re;
        let mut eigen_evolution = Vec::with_capacity(step_samples.len());
        let mut steps_pass = true;
        for &(tau, theta) in step_samples {
            let channel = channel_for_tau(tau)?;
            let map = composite(&channel, h_sys, theta)?;
            let report = verify_eigen_evolution(&map, &m.xi, lambda, omega, tol_ii)?;
            steps_pass &= report.pass;
            eigen_evolution.push(report);
        }
        let pass = condition_i.pass && condition_ii.pass && steps_pass;
        all_pass &= pass;
        mode_reports.push(ModeReport {
            lambda_expected: m.lambda_expected,
            condition_i,
            condition_ii,
            eigen_evolution,
            pass,
        });
    }
    Ok(SymmetryReport {
        modes: mode_reports,
        pass: all_pass,
    })
}
