//! Quantum channels induced by one collision with a fresh ancilla: Kraus
//! decompositions extracted from the joint unitary, superoperator matrices in
//! the column-stacking convention, dual maps, composite maps that follow a
//! collision with a stretch of free system evolution, stationary states, and
//! complete-positivity checks.

use crate::linalg::{
    devectorize, expm_i, hermitian_eig, kron, vectorize, LinalgError, LuDecomp, Matrix,
};
use crate::scalar::Scalar;
use num_complex::Complex;

/// Errors from channel construction and application.
#[derive(Debug, thiserror::Error)]
pub enum ChannelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("invalid ancilla state: {0}")]
    InvalidAncillaState(String),

    #[error("invalid input state: {0}")]
    InvalidState(String),

    #[error("free-evolution duration must be nonnegative, got {theta}")]
    NegativeDuration { theta: f64 },

    #[error("Kraus set violates trace preservation (residual {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("stationary-state iteration stalled at residual {residual:e}; increase the averaging window")]
    NotConverged { residual: f64 },
}

/// A completely positive trace-preserving map in Kraus form,
/// `Λ[ρ] = Σ_k K_k ρ K_k†`, tagged with the collision duration that
/// produced it.
#[derive(Clone)]
pub struct KrausChannel<T> {
    pub dim: usize,
    pub kraus: Vec<Matrix<T>>,
    pub tau: T,
}

impl<T: Scalar> KrausChannel<T> {
    /// Validate trace preservation `Σ K†K = I` and wrap the operators.
    pub fn new(kraus: Vec<Matrix<T>>, tau: T) -> Result<Self, ChannelError> {
        assert!(!kraus.is_empty(), "a channel needs at least one Kraus operator");
        let dim = kraus[0].dim();
        let mut sum = Matrix::zeros(dim, dim);
        for k in &kraus {
            if k.dim() != dim {
                return Err(ChannelError::Linalg(LinalgError::DimensionMismatch {
                    expected: format!("{dim}x{dim}"),
                    found: format!("{}x{}", k.rows(), k.cols()),
                }));
            }
            sum = &sum + &(&k.dagger() * k);
        }
        let residual = (&sum - &Matrix::identity(dim)).frob_norm();
        if residual > T::tp_tol() {
            return Err(ChannelError::NotTracePreserving {
                residual: residual.to_f64(),
            });
        }
        Ok(KrausChannel { dim, kraus, tau })
    }

    /// Deviation of `Σ K†K` from the identity.
    pub fn tp_residual(&self) -> T {
        let mut sum = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            sum = &sum + &(&k.dagger() * k);
        }
        (&sum - &Matrix::identity(self.dim)).frob_norm()
    }
}

/// Matrix representation of a channel acting on column-stacked states:
/// `vec(Λ[ρ]) = matrix · vec(ρ)`.
#[derive(Clone)]
pub struct Superoperator<T> {
    pub dim: usize,
    pub matrix: Matrix<T>,
}

impl<T: Scalar> Superoperator<T> {
    pub fn apply_to_state(&self, rho: &Matrix<T>) -> Matrix<T> {
        devectorize(&self.matrix.matvec(&vectorize(rho)))
    }
}

/// One collision followed by free system evolution for a duration θ.
#[derive(Clone)]
pub struct CompositeMap<T> {
    pub channel: KrausChannel<T>,
    pub theta: T,
    /// Free propagator `U_S(θ)`.
    pub u_free: Matrix<T>,
}

impl<T: Scalar> CompositeMap<T> {
    /// Collision first, then the free window.
    pub fn apply(&self, rho: &Matrix<T>) -> Result<Matrix<T>, ChannelError> {
        let collided = apply(&self.channel, rho)?;
        Ok(&(&self.u_free * &collided) * &self.u_free.dagger())
    }

    /// Linear action of the map on an arbitrary operator, without the
    /// density-matrix validation of [`CompositeMap::apply`]. Needed when
    /// evolving non-state operators (coherence modes, deviations) and inside
    /// iteration loops where the input is known valid.
    pub fn apply_linear(&self, a: &Matrix<T>) -> Matrix<T> {
        let collided = apply_kraus(&self.channel, a);
        &(&self.u_free * &collided) * &self.u_free.dagger()
    }

    /// Superoperator of the whole map: free-evolution conjugation composed
    /// after the collision, `(Ū_free ⊗ U_free) · S_channel`.
    pub fn superoperator_matrix(&self) -> Superoperator<T> {
        let s_chan = superoperator_matrix(&self.channel);
        let free = kron(&self.u_free.conj(), &self.u_free);
        Superoperator {
            dim: self.channel.dim,
            matrix: &free * &s_chan.matrix,
        }
    }
}

/// Joint propagator of one collision:
/// `exp(−iτ (H_S⊗1 + 1⊗H_A + H_int))` in system ⊗ ancilla ordering.
pub fn joint_unitary<T: Scalar>(
    h_sys: &Matrix<T>,
    h_anc: &Matrix<T>,
    h_int: &Matrix<T>,
    tau: T,
) -> Result<Matrix<T>, ChannelError> {
    let d_s = h_sys.dim();
    let d_a = h_anc.dim();
    if h_int.dim() != d_s * d_a {
        return Err(ChannelError::Linalg(LinalgError::DimensionMismatch {
            expected: format!("{0}x{0}", d_s * d_a),
            found: format!("{}x{}", h_int.rows(), h_int.cols()),
        }));
    }
    let h_tot = &(&kron(h_sys, &Matrix::identity(d_a)) + &kron(&Matrix::identity(d_s), h_anc)) + h_int;
    Ok(expm_i(&h_tot, tau)?)
}

/// Trace over the ancilla factor of a joint operator in system ⊗ ancilla
/// ordering.
pub fn partial_trace_ancilla<T: Scalar>(joint: &Matrix<T>, d_sys: usize, d_anc: usize) -> Matrix<T> {
    assert_eq!(joint.dim(), d_sys * d_anc, "joint dimension mismatch");
    Matrix::from_fn(d_sys, d_sys, |i, j| {
        let mut s = Complex::new(T::zero(), T::zero());
        for b in 0..d_anc {
            s += joint[(i * d_anc + b, j * d_anc + b)];
        }
        s
    })
}

/// Partial matrix element `⟨bra| A |ket⟩` over the ancilla factor of a joint
/// operator in system ⊗ ancilla ordering: contracting the ancilla legs with
/// the given ancilla vectors leaves a system operator.
pub fn ancilla_matrix_element<T: Scalar>(
    joint: &Matrix<T>,
    bra: &[Complex<T>],
    ket: &[Complex<T>],
    d_sys: usize,
) -> Matrix<T> {
    let d_anc = bra.len();
    assert_eq!(ket.len(), d_anc, "ancilla vector lengths differ");
    assert_eq!(joint.dim(), d_sys * d_anc, "joint dimension mismatch");
    Matrix::from_fn(d_sys, d_sys, |i, j| {
        let mut s = Complex::new(T::zero(), T::zero());
        for (b, amp_b) in bra.iter().enumerate() {
            let coeff = amp_b.conj();
            for (a, amp_a) in ket.iter().enumerate() {
                s += coeff * joint[(i * d_anc + b, j * d_anc + a)] * *amp_a;
            }
        }
        s
    })
}

/// Extract the Kraus operators of the reduced system map from a joint
/// unitary and the ancilla state: `K_{αβ} = √p_α ⟨β|U|α⟩`, with `|α⟩` the
/// ancilla eigenbasis and one operator per (α with p_α > p_cut, β).
pub fn kraus_from_unitary_pruned<T: Scalar>(
    u: &Matrix<T>,
    rho_anc: &Matrix<T>,
    d_sys: usize,
    tau: T,
    p_cut: T,
) -> Result<KrausChannel<T>, ChannelError> {
    let d_anc = rho_anc.dim();
    if u.dim() != d_sys * d_anc {
        return Err(ChannelError::Linalg(LinalgError::DimensionMismatch {
            expected: format!("{0}x{0}", d_sys * d_anc),
            found: format!("{}x{}", u.rows(), u.cols()),
        }));
    }
    let trace_err = (rho_anc.trace() - Complex::new(T::one(), T::zero())).norm();
    if trace_err > T::tp_tol() {
        return Err(ChannelError::InvalidAncillaState(format!(
            "trace deviates from one by {:e}",
            trace_err.to_f64()
        )));
    }
    let anc_eig = hermitian_eig(rho_anc).map_err(|e| match e {
        LinalgError::NotHermitian { residual } => ChannelError::InvalidAncillaState(format!(
            "not Hermitian (residual {residual:e})"
        )),
        other => ChannelError::Linalg(other),
    })?;
    let psd_floor = -T::tp_tol();
    if let Some(&min) = anc_eig.eigenvalues.first() {
        if min < psd_floor {
            return Err(ChannelError::InvalidAncillaState(format!(
                "negative eigenvalue {:e}",
                min.to_f64()
            )));
        }
    }

    let column = |idx: usize| -> Vec<Complex<T>> {
        (0..d_anc).map(|row| anc_eig.eigenvectors[(row, idx)]).collect()
    };
    let mut kraus = Vec::new();
    for (alpha, &p) in anc_eig.eigenvalues.iter().enumerate() {
        if !(p > p_cut) {
            continue;
        }
        let weight = Complex::new(p.sqrt(), T::zero());
        let ket = column(alpha);
        for beta in 0..d_anc {
            let block = ancilla_matrix_element(u, &column(beta), &ket, d_sys);
            kraus.push(block.scale(weight));
        }
    }
    KrausChannel::new(kraus, tau)
}

/// [`kraus_from_unitary_pruned`] with the default pruning threshold
/// `p_cut = 0`: every ancilla eigenstate with nonzero weight contributes.
pub fn kraus_from_unitary<T: Scalar>(
    u: &Matrix<T>,
    rho_anc: &Matrix<T>,
    d_sys: usize,
    tau: T,
) -> Result<KrausChannel<T>, ChannelError> {
    kraus_from_unitary_pruned(u, rho_anc, d_sys, tau, T::zero())
}

/// Convenience pipeline: build the joint unitary for one collision and reduce
/// it to the system channel.
pub fn collision_channel<T: Scalar>(
    h_sys: &Matrix<T>,
    h_anc: &Matrix<T>,
    h_int: &Matrix<T>,
    rho_anc: &Matrix<T>,
    tau: T,
) -> Result<KrausChannel<T>, ChannelError> {
    let u = joint_unitary(h_sys, h_anc, h_int, tau)?;
    kraus_from_unitary(&u, rho_anc, h_sys.dim(), tau)
}

/// Rotate the Kraus set into the interaction picture of the system's free
/// evolution: each operator is left-multiplied by `U_S†(τ)`.
pub fn interaction_picture<T: Scalar>(
    channel: &KrausChannel<T>,
    h_sys: &Matrix<T>,
) -> Result<KrausChannel<T>, ChannelError> {
    let u_dag = expm_i(h_sys, channel.tau)?.dagger();
    let kraus = channel.kraus.iter().map(|k| &u_dag * k).collect();
    KrausChannel::new(kraus, channel.tau)
}

fn apply_kraus<T: Scalar>(channel: &KrausChannel<T>, rho: &Matrix<T>) -> Matrix<T> {
    let mut out = Matrix::zeros(channel.dim, channel.dim);
    for k in &channel.kraus {
        out = &out + &(&(k * rho) * &k.dagger());
    }
    out
}

/// Apply the channel to a state. The input must be a density matrix: unit
/// trace, Hermitian, and positive semidefinite to tolerance.
pub fn apply<T: Scalar>(channel: &KrausChannel<T>, rho: &Matrix<T>) -> Result<Matrix<T>, ChannelError> {
    if rho.dim() != channel.dim {
        return Err(ChannelError::Linalg(LinalgError::DimensionMismatch {
            expected: format!("{0}x{0}", channel.dim),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        }));
    }
    let trace_err = (rho.trace() - Complex::new(T::one(), T::zero())).norm();
    if trace_err > T::fix_tol() {
        return Err(ChannelError::InvalidState(format!(
            "trace deviates from one by {:e}",
            trace_err.to_f64()
        )));
    }
    if rho.hermiticity_residual() > T::hermiticity_tol() {
        return Err(ChannelError::InvalidState("state is not Hermitian".into()));
    }
    let eig = hermitian_eig(rho)?;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -T::fix_tol() {
            return Err(ChannelError::InvalidState(format!(
                "negative eigenvalue {:e}",
                min.to_f64()
            )));
        }
    }
    Ok(apply_kraus(channel, rho))
}

/// Superoperator matrix in the column-stacking convention:
/// `S = Σ_k K̄_k ⊗ K_k`.
pub fn superoperator_matrix<T: Scalar>(channel: &KrausChannel<T>) -> Superoperator<T> {
    let d2 = channel.dim * channel.dim;
    let mut m = Matrix::zeros(d2, d2);
    for k in &channel.kraus {
        m = &m + &kron(&k.conj(), k);
    }
    Superoperator {
        dim: channel.dim,
        matrix: m,
    }
}

/// Matrix of the dual (Heisenberg-picture) map: the conjugate transpose of
/// the channel matrix, satisfying `Tr[(Λ‡[O])† ρ] = Tr[O† Λ[ρ]]`.
pub fn dual_matrix<T: Scalar>(s: &Superoperator<T>) -> Superoperator<T> {
    Superoperator {
        dim: s.dim,
        matrix: s.matrix.dagger(),
    }
}

/// Compose a collision with θ of free system evolution (collision acts
/// first).
pub fn composite<T: Scalar>(
    channel: &KrausChannel<T>,
    h_sys: &Matrix<T>,
    theta: T,
) -> Result<CompositeMap<T>, ChannelError> {
    if theta < T::zero() {
        return Err(ChannelError::NegativeDuration {
            theta: theta.to_f64(),
        });
    }
    let u_free = expm_i(h_sys, theta)?;
    Ok(CompositeMap {
        channel: channel.clone(),
        theta,
        u_free,
    })
}

/// Stationary state by Cesàro averaging: mean of `Λ̃ⁿ[ρ_seed]` over
/// `n ∈ [n_burn, n_burn + n_avg)`. Plain iteration does not converge here
/// because persistently oscillating modes never decay; their phases average
/// out instead.
///
/// When `n_burn = 0` and `n_avg` is a power of two (and the dimension is
/// small enough to afford the superoperator matrix), the average is computed
/// by repeated window doubling — `A_{2N} = (A_N + S^N A_N)/2` — so windows of
/// 2²⁶ maps cost only 26 matrix products. Otherwise the maps are applied one
/// by one.
///
/// The result must satisfy `‖Λ̃[ω] − ω‖_F < fix_tol`; if the window was too
/// short the residual is reported in `NotConverged`. When the fixed space is
/// degenerate the Cesàro limit depends on the seed; seeding with `I/d` is the
/// canonical choice (see [`fixed_point_dimension`] to detect degeneracy).
pub fn stationary_state<T: Scalar>(
    map: &CompositeMap<T>,
    rho_seed: &Matrix<T>,
    n_burn: usize,
    n_avg: usize,
) -> Result<Matrix<T>, ChannelError> {
    assert!(n_avg >= 1, "averaging window must be nonempty");
    let d = map.channel.dim;
    let omega = if n_burn == 0 && n_avg.is_power_of_two() && n_avg > 1 && d <= 64 {
        let s = map.superoperator_matrix().matrix;
        let mut avg = vectorize(rho_seed);
        let mut power = s;
        let mut window = 1usize;
        while window < n_avg {
            let shifted = power.matvec(&avg);
            let half = T::from_f64(0.5);
            for (a, b) in avg.iter_mut().zip(shifted.iter()) {
                *a = (*a + *b) * half;
            }
            window *= 2;
            if window < n_avg {
                power = &power * &power;
            }
        }
        devectorize(&avg)
    } else {
        let mut rho = rho_seed.clone();
        for _ in 0..n_burn {
            rho = map.apply_linear(&rho);
        }
        let mut sum = rho.clone();
        for _ in 1..n_avg {
            rho = map.apply_linear(&rho);
            sum = &sum + &rho;
        }
        sum.scale_re(T::one() / T::from_f64(n_avg as f64))
    };

    let residual = (&map.apply_linear(&omega) - &omega).frob_norm();
    if residual > T::fix_tol() {
        return Err(ChannelError::NotConverged {
            residual: residual.to_f64(),
        });
    }
    Ok(omega)
}

/// Exact stationary state by spectral projection, the cross-check partner of
/// the Cesàro route: project `I/d` onto the fixed subspace of the map along
/// its complement using the right/left null spaces of `(S − I)`, then
/// normalize the trace. Accurate to working precision and independent of any
/// iteration count.
pub fn stationary_state_exact<T: Scalar>(s: &Superoperator<T>) -> Result<Matrix<T>, ChannelError> {
    let d = s.dim;
    let d2 = d * d;
    let shifted = &s.matrix - &Matrix::identity(d2);
    let right = crate::linalg::null_space(&shifted)?;
    let left = crate::linalg::null_space(&shifted.dagger())?;
    if right.is_empty() || right.len() != left.len() {
        return Err(ChannelError::Linalg(LinalgError::NoFixedPoint));
    }
    let r = right.len();

    // Columns of W span the fixed space; columns of Z span the dual fixed
    // space. The oblique projector onto range(W) along ker(Z†) is
    // W (Z†W)⁻¹ Z†; apply it to vec(I/d).
    let w = Matrix::from_fn(d2, r, |i, j| right[j][i]);
    let z = Matrix::from_fn(d2, r, |i, j| left[j][i]);
    let zw = &z.dagger() * &w;
    let zw_inv = LuDecomp::new(&zw).map_err(ChannelError::Linalg)?.inverse();

    let seed = vectorize(&Matrix::<T>::identity(d).scale_re(T::one() / T::from_f64(d as f64)));
    let projected = w.matvec(&zw_inv.matvec(&z.dagger().matvec(&seed)));
    let omega_raw = devectorize(&projected);

    // Clean rounding noise and normalize the trace exactly.
    let hermitized = (&omega_raw + &omega_raw.dagger()).scale_re(T::from_f64(0.5));
    let trace = hermitized.trace();
    if trace.norm() < T::zero_tol() {
        return Err(ChannelError::InvalidState(
            "fixed-space projection of the maximally mixed state is traceless".into(),
        ));
    }
    Ok(hermitized.scale(Complex::new(T::one(), T::zero()) / trace))
}

/// Dimension of the fixed subspace of a map (the count of linearly
/// independent stationary operators).
pub fn fixed_point_dimension<T: Scalar>(s: &Superoperator<T>) -> Result<usize, ChannelError> {
    Ok(crate::linalg::fixed_point_null_space(&s.matrix)?.len())
}

/// Outcome of the complete-positivity check.
#[derive(Clone, Copy, Debug)]
pub struct ChoiReport<T> {
    pub min_eig: T,
    pub is_cp: bool,
}

/// Choi matrix assembled directly from the Kraus form,
/// `C = Σ_k vec(K_k) vec(K_k)†`.
pub fn choi_from_kraus<T: Scalar>(channel: &KrausChannel<T>) -> Matrix<T> {
    let d2 = channel.dim * channel.dim;
    let mut c = Matrix::zeros(d2, d2);
    for k in &channel.kraus {
        let v = vectorize(k);
        for i in 0..d2 {
            for j in 0..d2 {
                let outer = v[i] * v[j].conj();
                let entry = &mut c[(i, j)];
                *entry += outer;
            }
        }
    }
    c
}

/// Choi matrix of an arbitrary superoperator matrix (column-stacking
/// convention) via the index reshuffle
/// `C[(j₁d+i₁, j₂d+i₂)] = S[(i₂d+i₁, j₂d+j₁)]`. Agrees with
/// [`choi_from_kraus`] on Kraus-built channels and extends the CP test to
/// maps given only as matrices.
pub fn choi_from_superoperator<T: Scalar>(s: &Superoperator<T>) -> Matrix<T> {
    let d = s.dim;
    Matrix::from_fn(d * d, d * d, |row, col| {
        let (j1, i1) = (row / d, row % d);
        let (j2, i2) = (col / d, col % d);
        s.matrix[(i2 * d + i1, j2 * d + j1)]
    })
}

/// Complete positivity check: the channel is CP iff its Choi matrix is
/// positive semidefinite. Reports the minimum Choi eigenvalue with a small
/// negative floor for numerical noise.
pub fn choi_psd_check<T: Scalar>(channel: &KrausChannel<T>) -> Result<ChoiReport<T>, ChannelError> {
    let c = choi_from_kraus(channel);
    choi_report(&c)
}

/// CP check on an already-assembled Choi matrix.
pub fn choi_report<T: Scalar>(choi: &Matrix<T>) -> Result<ChoiReport<T>, ChannelError> {
    let eig = hermitian_eig(choi)?;
    let min_eig = eig.eigenvalues.first().copied().unwrap_or_else(T::zero);
    Ok(ChoiReport {
        min_eig,
        is_cp: min_eig >= -T::tp_tol(),
    })
}
