//! Stochastic trajectory engine for the randomized collision dynamics.
//!
//! One step of the evolution is a fixed-duration system–ancilla collision
//! followed by a free-evolution window whose random duration θ is drawn from an
//! exponential distribution. Observables are recorded on a uniform output grid;
//! grid points that fall inside a collision window are evaluated on the joint
//! (system ⊗ ancilla) state and partial-traced, so the recorded curves resolve
//! the collision itself instead of aliasing it to the boundaries.
//!
//! Everything is deterministic given the 64-bit seed: a single ChaCha stream
//! drives one trajectory (initial state first, then one waiting time per
//! collision), and ensemble members use seeds derived by [`trajectory_seed`].
//! Ensemble runs may execute in parallel but their output is independent of
//! scheduling.

use crate::channels::partial_trace_ancilla;
use crate::linalg::{hermitian_eig, kron, HermitianEigen, LinalgError, Matrix};
use crate::scalar::Scalar;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::sync::OnceLock;
use thiserror::Error;

/// Errors from trajectory simulation.
#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("observable is not Hermitian (residual {residual:e})")]
    NonHermitianObservable { residual: f64 },

    #[error("expectation of a Hermitian observable has imaginary part {imag:e}")]
    ExpectationNotReal { imag: f64 },

    #[error("non-finite observable value at time {time}")]
    NonFiniteValue { time: f64 },

    /// The reduced state stopped being a density matrix at a collision
    /// boundary. This is never repaired silently: renormalizing would mask the
    /// integration bug that caused it.
    #[error("state integrity lost at collision {collision}: {detail}")]
    StateDrift { collision: usize, detail: String },

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    #[error("invalid trajectory configuration: {0}")]
    InvalidConfig(String),
}

/// Initial system state of a trajectory.
#[derive(Clone)]
pub enum InitialState<T> {
    /// Basis state with every spin excited: the **last** computational basis
    /// index `d − 1` under this crate's convention (σz = +1 on every site).
    AllUp,
    /// Haar-random pure state, drawn from the trajectory's own RNG stream
    /// before any waiting time is sampled.
    RandomPure,
    /// Explicit density matrix; validated for trace, Hermiticity, and
    /// positivity before the run starts.
    Given(Matrix<T>),
}

/// Stochastic parameters of one trajectory. Model content (Hamiltonians,
/// ancilla state, collision duration) lives in [`CollisionEngine`]; this
/// struct only holds what varies between runs.
#[derive(Clone)]
pub struct TrajectoryConfig<T> {
    /// Rate γ of the waiting-time distribution `p(θ) = γ e^{−γθ}`.
    pub gamma: T,
    /// Number of collisions n.
    pub n_collisions: usize,
    /// Output grid spacing; samples are taken at `t_k = k · dt_out`.
    pub dt_out: T,
    /// Seed of the per-trajectory RNG stream.
    pub seed: u64,
    pub initial: InitialState<T>,
}

impl<T: Scalar> TrajectoryConfig<T> {
    /// Check the config against the invariants `gamma > 0`, `dt_out > 0`,
    /// `n_collisions ≥ 1`, and (for an explicit initial state) that the given
    /// matrix is a density matrix of the right dimension.
    pub fn validate(&self, d_sys: usize) -> Result<(), DynamicsError> {
        if !(self.gamma > T::zero()) {
            return Err(DynamicsError::InvalidConfig(
                "waiting-time rate must be positive".into(),
            ));
        }
        if !(self.dt_out > T::zero()) {
            return Err(DynamicsError::InvalidConfig(
                "output grid spacing must be positive".into(),
            ));
        }
        if self.n_collisions == 0 {
            return Err(DynamicsError::InvalidConfig("need at least one collision".into()));
        }
        if let InitialState::Given(rho) = &self.initial {
            if rho.rows() != d_sys || rho.cols() != d_sys {
                return Err(DynamicsError::InvalidInitialState(format!(
                    "{}x{} does not match system dimension {}",
                    rho.rows(),
                    rho.cols(),
                    d_sys
                )));
            }
            state_integrity(rho).map_err(DynamicsError::InvalidInitialState)?;
        }
        Ok(())
    }
}

/// One trajectory's worth of recorded observables.
#[derive(Clone)]
pub struct TimeSeries<T> {
    /// Uniform grid `t_k = k · dt_out`, strictly inside `[0, duration)`.
    pub times: Vec<T>,
    /// One row per observable, aligned with `times`.
    pub values: Vec<Vec<T>>,
    /// `(start, end)` of each collision window, in order. Empty for ensemble
    /// averages, where the windows differ between realizations.
    pub collision_times: Vec<(T, T)>,
    /// Total evolved time `n·τ + Σ_j θ_j` (minimum over members for an
    /// ensemble average).
    pub duration: T,
    /// Reduced system state at the end of the final free window (pointwise
    /// mean over members for an ensemble average).
    pub end_state: Matrix<T>,
}

/// Precomputed spectral data for one collision model: joint and system
/// eigendecompositions plus the embedding that maps a system state straight
/// into the joint eigenbasis when the ancilla is reset to a fixed pure state.
///
/// Building the engine is O(D³) in the joint dimension; each collision is then
/// two dense basis changes and each grid sample O(D²).
pub struct CollisionEngine<T> {
    d_sys: usize,
    d_anc: usize,
    tau: T,
    joint_eig: HermitianEigen<T>,
    sys_eig: HermitianEigen<T>,
    vj_dag: Matrix<T>,
    vs_dag: Matrix<T>,
    /// `V_joint† (1_S ⊗ χ)`, a `(d_sys·d_anc) × d_sys` map: with the ancilla
    /// in the pure state χ the joint state in the eigenbasis is `W ρ W†`.
    embed: Matrix<T>,
    embed_dag: Matrix<T>,
}

impl<T: Scalar> CollisionEngine<T> {
    /// Assemble the engine from the system, ancilla, and interaction
    /// Hamiltonians, the pure ancilla state each collision resets to, and the
    /// collision duration τ.
    pub fn new(
        h_sys: &Matrix<T>,
        h_anc: &Matrix<T>,
        h_int: &Matrix<T>,
        ancilla: &[Complex<T>],
        tau: T,
    ) -> Result<Self, DynamicsError> {
        if !h_sys.is_square() || !h_anc.is_square() {
            return Err(DynamicsError::Linalg(LinalgError::DimensionMismatch {
                expected: "square Hamiltonians".into(),
                found: format!(
                    "{}x{} and {}x{}",
                    h_sys.rows(),
                    h_sys.cols(),
                    h_anc.rows(),
                    h_anc.cols()
                ),
            }));
        }
        let d_sys = h_sys.rows();
        let d_anc = h_anc.rows();
        let d_joint = d_sys * d_anc;
        if h_int.rows() != d_joint || h_int.cols() != d_joint {
            return Err(DynamicsError::Linalg(LinalgError::DimensionMismatch {
                expected: format!("{d_joint}x{d_joint}"),
                found: format!("{}x{}", h_int.rows(), h_int.cols()),
            }));
        }
        if ancilla.len() != d_anc {
            return Err(DynamicsError::InvalidConfig(format!(
                "ancilla state has {} amplitudes, expected {}",
                ancilla.len(),
                d_anc
            )));
        }
        let norm = ancilla.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if (norm - T::one()).abs() > T::drift_tol() {
            return Err(DynamicsError::InvalidConfig(format!(
                "ancilla state norm {:e} is not one",
                norm.to_f64()
            )));
        }
        if !(tau > T::zero()) {
            return Err(DynamicsError::InvalidConfig("collision duration must be positive".into()));
        }

        let h_tot = &(&kron(h_sys, &Matrix::identity(d_anc))
            + &kron(&Matrix::identity(d_sys), h_anc))
            + h_int;
        let joint_eig = hermitian_eig(&h_tot)?;
        let sys_eig = hermitian_eig(h_sys)?;

        let vj = &joint_eig.eigenvectors;
        let embed = Matrix::from_fn(d_joint, d_sys, |r, j| {
            let mut s = Complex::new(T::zero(), T::zero());
            for (a, amp) in ancilla.iter().enumerate() {
                s += vj[(j * d_anc + a, r)].conj() * *amp;
            }
            s
        });

        Ok(Self {
            d_sys,
            d_anc,
            tau,
            vj_dag: joint_eig.eigenvectors.dagger(),
            vs_dag: sys_eig.eigenvectors.dagger(),
            embed_dag: embed.dagger(),
            embed,
            joint_eig,
            sys_eig,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.d_sys
    }

    pub fn ancilla_dim(&self) -> usize {
        self.d_anc
    }

    pub fn tau(&self) -> T {
        self.tau
    }
}

/// Inverse CDF of the exponential waiting-time distribution:
/// `θ = −ln(1 − u)/γ` for `u ∈ [0, 1)`.
pub fn waiting_time_from_uniform<T: Scalar>(u: T, gamma: T) -> T {
    -(T::one() - u).ln() / gamma
}

/// Draw one waiting time from `p(θ) = γ e^{−γθ}` by inverse-CDF sampling.
///
/// The uniform variate is always drawn as an `f64` so the underlying bit
/// stream — and hence trajectory reproducibility — does not depend on the
/// scalar type.
pub fn sample_waiting_time<T: Scalar, R: Rng + ?Sized>(gamma: T, rng: &mut R) -> T {
    waiting_time_from_uniform(T::from_f64(rng.random::<f64>()), gamma)
}

/// Haar-random pure state `|ψ⟩⟨ψ|`: i.i.d. complex Gaussian amplitudes
/// (real part drawn before imaginary, index order) normalized to unit length.
pub fn random_pure_state<T: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix<T> {
    assert!(d >= 1, "state dimension must be at least 1");
    loop {
        let mut psi: Vec<Complex<T>> = Vec::with_capacity(d);
        for _ in 0..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            psi.push(Complex::new(T::from_f64(re), T::from_f64(im)));
        }
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if norm > T::from_f64(1e-150) {
            let inv = T::one() / norm;
            for amp in &mut psi {
                *amp = amp.scale(inv);
            }
            return Matrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
        }
        // Astronomically unlikely underflow: redraw.
    }
}

/// Real expectation value `Re Tr[obs · rho]` of a Hermitian observable.
pub fn expectation<T: Scalar>(rho: &Matrix<T>, obs: &Matrix<T>) -> Result<T, DynamicsError> {
    if (obs.rows(), obs.cols()) != (rho.rows(), rho.cols()) || !rho.is_square() {
        return Err(DynamicsError::Linalg(LinalgError::DimensionMismatch {
            expected: format!("{}x{}", rho.rows(), rho.cols()),
            found: format!("{}x{}", obs.rows(), obs.cols()),
        }));
    }
    let residual = obs.hermiticity_residual();
    if !(residual <= T::hermiticity_tol()) {
        return Err(DynamicsError::NonHermitianObservable {
            residual: residual.to_f64(),
        });
    }
    let d = rho.rows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..d {
        let row = obs.row(i);
        for j in 0..d {
            acc += row[j] * rho[(j, i)];
        }
    }
    if !(acc.im.abs() <= T::imag_tol()) {
        return Err(DynamicsError::ExpectationNotReal {
            imag: acc.im.to_f64(),
        });
    }
    Ok(acc.re)
}

/// Seed of ensemble member `index` derived from the base seed.
///
/// Member 0 uses `base` unchanged; member `i ≥ 1` mixes
/// `z = base XOR (i · 0x9E3779B97F4A7C15)` through the 64-bit finalizer
///
/// ```text
/// z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) · 0x94D049BB133111EB
/// z =  z ^ (z >> 31)
/// ```
///
/// with wrapping multiplication throughout. The mixing is documented
/// bit-exactly so any single member can be reproduced outside an ensemble run.
pub fn trajectory_seed(base: u64, index: u64) -> u64 {
    if index == 0 {
        return base;
    }
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Check that `rho` is still a density matrix: unit trace, Hermitian, and
/// positive semidefinite within the drift tolerance. Positivity is probed on a
/// symmetrized copy so a tiny Hermiticity residual cannot abort the
/// eigensolve; the evolving state itself is never modified.
fn state_integrity<T: Scalar>(rho: &Matrix<T>) -> Result<(), String> {
    let drift = (rho.trace() - Complex::new(T::one(), T::zero())).norm();
    if !(drift <= T::drift_tol()) {
        return Err(format!("trace deviates from one by {:e}", drift.to_f64()));
    }
    let herm = rho.hermiticity_residual();
    if !(herm <= T::drift_tol()) {
        return Err(format!("Hermiticity residual {:e}", herm.to_f64()));
    }
    let sym = (rho + &rho.dagger()).scale_re(T::from_f64(0.5));
    let eig = hermitian_eig(&sym).map_err(|e| format!("eigensolve failed: {e}"))?;
    if let Some(&min) = eig.eigenvalues.first() {
        if !(min >= -T::drift_tol()) {
            return Err(format!("negative eigenvalue {:e}", min.to_f64()));
        }
    }
    Ok(())
}

/// `e^{+iλ_p t}` for every eigenvalue; conjugate pairs of these phases advance
/// a density matrix in its eigenbasis.
fn phase_vector<T: Scalar>(eigenvalues: &[T], t: T) -> Vec<Complex<T>> {
    eigenvalues
        .iter()
        .map(|&l| Complex::from_polar(T::one(), l * t))
        .collect()
}

/// `Tr[Õ ρ̃(t)]` where both operators are expressed in the Hamiltonian
/// eigenbasis and `ρ̃(t)[q,p] = ρ̃[q,p] e^{−i(λ_q−λ_p)t}`.
fn sampled_value<T: Scalar>(
    o_tilde: &Matrix<T>,
    rho_tilde: &Matrix<T>,
    phases: &[Complex<T>],
) -> Complex<T> {
    let d = phases.len();
    let mut acc = Complex::new(T::zero(), T::zero());
    for p in 0..d {
        let row = o_tilde.row(p);
        let ph_p = phases[p];
        for q in 0..d {
            acc += row[q] * rho_tilde[(q, p)] * ph_p * phases[q].conj();
        }
    }
    acc
}

/// Advance a density matrix in its eigenbasis to the end of a segment of
/// duration encoded in `phases`.
fn rotate_to_end<T: Scalar>(rho_tilde: &Matrix<T>, phases: &[Complex<T>]) -> Matrix<T> {
    let d = phases.len();
    Matrix::from_fn(d, d, |q, p| phases[q].conj() * rho_tilde[(q, p)] * phases[p])
}

fn record<T: Scalar>(
    acc: Complex<T>,
    time: T,
    sink: &mut Vec<T>,
) -> Result<(), DynamicsError> {
    if !(acc.im.abs() <= T::imag_tol()) {
        return Err(DynamicsError::ExpectationNotReal {
            imag: acc.im.to_f64(),
        });
    }
    if !acc.re.is_finite() {
        return Err(DynamicsError::NonFiniteValue { time: time.to_f64() });
    }
    sink.push(acc.re);
    Ok(())
}

/// Simulate one trajectory: `n_collisions` alternations of a τ-long collision
/// and an exponentially distributed free window, recording every observable at
/// each grid time `t_k = k · dt_out` that falls inside the evolved span.
///
/// The RNG stream is consumed in a fixed order — initial state first (only
/// [`InitialState::RandomPure`] draws), then one waiting time per collision —
/// so identical configs give bitwise-identical output.
pub fn run_trajectory<T: Scalar>(
    engine: &CollisionEngine<T>,
    cfg: &TrajectoryConfig<T>,
    observables: &[Matrix<T>],
) -> Result<TimeSeries<T>, DynamicsError> {
    cfg.validate(engine.d_sys)?;
    for obs in observables {
        if (obs.rows(), obs.cols()) != (engine.d_sys, engine.d_sys) {
            return Err(DynamicsError::Linalg(LinalgError::DimensionMismatch {
                expected: format!("{0}x{0}", engine.d_sys),
                found: format!("{}x{}", obs.rows(), obs.cols()),
            }));
        }
        let residual = obs.hermiticity_residual();
        if !(residual <= T::hermiticity_tol()) {
            return Err(DynamicsError::NonHermitianObservable {
                residual: residual.to_f64(),
            });
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut rho = match &cfg.initial {
        InitialState::AllUp => {
            let mut m = Matrix::zeros(engine.d_sys, engine.d_sys);
            m[(engine.d_sys - 1, engine.d_sys - 1)] = Complex::new(T::one(), T::zero());
            m
        }
        InitialState::RandomPure => random_pure_state(engine.d_sys, &mut rng),
        InitialState::Given(m) => m.clone(),
    };

    // Observables lifted to the joint eigenbasis (collision windows) and the
    // system eigenbasis (free windows), once per run.
    let anc_identity = Matrix::identity(engine.d_anc);
    let o_joint: Vec<Matrix<T>> = observables
        .iter()
        .map(|o| &(&engine.vj_dag * &kron(o, &anc_identity)) * &engine.joint_eig.eigenvectors)
        .collect();
    let o_sys: Vec<Matrix<T>> = observables
        .iter()
        .map(|o| &(&engine.vs_dag * o) * &engine.sys_eig.eigenvectors)
        .collect();

    let grid = |k: usize| T::from_f64(k as f64) * cfg.dt_out;
    let mut times: Vec<T> = Vec::new();
    let mut values: Vec<Vec<T>> = vec![Vec::new(); observables.len()];
    let mut collision_times: Vec<(T, T)> = Vec::with_capacity(cfg.n_collisions);
    let mut k = 0usize;
    let mut seg_start = T::zero();

    for collision in 1..=cfg.n_collisions {
        // Collision window [seg_start, seg_start + τ).
        let rho_tilde = &(&engine.embed * &rho) * &engine.embed_dag;
        let seg_end = seg_start + engine.tau;
        while grid(k) < seg_end {
            let t = grid(k);
            let phases = phase_vector(&engine.joint_eig.eigenvalues, t - seg_start);
            for (o_idx, o_tilde) in o_joint.iter().enumerate() {
                record(sampled_value(o_tilde, &rho_tilde, &phases), t, &mut values[o_idx])?;
            }
            times.push(t);
            k += 1;
        }
        let phases = phase_vector(&engine.joint_eig.eigenvalues, engine.tau);
        let joint_end = &(&engine.joint_eig.eigenvectors * &rotate_to_end(&rho_tilde, &phases))
            * &engine.vj_dag;
        rho = partial_trace_ancilla(&joint_end, engine.d_sys, engine.d_anc);
        state_integrity(&rho).map_err(|detail| DynamicsError::StateDrift { collision, detail })?;
        collision_times.push((seg_start, seg_end));
        seg_start = seg_end;

        // Free window [seg_start, seg_start + θ).
        let theta = sample_waiting_time(cfg.gamma, &mut rng);
        let seg_end = seg_start + theta;
        let rho_tilde = &(&engine.vs_dag * &rho) * &engine.sys_eig.eigenvectors;
        while grid(k) < seg_end {
            let t = grid(k);
            let phases = phase_vector(&engine.sys_eig.eigenvalues, t - seg_start);
            for (o_idx, o_tilde) in o_sys.iter().enumerate() {
                record(sampled_value(o_tilde, &rho_tilde, &phases), t, &mut values[o_idx])?;
            }
            times.push(t);
            k += 1;
        }
        let phases = phase_vector(&engine.sys_eig.eigenvalues, theta);
        rho = &(&engine.sys_eig.eigenvectors * &rotate_to_end(&rho_tilde, &phases))
            * &engine.vs_dag;
        seg_start = seg_end;
    }

    Ok(TimeSeries {
        times,
        values,
        collision_times,
        duration: seg_start,
        end_state: rho,
    })
}

/// Pool for ensemble parallelism. `QPERIODIC_THREADS` caps the worker count
/// (read once, at first use); output never depends on the thread count.
fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Ok(raw) = std::env::var("QPERIODIC_THREADS") {
            if let Ok(n) = raw.trim().parse::<usize>() {
                if n > 0 {
                    builder = builder.num_threads(n);
                }
            }
        }
        builder.build().expect("failed to build trajectory thread pool")
    })
}

/// Run `n_traj` independent trajectories with seeds derived by
/// [`trajectory_seed`], in member order. Trajectories may execute
/// concurrently; the returned order is always member 0, 1, ….
pub fn ensemble_runs<T: Scalar>(
    engine: &CollisionEngine<T>,
    cfg: &TrajectoryConfig<T>,
    n_traj: usize,
    observables: &[Matrix<T>],
) -> Result<Vec<TimeSeries<T>>, DynamicsError> {
    if n_traj == 0 {
        return Err(DynamicsError::InvalidConfig(
            "ensemble needs at least one trajectory".into(),
        ));
    }
    thread_pool().install(|| {
        (0..n_traj)
            .into_par_iter()
            .map(|i| {
                let mut member = cfg.clone();
                member.seed = trajectory_seed(cfg.seed, i as u64);
                run_trajectory(engine, &member, observables)
            })
            .collect()
    })
}

/// Pointwise ensemble mean over [`ensemble_runs`], truncated to the shortest
/// member grid. With `n_traj = 1` this is exactly [`run_trajectory`]. The
/// mean is accumulated sequentially in member order, so the result is
/// bit-for-bit reproducible regardless of how members were scheduled.
pub fn ensemble_average<T: Scalar>(
    engine: &CollisionEngine<T>,
    cfg: &TrajectoryConfig<T>,
    n_traj: usize,
    observables: &[Matrix<T>],
) -> Result<TimeSeries<T>, DynamicsError> {
    let mut runs = ensemble_runs(engine, cfg, n_traj, observables)?;
    if n_traj == 1 {
        return Ok(runs.remove(0));
    }

    let min_len = runs.iter().map(|r| r.times.len()).min().unwrap_or(0);
    let duration = runs
        .iter()
        .map(|r| r.duration)
        .fold(T::infinity(), |a, b| a.min(b));
    let inv = T::one() / T::from_f64(n_traj as f64);

    let mut values = vec![vec![T::zero(); min_len]; observables.len()];
    let mut end_state = Matrix::zeros(engine.d_sys, engine.d_sys);
    for run in &runs {
        for (sum_row, row) in values.iter_mut().zip(run.values.iter()) {
            for (sum, &v) in sum_row.iter_mut().zip(row.iter()) {
                *sum += v;
            }
        }
        end_state = &end_state + &run.end_state;
    }
    for row in &mut values {
        for v in row.iter_mut() {
            *v *= inv;
        }
    }

    Ok(TimeSeries {
        times: runs[0].times[..min_len].to_vec(),
        values,
        collision_times: Vec::new(),
        duration,
        end_state: end_state.scale_re(inv),
    })
}
