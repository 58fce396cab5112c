//! Command implementations: assemble the configured model, run the requested
//! computation, and write every output file in a single pass at the end of
//! the run.
//!
//! All numeric output uses the shortest round-trip decimal representation of
//! 64-bit floats, so re-running a command with the same config and seed
//! reproduces every CSV and JSON payload byte for byte (only the manifest's
//! wall-time field differs).

use crate::config::{Config, InitialStateKind, ModelConfig, SchemaError};
use num_complex::Complex;
use qperiodic_core::channels::{
    choi_from_kraus, choi_report, collision_channel, composite, fixed_point_dimension,
    stationary_state_exact, superoperator_matrix,
};
use qperiodic_core::dynamics::{
    ensemble_average, run_trajectory, trajectory_seed, CollisionEngine, InitialState, TimeSeries,
    TrajectoryConfig,
};
use qperiodic_core::linalg::Matrix;
use qperiodic_core::models::{
    ancilla_ground, build_ising, build_sa_ising, build_sa_xxz, build_xxz, imbalance_operator,
    pauli_site, total_sz, xi_operators, CouplingParams, IsingParams, PauliAxis, XxzParams,
};
use qperiodic_core::spectra::{default_omega_min, dominant_peak, windowed_fourier};
use qperiodic_core::symmetry::{
    default_tau_grid, full_symmetry_report, DEFAULT_TOL_CONDITION_I, DEFAULT_TOL_CONDITION_II,
};
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

type M = Matrix<f64>;

/// Top-level failure classes, matching the exit-code contract: configuration
/// problems exit 2, anything that goes wrong while computing exits 1.
#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Runtime(String),
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e.0)
    }
}

macro_rules! runtime_from {
    ($($ty:ty),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Runtime(e.to_string())
            }
        })*
    };
}

runtime_from!(
    qperiodic_core::channels::ChannelError,
    qperiodic_core::dynamics::DynamicsError,
    qperiodic_core::linalg::LinalgError,
    qperiodic_core::models::ModelError,
    qperiodic_core::spectra::SpectraError,
    qperiodic_core::symmetry::SymmetryError,
    std::io::Error,
);

// ---------------------------------------------------------------------------
// Shared assembly
// ---------------------------------------------------------------------------

pub struct BuiltModel {
    pub h_sys: M,
    pub h_anc: M,
    pub h_int: M,
    pub sites: usize,
}

pub fn build_model(cfg: &Config) -> Result<BuiltModel, CliError> {
    let coupling = CouplingParams {
        gamma: cfg.coupling.gamma,
        tau: cfg.coupling.tau,
    };
    let (h_sys, h_int, sites) = match cfg.model {
        ModelConfig::Xxz { m, omega0, delta } => {
            let params = XxzParams { m, omega0, delta };
            (build_xxz(&params)?, build_sa_xxz(&coupling, m)?, m)
        }
        ModelConfig::Ising { m, b, j, alpha } => {
            let params = IsingParams { m, b, j, alpha };
            (build_ising(&params)?, build_sa_ising(&params, &coupling)?, m)
        }
    };
    Ok(BuiltModel {
        h_sys,
        h_anc: M::zeros(2, 2),
        h_int,
        sites,
    })
}

/// Fresh-ancilla pure state as an amplitude vector.
fn ancilla_vector() -> Vec<Complex<f64>> {
    vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]
}

/// Build the operator behind an observable name (validated at parse time).
pub fn build_observable(name: &str, sites: usize) -> Result<M, CliError> {
    let dim = 1usize << sites;
    match name {
        "total_sz" => Ok(total_sz(sites)?),
        "imbalance" => Ok(imbalance_operator(sites)?),
        "excitation" => {
            let half = 0.5;
            Ok(&total_sz::<f64>(sites)?.scale_re(half) + &M::identity(dim).scale_re(half * sites as f64))
        }
        _ => {
            let (axis, rest) = if let Some(r) = name.strip_prefix("sx") {
                (PauliAxis::X, r)
            } else if let Some(r) = name.strip_prefix("sy") {
                (PauliAxis::Y, r)
            } else if let Some(r) = name.strip_prefix("sz") {
                (PauliAxis::Z, r)
            } else {
                return Err(CliError::Schema(format!("unknown observable `{name}`")));
            };
            let site: usize = rest
                .parse()
                .map_err(|_| CliError::Schema(format!("unknown observable `{name}`")))?;
            Ok(pauli_site(axis, site, sites)?)
        }
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a Config,
    #[serde(skip_serializing_if = "Option::is_none")]
    seeds: Option<Vec<u64>>,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    collision_windows: Option<Vec<(f64, f64)>>,
    wall_time_s: f64,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_manifest(
    cfg: &Config,
    command: &str,
    seeds: Option<Vec<u64>>,
    outputs: Vec<String>,
    duration: Option<f64>,
    collision_windows: Option<Vec<(f64, f64)>>,
    started: Instant,
) -> Result<(), CliError> {
    let manifest = Manifest {
        tool: "qperiodic",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        seeds,
        outputs,
        duration,
        collision_windows,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    write_json(Path::new(&cfg.output_dir), "manifest.json", &manifest)
}

fn csv_two_columns(header: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut text = String::with_capacity(24 * xs.len() + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for (x, y) in xs.iter().zip(ys.iter()) {
        text.push_str(&format!("{x},{y}\n"));
    }
    text
}

fn ensure_output_dir(cfg: &Config) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub fn simulate(cfg: &Config) -> Result<(), CliError> {
    let started = Instant::now();
    let model = build_model(cfg)?;
    let engine = CollisionEngine::new(
        &model.h_sys,
        &model.h_anc,
        &model.h_int,
        &ancilla_vector(),
        cfg.coupling.tau,
    )?;

    let names = &cfg.trajectory.observables;
    let observables: Vec<M> = names
        .iter()
        .map(|n| build_observable(n, model.sites))
        .collect::<Result<_, _>>()?;

    let core_cfg = TrajectoryConfig {
        gamma: cfg.trajectory.gamma,
        n_collisions: cfg.trajectory.n_collisions,
        dt_out: cfg.trajectory.dt_out,
        seed: cfg.trajectory.seed,
        initial: match cfg.trajectory.initial_state {
            InitialStateKind::AllUp => InitialState::AllUp,
            InitialStateKind::RandomPure => InitialState::RandomPure,
        },
    };
    let n_traj = cfg.trajectory.n_traj;
    let series: TimeSeries<f64> = if n_traj == 1 {
        run_trajectory(&engine, &core_cfg, &observables)?
    } else {
        ensemble_average(&engine, &core_cfg, n_traj, &observables)?
    };

    ensure_output_dir(cfg)?;
    let dir = Path::new(&cfg.output_dir);
    let mut outputs = Vec::with_capacity(names.len());
    for (name, row) in names.iter().zip(series.values.iter()) {
        let file = format!("{name}.csv");
        std::fs::write(dir.join(&file), csv_two_columns("t,value", &series.times, row))?;
        outputs.push(file);
    }
    let seeds: Vec<u64> = (0..n_traj)
        .map(|i| trajectory_seed(cfg.trajectory.seed, i as u64))
        .collect();
    let windows = (n_traj == 1).then(|| series.collision_times.clone());
    write_manifest(
        cfg,
        "simulate",
        Some(seeds),
        outputs.clone(),
        Some(series.duration),
        windows,
        started,
    )?;
    for file in &outputs {
        println!("wrote {}", dir.join(file).display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify-symmetry
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonComplex {
    re: f64,
    im: f64,
}

impl From<Complex<f64>> for JsonComplex {
    fn from(z: Complex<f64>) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct JsonStepCheck {
    tau: f64,
    theta: f64,
    multiplier: JsonComplex,
    residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct JsonModeReport {
    lambda_expected: f64,
    lambda: JsonComplex,
    condition_i_residual: f64,
    condition_i_pass: bool,
    per_tau_residuals: Vec<(f64, f64)>,
    condition_ii_max_residual: f64,
    condition_ii_pass: bool,
    step_checks: Vec<JsonStepCheck>,
    pass: bool,
}

#[derive(Serialize)]
struct JsonSymmetryReport {
    pass: bool,
    modes: Vec<JsonModeReport>,
}

/// Check both symmetry conditions and the one-step eigenoperator relation for
/// the 4-site ring; returns whether every check passed.
pub fn verify_symmetry(cfg: &Config) -> Result<bool, CliError> {
    let started = Instant::now();
    let (omega0, delta) = match cfg.model {
        ModelConfig::Xxz { m: 4, omega0, delta } => (omega0, delta),
        _ => {
            return Err(CliError::Schema(
                "verify-symmetry requires the 4-site ring (model.type = \"xxz\", m = 4)".into(),
            ))
        }
    };
    let params = XxzParams { m: 4, omega0, delta };
    let h_sys = build_xxz(&params)?;
    let modes = xi_operators(&params)?;
    let h_anc = M::zeros(2, 2);
    let gamma_diss = cfg.coupling.gamma;
    let factory = move |tau: f64| {
        let h = build_xxz(&params).expect("parameters validated at parse time");
        let h_int = build_sa_xxz(&CouplingParams { gamma: gamma_diss, tau }, 4)
            .expect("parameters validated at parse time");
        collision_channel(&h, &M::zeros(2, 2), &h_int, &ancilla_ground(), tau)
    };

    // Reference state: exact fixed point of one full step at the configured τ
    // and the mean waiting time.
    let base_tau = cfg.coupling.tau;
    let theta_ref = 1.0 / cfg.trajectory.gamma;
    let channel = collision_channel(&h_sys, &h_anc, &model_h_int(cfg, base_tau)?, &ancilla_ground(), base_tau)?;
    let map = composite(&channel, &h_sys, theta_ref)?;
    let omega = stationary_state_exact(&map.superoperator_matrix())?;

    let tau_grid = default_tau_grid(base_tau);
    let steps = [
        (base_tau, 0.25 * theta_ref),
        (base_tau / 2.0, 1.3 * theta_ref),
        (2.0 * base_tau, 0.05 * theta_ref),
        (base_tau, theta_ref),
    ];
    let report = full_symmetry_report(
        &factory,
        &h_sys,
        &modes,
        &omega,
        &tau_grid,
        &steps,
        DEFAULT_TOL_CONDITION_I,
        DEFAULT_TOL_CONDITION_II,
    )?;

    let json = JsonSymmetryReport {
        pass: report.pass,
        modes: report
            .modes
            .iter()
            .map(|mode| JsonModeReport {
                lambda_expected: mode.lambda_expected,
                lambda: mode.condition_i.lambda.into(),
                condition_i_residual: mode.condition_i.residual,
                condition_i_pass: mode.condition_i.pass,
                per_tau_residuals: mode.condition_ii.per_tau.clone(),
                condition_ii_max_residual: mode.condition_ii.max_residual,
                condition_ii_pass: mode.condition_ii.pass,
                step_checks: steps
                    .iter()
                    .zip(mode.eigen_evolution.iter())
                    .map(|(&(tau, theta), step)| JsonStepCheck {
                        tau,
                        theta,
                        multiplier: step.multiplier.into(),
                        residual: step.residual,
                        pass: step.pass,
                    })
                    .collect(),
                pass: mode.pass,
            })
            .collect(),
    };

    ensure_output_dir(cfg)?;
    write_json(Path::new(&cfg.output_dir), "symmetry_report.json", &json)?;
    write_manifest(
        cfg,
        "verify-symmetry",
        None,
        vec!["symmetry_report.json".into()],
        None,
        None,
        started,
    )?;
    println!(
        "symmetry checks {} ({} modes); report in {}/symmetry_report.json",
        if report.pass { "passed" } else { "FAILED" },
        json.modes.len(),
        cfg.output_dir
    );
    Ok(report.pass)
}

fn model_h_int(cfg: &Config, tau: f64) -> Result<M, CliError> {
    let coupling = CouplingParams {
        gamma: cfg.coupling.gamma,
        tau,
    };
    Ok(match cfg.model {
        ModelConfig::Xxz { m, .. } => build_sa_xxz(&coupling, m)?,
        ModelConfig::Ising { m, b, j, alpha } => {
            build_sa_ising(&IsingParams { m, b, j, alpha }, &coupling)?
        }
    })
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PeakReportJson {
    input: String,
    t_star: f64,
    omega_min: f64,
    k_threshold: f64,
    omega_peak: f64,
    amplitude: f64,
    prominence: f64,
    oscillating: bool,
}

fn read_series_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read input {}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let pair = (fields.next(), fields.next());
        if fields.next().is_some() {
            return Err(CliError::Schema(format!(
                "{}:{}: expected two comma-separated columns",
                path.display(),
                idx + 1
            )));
        }
        match pair {
            (Some(a), Some(b)) => match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    values.push(v);
                }
                _ if idx == 0 => continue, // header row
                _ => {
                    return Err(CliError::Schema(format!(
                        "{}:{}: cannot parse `{line}` as two numbers",
                        path.display(),
                        idx + 1
                    )))
                }
            },
            _ => {
                return Err(CliError::Schema(format!(
                    "{}:{}: expected two comma-separated columns",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    Ok((times, values))
}

pub fn spectrum(input: &Path, cfg: &Config) -> Result<(), CliError> {
    let started = Instant::now();
    let (times, values) = read_series_csv(input)?;
    let spec = windowed_fourier(
        &times,
        &values,
        cfg.spectrum.t_star,
        cfg.spectrum.omega_max,
        cfg.spectrum.n_bins,
    )?;
    let omega_min = cfg.spectrum.omega_min.unwrap_or_else(|| default_omega_min(&spec));
    let peak = dominant_peak(&spec, omega_min);
    let oscillating = peak.prominence > cfg.spectrum.k_threshold;

    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("series");
    let spectrum_file = format!("spectrum_{stem}.csv");

    ensure_output_dir(cfg)?;
    let dir = Path::new(&cfg.output_dir);
    std::fs::write(
        dir.join(&spectrum_file),
        csv_two_columns("omega,amplitude", &spec.omegas, &spec.amplitudes),
    )?;
    let report = PeakReportJson {
        input: input.display().to_string(),
        t_star: cfg.spectrum.t_star,
        omega_min,
        k_threshold: cfg.spectrum.k_threshold,
        omega_peak: peak.omega,
        amplitude: peak.amplitude,
        prominence: peak.prominence,
        oscillating,
    };
    write_json(dir, "peak_report.json", &report)?;
    write_manifest(
        cfg,
        "spectrum",
        None,
        vec![spectrum_file.clone(), "peak_report.json".into()],
        None,
        None,
        started,
    )?;
    println!(
        "dominant peak at omega = {} (prominence {}); {}",
        peak.omega,
        peak.prominence,
        if oscillating { "oscillating" } else { "no clear oscillation" }
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// channel-info
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ChannelReportJson {
    dim: usize,
    tau: f64,
    n_kraus: usize,
    trace_preservation_residual: f64,
    /// Detailed fields are computed only when the system dimension is at most
    /// 32; beyond that the superoperator-level objects get impractically big.
    detail: Option<ChannelDetailJson>,
}

#[derive(Serialize)]
struct ChannelDetailJson {
    choi_min_eigenvalue: f64,
    is_completely_positive: bool,
    fixed_point_dimension: usize,
    /// Channel fixed point reached from the maximally mixed state, as rows of
    /// `[re, im]` pairs.
    stationary_state: Vec<Vec<[f64; 2]>>,
}

pub fn channel_info(cfg: &Config) -> Result<(), CliError> {
    let started = Instant::now();
    let model = build_model(cfg)?;
    let channel = collision_channel(
        &model.h_sys,
        &model.h_anc,
        &model.h_int,
        &ancilla_ground(),
        cfg.coupling.tau,
    )?;

    let detail = if channel.dim <= 32 {
        let choi = choi_from_kraus(&channel);
        let cp = choi_report(&choi)?;
        let s = superoperator_matrix(&channel);
        let omega = stationary_state_exact(&s)?;
        Some(ChannelDetailJson {
            choi_min_eigenvalue: cp.min_eig,
            is_completely_positive: cp.is_cp,
            fixed_point_dimension: fixed_point_dimension(&s)?,
            stationary_state: (0..omega.rows())
                .map(|i| (0..omega.cols()).map(|j| [omega[(i, j)].re, omega[(i, j)].im]).collect())
                .collect(),
        })
    } else {
        None
    };

    let report = ChannelReportJson {
        dim: channel.dim,
        tau: cfg.coupling.tau,
        n_kraus: channel.kraus.len(),
        trace_preservation_residual: channel.tp_residual(),
        detail,
    };

    ensure_output_dir(cfg)?;
    write_json(Path::new(&cfg.output_dir), "channel_report.json", &report)?;
    write_manifest(
        cfg,
        "channel-info",
        None,
        vec!["channel_report.json".into()],
        None,
        None,
        started,
    )?;
    println!(
        "channel on dimension {} with {} Kraus operators; report in {}/channel_report.json",
        report.dim, report.n_kraus, cfg.output_dir
    );
    Ok(())
}
