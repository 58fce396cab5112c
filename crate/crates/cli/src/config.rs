//! Strict JSON run configuration.
//!
//! The on-disk schema rejects unknown keys outright and reports the path of
//! the offending key. Every leaf is optional; missing values are filled with
//! the standard parameters of the model in question, so an empty model block
//! is a complete, runnable configuration.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// A configuration problem: malformed JSON, an unknown or misplaced key, or a
/// value outside its allowed range. Always maps to exit code 2.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for SchemaError {}

fn err(path: &str, msg: &str) -> SchemaError {
    SchemaError(format!("config error at `{path}`: {msg}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Xxz,
    Ising,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateKind {
    AllUp,
    RandomPure,
}

// ---------------------------------------------------------------------------
// Raw schema: what the file may contain.
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<RawModel>,
    coupling: Option<RawCoupling>,
    trajectory: Option<RawTrajectory>,
    spectrum: Option<RawSpectrum>,
    output_dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(rename = "type")]
    kind: ModelKind,
    m: Option<usize>,
    omega0: Option<f64>,
    delta: Option<f64>,
    b: Option<f64>,
    j: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    gamma: Option<f64>,
    tau: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrajectory {
    gamma: Option<f64>,
    n_collisions: Option<usize>,
    dt_out: Option<f64>,
    seed: Option<u64>,
    n_traj: Option<usize>,
    initial_state: Option<InitialStateKind>,
    observables: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    t_star: Option<f64>,
    omega_max: Option<f64>,
    n_bins: Option<usize>,
    omega_min: Option<f64>,
    k_threshold: Option<f64>,
}

// ---------------------------------------------------------------------------
// Resolved configuration: every value concrete; echoed into the manifest.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelConfig {
    Xxz { m: usize, omega0: f64, delta: f64 },
    Ising { m: usize, b: f64, j: f64, alpha: f64 },
}

impl ModelConfig {
    pub fn sites(&self) -> usize {
        match *self {
            ModelConfig::Xxz { m, .. } | ModelConfig::Ising { m, .. } => m,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingConfig {
    /// Dissipation strength Γ; the interaction strength is `g = √(Γ/4τ)`.
    pub gamma: f64,
    /// Collision duration τ.
    pub tau: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryBlock {
    /// Waiting-time rate γ of `p(θ) = γ e^{−γθ}`.
    pub gamma: f64,
    pub n_collisions: usize,
    pub dt_out: f64,
    pub seed: u64,
    pub n_traj: usize,
    pub initial_state: InitialStateKind,
    pub observables: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumBlock {
    pub t_star: f64,
    pub omega_max: f64,
    pub n_bins: usize,
    /// Lower edge of the peak search; `null` means the two-bin default.
    pub omega_min: Option<f64>,
    pub k_threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub model: ModelConfig,
    pub coupling: CouplingConfig,
    pub trajectory: TrajectoryBlock,
    pub spectrum: SpectrumBlock,
    pub output_dir: String,
}

/// Read, schema-check, and resolve a configuration file.
pub fn parse_config(path: &Path) -> Result<Config, SchemaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SchemaError(format!("cannot read config {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| SchemaError(format!("config error at `{}`: {}", e.path(), e.inner())))?;
    resolve(raw)
}

fn require_positive(path: &str, v: f64) -> Result<f64, SchemaError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(err(path, "must be a positive finite number"))
    }
}

fn resolve(raw: RawConfig) -> Result<Config, SchemaError> {
    let raw_model = raw.model.unwrap_or(RawModel {
        kind: ModelKind::Xxz,
        m: None,
        omega0: None,
        delta: None,
        b: None,
        j: None,
        alpha: None,
    });

    let model = match raw_model.kind {
        ModelKind::Xxz => {
            for (key, set) in [
                ("model.b", raw_model.b.is_some()),
                ("model.j", raw_model.j.is_some()),
                ("model.alpha", raw_model.alpha.is_some()),
            ] {
                if set {
                    return Err(err(key, "only applies to the long-range chain (type \"ising\")"));
                }
            }
            let m = raw_model.m.unwrap_or(4);
            if m < 3 {
                return Err(err("model.m", "ring needs at least 3 sites"));
            }
            ModelConfig::Xxz {
                m,
                omega0: raw_model.omega0.unwrap_or(1.0),
                delta: raw_model.delta.unwrap_or(0.5),
            }
        }
        ModelKind::Ising => {
            for (key, set) in [
                ("model.omega0", raw_model.omega0.is_some()),
                ("model.delta", raw_model.delta.is_some()),
            ] {
                if set {
                    return Err(err(key, "only applies to the ring (type \"xxz\")"));
                }
            }
            let m = raw_model.m.unwrap_or(7);
            if m < 2 {
                return Err(err("model.m", "chain needs at least 2 sites"));
            }
            if m % 2 == 0 {
                return Err(err("model.m", "chain length must be odd so the central site exists"));
            }
            let j = require_positive("model.j", raw_model.j.unwrap_or(1.0))?;
            ModelConfig::Ising {
                m,
                b: raw_model.b.unwrap_or(5.0 * j),
                j,
                alpha: require_positive("model.alpha", raw_model.alpha.unwrap_or(1.1))?,
            }
        }
    };

    // Standard parameters: for the ring, Γ = 1, τ = 1, and waiting rate
    // γ = 0.5 (peak frequencies do not depend on Γ); for the chain, Γ = 4J,
    // τJ = 0.5, and γτ = 0.5.
    let raw_coupling = raw.coupling.unwrap_or_default();
    let coupling = match model {
        ModelConfig::Xxz { .. } => CouplingConfig {
            gamma: require_positive("coupling.gamma", raw_coupling.gamma.unwrap_or(1.0))?,
            tau: require_positive("coupling.tau", raw_coupling.tau.unwrap_or(1.0))?,
        },
        ModelConfig::Ising { j, .. } => {
            let tau = require_positive("coupling.tau", raw_coupling.tau.unwrap_or(0.5 / j))?;
            CouplingConfig {
                gamma: require_positive("coupling.gamma", raw_coupling.gamma.unwrap_or(4.0 * j))?,
                tau,
            }
        }
    };

    let raw_traj = raw.trajectory.unwrap_or_default();
    let default_wait_rate = match model {
        ModelConfig::Xxz { .. } => 0.5,
        ModelConfig::Ising { .. } => 0.5 / coupling.tau,
    };
    let default_observables = match model {
        ModelConfig::Xxz { m, .. } => (1..=m).map(|k| format!("sx{k}")).collect(),
        ModelConfig::Ising { .. } => vec!["imbalance".to_string()],
    };
    let trajectory = TrajectoryBlock {
        gamma: require_positive("trajectory.gamma", raw_traj.gamma.unwrap_or(default_wait_rate))?,
        n_collisions: match raw_traj.n_collisions.unwrap_or(match model {
            ModelConfig::Xxz { .. } => 400,
            ModelConfig::Ising { .. } => 300,
        }) {
            0 => return Err(err("trajectory.n_collisions", "need at least one collision")),
            n => n,
        },
        dt_out: require_positive(
            "trajectory.dt_out",
            raw_traj.dt_out.unwrap_or(match model {
                ModelConfig::Xxz { .. } => 0.25,
                ModelConfig::Ising { .. } => 0.1,
            }),
        )?,
        seed: raw_traj.seed.unwrap_or(1),
        n_traj: match raw_traj.n_traj.unwrap_or(1) {
            0 => return Err(err("trajectory.n_traj", "need at least one trajectory")),
            n => n,
        },
        initial_state: raw_traj.initial_state.unwrap_or(InitialStateKind::RandomPure),
        observables: raw_traj.observables.unwrap_or(default_observables),
    };
    if trajectory.observables.is_empty() {
        return Err(err("trajectory.observables", "need at least one observable"));
    }
    for (i, name) in trajectory.observables.iter().enumerate() {
        validate_observable_name(name, model.sites())
            .map_err(|msg| err(&format!("trajectory.observables[{i}]"), &msg))?;
    }

    let raw_spec = raw.spectrum.unwrap_or_default();
    let spectrum = SpectrumBlock {
        t_star: match raw_spec.t_star.unwrap_or(match model {
            ModelConfig::Xxz { .. } => 250.0,
            ModelConfig::Ising { j, .. } => 100.0 / j,
        }) {
            t if t >= 0.0 && t.is_finite() => t,
            _ => return Err(err("spectrum.t_star", "must be a non-negative finite number")),
        },
        omega_max: require_positive(
            "spectrum.omega_max",
            raw_spec.omega_max.unwrap_or(match model {
                ModelConfig::Xxz { .. } => 4.0,
                ModelConfig::Ising { .. } => 14.0,
            }),
        )?,
        n_bins: match raw_spec.n_bins.unwrap_or(match model {
            ModelConfig::Xxz { .. } => 512,
            ModelConfig::Ising { .. } => 700,
        }) {
            0 => return Err(err("spectrum.n_bins", "need at least one frequency bin")),
            n => n,
        },
        omega_min: match (raw_spec.omega_min, &model) {
            (Some(w), _) if w >= 0.0 && w.is_finite() => Some(w),
            (Some(_), _) => {
                return Err(err("spectrum.omega_min", "must be a non-negative finite number"))
            }
            // The chain's imbalance carries slow drift; keep the peak search
            // clear of it by default.
            (None, ModelConfig::Ising { .. }) => Some(1.0),
            (None, ModelConfig::Xxz { .. }) => None,
        },
        k_threshold: require_positive("spectrum.k_threshold", raw_spec.k_threshold.unwrap_or(10.0))?,
    };
    if let Some(w) = spectrum.omega_min {
        if w >= spectrum.omega_max {
            return Err(err("spectrum.omega_min", "must lie below omega_max"));
        }
    }

    Ok(Config {
        model,
        coupling,
        trajectory,
        spectrum,
        output_dir: raw.output_dir.unwrap_or_else(|| "out".to_string()),
    })
}

/// Observable names: `sx<k>`, `sy<k>`, `sz<k>` with a 1-based site index,
/// `total_sz`, `excitation`, or `imbalance`.
pub fn validate_observable_name(name: &str, sites: usize) -> Result<(), String> {
    match name {
        "total_sz" | "excitation" | "imbalance" => return Ok(()),
        _ => {}
    }
    if let Some(rest) = name
        .strip_prefix("sx")
        .or_else(|| name.strip_prefix("sy"))
        .or_else(|| name.strip_prefix("sz"))
    {
        return match rest.parse::<usize>() {
            Ok(k) if (1..=sites).contains(&k) => Ok(()),
            Ok(k) => Err(format!("site {k} outside 1..={sites}")),
            Err(_) => Err(format!("cannot parse site index in `{name}`")),
        };
    }
    Err(format!(
        "unknown observable `{name}` (expected sx<k>/sy<k>/sz<k>, total_sz, excitation, or imbalance)"
    ))
}
