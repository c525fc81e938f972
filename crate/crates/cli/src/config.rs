//! JSON run-configuration schema and its translation into solver types.
//!
//! Unknown keys are rejected (naming the offending key), and invariant
//! violations are reported with the configuration path of the bad field.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::Deserialize;

use logson_core::evolution::NonlinearMode;
use logson_core::groundstate::SolverOptions;
use logson_core::stability::PerturbationKind;
use logson_core::{GridSpec, Params};

use crate::error::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Groundstate,
    Evolve,
    Stability,
    Sobolev,
    Formulas,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Groundstate => "groundstate",
            Command::Evolve => "evolve",
            Command::Stability => "stability",
            Command::Sobolev => "sobolev",
            Command::Formulas => "formulas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Nonlinearity used by the time integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Lipschitz truncation of the logarithm, exact on [1/m, m] with m taken
    /// from `params.reg_index`.
    Regularized,
    /// The untruncated logarithmic nonlinearity.
    ExactLog,
}

impl Mode {
    pub fn to_nonlinear(self, params: &Params) -> NonlinearMode {
        match self {
            Mode::Regularized => NonlinearMode::Regularized(params.reg_index()),
            Mode::ExactLog => NonlinearMode::ExactLog,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AmplitudeScale,
    AdditiveBump,
    PhaseRamp,
}

impl Kind {
    pub fn to_perturbation(self) -> PerturbationKind {
        match self {
            Kind::AmplitudeScale => PerturbationKind::AmplitudeScale,
            Kind::AdditiveBump => PerturbationKind::AdditiveBump,
            Kind::PhaseRamp => PerturbationKind::PhaseRamp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::AmplitudeScale => "amplitude-scale",
            Kind::AdditiveBump => "additive-bump",
            Kind::PhaseRamp => "phase-ramp",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub half_extent: f64,
    pub points_per_axis: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub gamma: f64,
    pub omega: f64,
    /// Truncation index m of the regularized nonlinearity; defaults to 10⁶.
    pub reg_index: Option<u64>,
}

/// Overrides for the ground-state iteration; unset fields keep the solver
/// defaults.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub step_size: Option<f64>,
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub backtracking_factor: Option<f64>,
    pub seed: Option<u64>,
}

impl SolverSection {
    pub fn to_options(self) -> Result<SolverOptions, Failure> {
        let mut opts = SolverOptions::default();
        if let Some(v) = self.step_size {
            if !v.is_finite() || v <= 0.0 {
                return Err(Failure::validation(format!(
                    "config error at solver.step_size: must be finite and positive (got {v})"
                )));
            }
            opts.step_size = v;
        }
        if let Some(v) = self.max_iters {
            if v == 0 {
                return Err(Failure::validation(
                    "config error at solver.max_iters: must be at least 1",
                ));
            }
            opts.max_iters = v;
        }
        if let Some(v) = self.grad_tol {
            if !v.is_finite() || v <= 0.0 {
                return Err(Failure::validation(format!(
                    "config error at solver.grad_tol: must be finite and positive (got {v})"
                )));
            }
            opts.grad_tol = v;
        }
        if let Some(v) = self.backtracking_factor {
            if !(v > 0.0 && v < 1.0) {
                return Err(Failure::validation(format!(
                    "config error at solver.backtracking_factor: must lie strictly between 0 and 1 (got {v})"
                )));
            }
            opts.backtracking_factor = v;
        }
        if let Some(v) = self.seed {
            opts.seed = v;
        }
        Ok(opts)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub dt: f64,
    pub t_final: f64,
    pub mode: Option<Mode>,
    pub record_every: Option<usize>,
    /// Real amplitude multiplying the initial Gaussian profile (default 1);
    /// values ≠ 1 start on the amplitude-shifted exact solution.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub kind: Kind,
    /// Perturbation sizes, nonnegative and sorted ascending.
    pub deltas: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevSection {
    /// Inequality weight for the random-field rows (default 1).
    pub alpha: Option<f64>,
    /// Number of random fields (default 200).
    pub count: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridSection,
    pub params: ParamsSection,
    pub solver: Option<SolverSection>,
    pub evolve: Option<EvolveSection>,
    pub stability: Option<StabilitySection>,
    pub sobolev: Option<SobolevSection>,
    pub output_path: Option<String>,
    pub output_format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn grid_spec(&self) -> Result<GridSpec, Failure> {
        GridSpec::new(self.grid.dim, self.grid.half_extent, self.grid.points_per_axis)
            .map_err(|e| Failure::validation(format!("config error at grid: {e}")))
    }

    pub fn core_params(&self) -> Result<Params, Failure> {
        let reg = self
            .params
            .reg_index
            .unwrap_or(logson_core::params::DEFAULT_REG_INDEX);
        Params::new(self.params.gamma, self.params.omega, reg)
            .map_err(|e| Failure::validation(format!("config error at params: {e}")))
    }
}

/// A parsed configuration together with the raw document for the metadata
/// sidecar.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub echo: serde_json::Value,
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    let echo: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("config is not valid JSON: {e}")))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("config error: {e}")))?;
    Ok(Loaded { config, echo })
}
