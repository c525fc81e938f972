//! Command dispatch: translate a validated configuration into solver calls
//! and deterministic tables.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use logson_core::evolution::{evolve, EvolveOptions};
use logson_core::field::{self, ComplexField};
use logson_core::functionals::{ground_energy_closed_form, log_sobolev_residual};
use logson_core::groundstate::solve_ground_state;
use logson_core::stability::{stability_sweep, StabilityRunSpec};
use logson_core::{Error, GridSpec, Params};

use crate::config::{self, Command, Mode, OutputFormat, RunConfig};
use crate::error::Failure;
use crate::output::{write_outputs, Cell, Table};

/// Everything taken from the command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

/// A warning is printed when the field carries this much relative magnitude
/// at the domain boundary; the periodic Laplacian then no longer approximates
/// the whole-space one.
const BOUNDARY_WARN_RATIO: f64 = 1e-8;

fn warn_boundary(u: &ComplexField) {
    let r = u.boundary_to_peak_ratio();
    if r > BOUNDARY_WARN_RATIO {
        eprintln!(
            "warning: field magnitude at the domain boundary is {r:.1e} of its peak; \
             consider a larger half_extent"
        );
    }
}

type CommandOutcome = (Table, String, Option<String>);

/// Run one command end to end: parse, dispatch, write the table and its
/// metadata sidecar, and return the one-line summary.  Numerical failures
/// (non-convergence, lost finiteness) are reported after the outputs are
/// written so partial tables still land on disk.
pub fn run(inv: &Invocation) -> Result<String, Failure> {
    let loaded = config::load(&inv.config)?;
    let cfg = &loaded.config;
    if cfg.command != inv.command {
        return Err(Failure::validation(format!(
            "command mismatch: the command line says \"{}\" but the config file says \"{}\"",
            inv.command.name(),
            cfg.command.name()
        )));
    }
    let out: PathBuf = inv
        .out
        .clone()
        .or_else(|| cfg.output_path.clone().map(PathBuf::from))
        .ok_or_else(|| {
            Failure::validation("no output path: set output_path in the config or pass --out")
        })?;
    let format = inv.format.or(cfg.output_format).unwrap_or(OutputFormat::Csv);
    let grid = cfg.grid_spec()?;
    let params = cfg.core_params()?;

    let (table, summary, numerical) = match cfg.command {
        Command::Groundstate => run_groundstate(grid, &params, cfg, inv.seed)?,
        Command::Evolve => run_evolve(grid, &params, cfg)?,
        Command::Stability => run_stability(grid, &params, cfg, inv.seed)?,
        Command::Sobolev => run_sobolev(grid, &params, cfg, inv.seed)?,
        Command::Formulas => run_formulas(grid, &params),
    };

    let meta = json!({
        "command": cfg.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "format": format.name(),
        "config": loaded.echo,
        "overrides": {
            "out": inv.out.as_ref().map(|p| p.display().to_string()),
            "format": inv.format.map(OutputFormat::name),
            "seed": inv.seed,
        },
    });
    write_outputs(&out, &table, format, &meta)?;

    match numerical {
        Some(msg) => Err(Failure::numerical(msg)),
        None => Ok(summary),
    }
}

fn run_groundstate(
    grid: GridSpec,
    params: &Params,
    cfg: &RunConfig,
    seed_override: Option<u64>,
) -> Result<CommandOutcome, Failure> {
    let mut section = cfg.solver.unwrap_or_default();
    if let Some(seed) = seed_override {
        section.seed = Some(seed);
    }
    let opts = section.to_options()?;
    let report = solve_ground_state(grid, params, &opts);
    warn_boundary(&report.field);

    let closed = ground_energy_closed_form(params, grid.dim());
    let rel_err = (report.action - closed).abs() / closed;
    let table = Table {
        columns: &[
            "gamma",
            "omega",
            "dim",
            "action",
            "closed_form",
            "nehari_residual",
            "ep_residual",
            "aligned_distance",
            "iters",
        ],
        rows: vec![vec![
            Cell::Float(params.gamma()),
            Cell::Float(params.omega()),
            Cell::Int(grid.dim() as u64),
            Cell::Float(report.action),
            Cell::Float(closed),
            Cell::Float(report.nehari_residual),
            Cell::Float(report.ep_residual),
            Cell::Float(report.aligned_distance),
            Cell::Int(report.iterations as u64),
        ]],
    };
    let numerical = if !report.action.is_finite() {
        Some("ground-state action is not finite".to_string())
    } else if !report.converged {
        Some(format!(
            "ground-state iteration did not converge within {} iterations \
             (gradient residual {:.3e})",
            report.iterations, report.ep_residual
        ))
    } else {
        None
    };
    let summary = format!(
        "groundstate: action={:.10e} closed_form={closed:.10e} rel_err={rel_err:.3e} iters={}",
        report.action, report.iterations
    );
    Ok((table, summary, numerical))
}

fn run_evolve(grid: GridSpec, params: &Params, cfg: &RunConfig) -> Result<CommandOutcome, Failure> {
    let section = cfg.evolve.as_ref().ok_or_else(|| {
        Failure::validation("command \"evolve\" requires an `evolve` section in the config")
    })?;
    let amplitude = section.amplitude.unwrap_or(1.0);
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(Failure::validation(format!(
            "config error at evolve.amplitude: must be finite and positive (got {amplitude})"
        )));
    }
    let mode = section.mode.unwrap_or(Mode::Regularized).to_nonlinear(params);
    let phi = ComplexField::gausson(grid, params, 0.0);
    let u0 = phi.scale(Complex64::new(amplitude, 0.0));
    warn_boundary(&u0);

    let opts = EvolveOptions {
        mode,
        dt: section.dt,
        t_final: section.t_final,
        record_every: section.record_every.unwrap_or(1),
    };
    let record = evolve(&u0, params, &opts, Some(&phi)).map_err(|e| match e {
        Error::NonFinite { last_finite_time } => Failure::numerical(format!(
            "evolution lost finiteness; last finite record at t = {last_finite_time}"
        )),
        other => Failure::validation(format!("config error at evolve: {other}")),
    })?;

    let distance = record
        .orbital_distance
        .as_ref()
        .expect("a reference orbit was supplied");
    let rows = record
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                Cell::Float(t),
                Cell::Float(record.mass[i]),
                Cell::Float(record.energy[i]),
                Cell::Float(record.energy_regularized[i]),
                Cell::Float(distance[i]),
            ]
        })
        .collect();
    let table = Table {
        columns: &["t", "mass", "energy", "energy_m", "orbital_distance"],
        rows,
    };

    let m0 = record.mass[0];
    let mass_drift = record
        .mass
        .iter()
        .map(|m| (m - m0).abs())
        .fold(0.0, f64::max)
        / m0;
    let e0 = record.energy[0];
    let energy_drift = record
        .energy
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max)
        / (1.0 + e0.abs());
    let summary = format!(
        "evolve: records={} mass_drift={mass_drift:.3e} energy_drift={energy_drift:.3e} \
         final_distance={:.3e}",
        record.times.len(),
        distance.last().copied().unwrap_or(f64::NAN)
    );
    Ok((table, summary, None))
}

fn run_stability(
    grid: GridSpec,
    params: &Params,
    cfg: &RunConfig,
    seed_override: Option<u64>,
) -> Result<CommandOutcome, Failure> {
    let section = cfg.stability.as_ref().ok_or_else(|| {
        Failure::validation("command \"stability\" requires a `stability` section in the config")
    })?;
    let spec = StabilityRunSpec {
        perturbation_sizes: section.deltas.clone(),
        kind: section.kind.to_perturbation(),
        mode: section.mode.unwrap_or(Mode::Regularized).to_nonlinear(params),
        horizon: section.horizon,
        dt: section.dt,
        seed: seed_override.or(section.seed).unwrap_or(7),
    };
    warn_boundary(&ComplexField::gausson(grid, params, 0.0));

    let sweep = stability_sweep(grid, params, &spec)
        .map_err(|e| Failure::validation(format!("config error at stability: {e}")))?;

    let rows = sweep
        .rows
        .iter()
        .map(|row| {
            vec![
                Cell::Float(row.delta),
                Cell::Text(section.kind.name().to_string()),
                Cell::Float(row.initial_distance),
                Cell::Float(row.sup_distance),
                Cell::Float(row.ratio),
            ]
        })
        .collect();
    let table = Table {
        columns: &["delta", "kind", "init_dist", "sup_dist", "ratio"],
        rows,
    };

    let numerical = sweep.rows.iter().find(|r| r.failed_at.is_some()).map(|r| {
        format!(
            "stability run for delta = {} lost finiteness; last finite record at t = {}",
            r.delta,
            r.failed_at.unwrap()
        )
    });
    let max_sup = sweep
        .rows
        .iter()
        .filter(|r| r.failed_at.is_none())
        .map(|r| r.sup_distance)
        .fold(f64::NAN, f64::max);
    let summary = format!(
        "stability: rows={} kind={} max_sup_dist={max_sup:.3e}",
        sweep.rows.len(),
        section.kind.name()
    );
    Ok((table, summary, numerical))
}

fn run_sobolev(
    grid: GridSpec,
    params: &Params,
    cfg: &RunConfig,
    seed_override: Option<u64>,
) -> Result<CommandOutcome, Failure> {
    let section = cfg.sobolev.unwrap_or_default();
    let alpha = section.alpha.unwrap_or(1.0);
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Failure::validation(format!(
            "config error at sobolev.alpha: must be finite and positive (got {alpha})"
        )));
    }
    let count = section.count.unwrap_or(200);
    if count == 0 {
        return Err(Failure::validation(
            "config error at sobolev.count: must be at least 1",
        ));
    }
    let seed = seed_override.or(section.seed).unwrap_or(7);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count + 1);
    let mut min_random = f64::INFINITY;
    let mut bad_case: Option<String> = None;
    for i in 1..=count {
        let case = format!("random-{i:03}");
        let width = rng.gen_range(0.7..2.5);
        let u = field::random_smooth_localized(grid, &mut rng, 6, width);
        let amp = Complex64::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(0.0..TAU));
        let residual = log_sobolev_residual(&u.scale(amp), alpha);
        if !residual.is_finite() && bad_case.is_none() {
            bad_case = Some(case.clone());
        }
        min_random = min_random.min(residual);
        rows.push(vec![
            Cell::Text(case),
            Cell::Float(alpha),
            Cell::Float(residual),
        ]);
    }
    // The Gaussian ground profile extremizes the inequality exactly at the
    // γ-matched weight.
    let matched_alpha = (PI / params.gamma()).sqrt();
    let matched = log_sobolev_residual(&ComplexField::gausson(grid, params, 0.0), matched_alpha);
    if !matched.is_finite() && bad_case.is_none() {
        bad_case = Some("matched-gaussian".to_string());
    }
    rows.push(vec![
        Cell::Text("matched-gaussian".to_string()),
        Cell::Float(matched_alpha),
        Cell::Float(matched),
    ]);

    let table = Table {
        columns: &["case", "alpha", "residual"],
        rows,
    };
    let numerical =
        bad_case.map(|case| format!("log-Sobolev residual is not finite for case {case}"));
    let summary = format!(
        "sobolev: rows={} min_random_residual={min_random:.3e} matched_residual={matched:.3e}",
        count + 1
    );
    Ok((table, summary, numerical))
}

fn run_formulas(grid: GridSpec, params: &Params) -> CommandOutcome {
    let dim = grid.dim();
    let d_omega = ground_energy_closed_form(params, dim);
    let gausson_mass = (params.omega() + params.gamma() * dim as f64).exp()
        * (PI / params.gamma()).powf(dim as f64 / 2.0);
    let table = Table {
        columns: &["gamma", "omega", "dim", "d_omega", "gausson_mass"],
        rows: vec![vec![
            Cell::Float(params.gamma()),
            Cell::Float(params.omega()),
            Cell::Int(dim as u64),
            Cell::Float(d_omega),
            Cell::Float(gausson_mass),
        ]],
    };
    let summary = format!("formulas: d_omega={d_omega:.10e} gausson_mass={gausson_mass:.10e}");
    (table, summary, None)
}
