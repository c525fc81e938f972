//! Time integration by Strang splitting.
//!
//! The flow i∂ₜu = −Δu + γ(γ−1)|x|²u − u·Log|u|² splits into two parts that
//! are each solvable in closed form:
//!
//! * the kinetic flow i∂ₜu = −Δu, a unit-modulus multiplier e^{−i|k|²t} on
//!   each Fourier mode;
//! * the potential/nonlinear flow i∂ₜu = (V(x) − Log|u|²)u, which leaves
//!   |u| pointwise constant and therefore reduces to the exact phase factor
//!   e^{−it(V − Log|u₀|²)}.
//!
//! A step is the symmetric composition: half kinetic, full phase, half
//! kinetic, giving second-order accuracy, exact mass conservation up to
//! roundoff, and exact time reversibility (a stepper built with −dt undoes
//! one built with dt).  The logarithm in the phase can be replaced by the
//! saturated multiplier of the regularized nonlinearity, selected through
//! [`NonlinearMode`].

use num_complex::Complex64;

use crate::error::Error;
use crate::field::{self, ComplexField};
use crate::functionals::{self, LOG_FLOOR};
use crate::grid::GridSpec;
use crate::groundstate::align_phase;
use crate::params::Params;
use crate::regularization::{self, RegularizedNonlinearity};
use crate::spectral;

/// Which multiplier enters the nonlinear phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearMode {
    /// Saturated multiplier (b̃_m − ã_m)(|u|) of the given index.
    Regularized(u64),
    /// The plain logarithm Log|u|², floored where |u|² underflows.
    ExactLog,
}

/// One Strang step of fixed size; precomputes the kinetic phase table and
/// the potential samples.  Build a second stepper with `−dt` to integrate
/// backward.
pub struct StrangStepper {
    grid: GridSpec,
    dt: f64,
    kinetic_half: Vec<Complex64>,
    v_table: Vec<f64>,
    reg: Option<RegularizedNonlinearity>,
}

impl StrangStepper {
    /// `dt` may have either sign but must be finite and nonzero.
    pub fn new(grid: GridSpec, params: &Params, mode: NonlinearMode, dt: f64) -> Result<Self, Error> {
        if !dt.is_finite() || dt == 0.0 {
            return Err(Error::InvalidDt(dt));
        }
        let kinetic_half = grid
            .wavenumber_sq_table()
            .iter()
            .map(|k2| Complex64::from_polar(1.0, -k2 * dt / 2.0))
            .collect();
        let c = params.potential_coupling();
        let v_table = grid.radius_sq_table().iter().map(|r2| c * r2).collect();
        let reg = match mode {
            NonlinearMode::Regularized(m) => Some(RegularizedNonlinearity::new(m)),
            NonlinearMode::ExactLog => None,
        };
        Ok(StrangStepper { grid, dt, kinetic_half, v_table, reg })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn half_kinetic(&self, values: &mut Vec<Complex64>) {
        spectral::forward_nd(&self.grid, values);
        for (z, ph) in values.iter_mut().zip(&self.kinetic_half) {
            *z *= ph;
        }
        spectral::inverse_nd(&self.grid, values);
    }

    fn multiplier(&self, p: f64) -> f64 {
        match &self.reg {
            Some(reg) => reg.multiplier_from_sq(p),
            None => {
                if p >= LOG_FLOOR {
                    p.ln()
                } else {
                    0.0
                }
            }
        }
    }

    /// Advance one step of `dt`.
    pub fn step(&self, u: &ComplexField) -> ComplexField {
        let mut values = u.values().to_vec();
        self.half_kinetic(&mut values);
        for (z, v) in values.iter_mut().zip(&self.v_table) {
            let h = self.multiplier(z.norm_sqr());
            *z *= Complex64::from_polar(1.0, self.dt * (h - v));
        }
        self.half_kinetic(&mut values);
        ComplexField::from_raw(self.grid, values)
    }
}

/// Controls for [`evolve`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub mode: NonlinearMode,
    /// Step size; must be positive.
    pub dt: f64,
    /// Integration horizon; the number of steps is round(t_final/dt).
    pub t_final: f64,
    /// Record diagnostics every this many steps (the initial state and the
    /// final step are always recorded).
    pub record_every: usize,
}

/// Diagnostics sampled along a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub energy_regularized: Vec<f64>,
    /// Σ-distance to the reference orbit (minimized over a global phase),
    /// present when a reference field was supplied.
    pub orbital_distance: Option<Vec<f64>>,
    pub final_field: ComplexField,
}

/// Integrate `u0` to `t_final`, recording mass, energy, regularized energy,
/// and (given a `reference`) the phase-minimized Σ-distance to it.
///
/// The recorded quantities are checked at every record time; if any is no
/// longer finite the run aborts with the last time at which everything was
/// still finite (−∞ when the initial state already fails the check).
pub fn evolve(
    u0: &ComplexField,
    params: &Params,
    opts: &EvolveOptions,
    reference: Option<&ComplexField>,
) -> Result<TrajectoryRecord, Error> {
    if !(opts.dt.is_finite() && opts.dt > 0.0) {
        return Err(Error::InvalidDt(opts.dt));
    }
    if !(opts.t_final.is_finite() && opts.t_final >= opts.dt) {
        return Err(Error::InvalidHorizon(opts.t_final));
    }
    if opts.record_every == 0 {
        return Err(Error::InvalidRecordEvery);
    }
    let steps = (opts.t_final / opts.dt).round() as usize;
    let stepper = StrangStepper::new(*u0.grid(), params, opts.mode, opts.dt)?;

    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        mass: Vec::new(),
        energy: Vec::new(),
        energy_regularized: Vec::new(),
        orbital_distance: reference.map(|_| Vec::new()),
        final_field: u0.clone(),
    };
    let mut last_finite_time = f64::NEG_INFINITY;
    let mut record = |u: &ComplexField, t: f64, rec: &mut TrajectoryRecord| -> Result<(), Error> {
        // A NaN or infinite value anywhere contaminates the mass sum, so this
        // check also guards the regularized-energy evaluation below, whose
        // closed-form integrals reject non-finite moduli.
        let r = functionals::report(u, params);
        if !(r.mass.is_finite() && r.energy.is_finite()) {
            return Err(Error::NonFinite { last_finite_time });
        }
        let em = regularization::energy_regularized_with(u, params, reg_index_for(opts.mode, params));
        let dist = reference.map(|f| align_phase(u, f).distance);
        let mut finite = em.is_finite();
        if let Some(d) = dist {
            finite &= d.is_finite();
        }
        if !finite {
            return Err(Error::NonFinite { last_finite_time });
        }
        last_finite_time = t;
        rec.times.push(t);
        rec.mass.push(r.mass);
        rec.energy.push(r.energy);
        rec.energy_regularized.push(em);
        if let (Some(col), Some(d)) = (rec.orbital_distance.as_mut(), dist) {
            col.push(d);
        }
        Ok(())
    };

    let mut u = u0.clone();
    record(&u, 0.0, &mut rec)?;
    for step in 1..=steps {
        u = stepper.step(&u);
        if step % opts.record_every == 0 || step == steps {
            record(&u, step as f64 * opts.dt, &mut rec)?;
        }
    }
    rec.final_field = u;
    Ok(rec)
}

fn reg_index_for(mode: NonlinearMode, params: &Params) -> u64 {
    match mode {
        NonlinearMode::Regularized(m) => m,
        NonlinearMode::ExactLog => params.reg_index(),
    }
}

/// One row of a step-size refinement study.
#[derive(Debug, Clone, Copy)]
pub struct StudyRow {
    pub dt: f64,
    /// L² distance at the horizon from the run with the finest step.
    pub l2_error: f64,
}

/// Result of integrating the same initial state with several step sizes.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    /// One row per step size except the finest, coarsest first.
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of log error against log dt.
    pub fitted_order: f64,
}

/// Integrate `u0` to `t_final` once per entry of `dt_list` (which must be
/// strictly decreasing, with every step dividing the horizon) and measure
/// terminal L² errors against the finest run.
pub fn convergence_study(
    u0: &ComplexField,
    params: &Params,
    mode: NonlinearMode,
    t_final: f64,
    dt_list: &[f64],
) -> Result<ConvergenceStudy, Error> {
    if dt_list.len() < 3 {
        return Err(Error::TooFewDts { min: 3, got: dt_list.len() });
    }
    for pair in dt_list.windows(2) {
        if !(pair[0] > pair[1]) {
            return Err(Error::InvalidDtList);
        }
    }
    for &dt in dt_list {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidDtList);
        }
        let steps = (t_final / dt).round();
        if steps < 1.0 || (steps * dt - t_final).abs() > 1e-9 * t_final {
            return Err(Error::InvalidDtList);
        }
    }

    let mut finals = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        let stepper = StrangStepper::new(*u0.grid(), params, mode, dt)?;
        let steps = (t_final / dt).round() as usize;
        let mut u = u0.clone();
        for _ in 0..steps {
            u = stepper.step(&u);
        }
        finals.push(u);
    }

    let reference = finals.last().unwrap();
    let mut rows = Vec::new();
    for (i, u) in finals.iter().enumerate().take(dt_list.len() - 1) {
        let diff = u.add_scaled(Complex64::new(-1.0, 0.0), reference);
        let err = field::inner_l2(&diff, &diff).re.max(0.0).sqrt();
        rows.push(StudyRow { dt: dt_list[i], l2_error: err });
    }

    // Least-squares slope of ln(err) on ln(dt).  Rows within 4× of the
    // reference step are excluded from the fit (not from the table): there
    // the shared-reference bias err ≈ C·(dt² − dt_ref²) skews the slope by
    // several percent.
    let dt_ref = *dt_list.last().unwrap();
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.dt >= 4.0 * dt_ref)
        .map(|r| (r.dt.ln(), r.l2_error.max(f64::MIN_POSITIVE).ln()))
        .collect();
    if pts.len() < 2 {
        pts = rows
            .iter()
            .map(|r| (r.dt.ln(), r.l2_error.max(f64::MIN_POSITIVE).ln()))
            .collect();
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    Ok(ConvergenceStudy { rows, fitted_order })
}
