//! Orbital-stability experiments around the Gaussian ground state.
//!
//! The ground-state orbit {e^{iθ}φ_ω : θ ∈ ℝ} is probed two ways:
//!
//! * [`stability_sweep`] kicks the profile with a family of perturbations of
//!   growing size δ, integrates each one, and tabulates how far the
//!   trajectory strays from the orbit in Σ;
//! * [`minimizing_sequence_experiment`] builds a concrete minimizing
//!   sequence for the action on the Nehari manifold and records how the
//!   action gap and the distance to the orbit shrink together.

use num_complex::Complex64;

use crate::error::Error;
use crate::evolution::{self, EvolveOptions, NonlinearMode};
use crate::field::{self, ComplexField};
use crate::functionals;
use crate::grid::GridSpec;
use crate::groundstate::{align_phase, nehari_project};
use crate::params::Params;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Σ-distance from `u` to the ground-state orbit (minimized over the global
/// phase of the closed-form profile).
pub fn orbital_distance(u: &ComplexField, params: &Params) -> f64 {
    let phi = ComplexField::gausson(*u.grid(), params, 0.0);
    align_phase(u, &phi).distance
}

/// How the ground state is disturbed before the clock starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationKind {
    /// (1+δ)·φ — stays on an exact solution that merely spins at a shifted
    /// frequency, so its orbital distance is constant in time.
    AmplitudeScale,
    /// φ + δ·w with a fixed random smooth localized w scaled to ‖φ‖_Σ.
    AdditiveBump,
    /// e^{iδx₁}·φ — a momentum kick; the profile sloshes in the trap.
    PhaseRamp,
}

/// Controls for [`stability_sweep`].
#[derive(Debug, Clone)]
pub struct StabilityRunSpec {
    /// Perturbation sizes, nonnegative and sorted ascending.
    pub perturbation_sizes: Vec<f64>,
    pub kind: PerturbationKind,
    pub mode: NonlinearMode,
    /// Integration horizon.
    pub horizon: f64,
    /// Step size.
    pub dt: f64,
    /// Seed for the additive-bump noise draw (one draw per sweep, shared by
    /// all sizes so rows differ only in δ).
    pub seed: u64,
}

/// One perturbation size's outcome.
#[derive(Debug, Clone, Copy)]
pub struct StabilityRow {
    pub delta: f64,
    /// Orbital distance at t = 0.
    pub initial_distance: f64,
    /// Largest recorded orbital distance over the horizon.
    pub sup_distance: f64,
    /// sup/initial; NaN when the initial distance is at the alignment
    /// floor (δ = 0), where the quotient would be noise over noise.
    pub ratio: f64,
    /// Time of a non-finite abort, if the integration failed.
    pub failed_at: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StabilityTable {
    pub rows: Vec<StabilityRow>,
}

/// Perturb the ground state by each requested size, integrate, and record
/// how far each trajectory strays from the orbit.  Records are taken every
/// ~0.01 time units (at least every step).
pub fn stability_sweep(
    grid: GridSpec,
    params: &Params,
    spec: &StabilityRunSpec,
) -> Result<StabilityTable, Error> {
    let sizes = &spec.perturbation_sizes;
    if sizes.is_empty()
        || sizes.iter().any(|d| !d.is_finite() || *d < 0.0)
        || sizes.windows(2).any(|p| p[0] > p[1])
    {
        return Err(Error::InvalidDeltas);
    }

    let phi = ComplexField::gausson(grid, params, 0.0);
    let sigma_phi = field::norms(&phi).sigma_sq.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bump = {
        let w = field::random_smooth_localized(grid, &mut rng, 8, 1.0 / params.gamma().sqrt());
        let scale = sigma_phi / field::norms(&w).sigma_sq.sqrt();
        w.scale(Complex64::new(scale, 0.0))
    };

    let record_every = ((0.01 / spec.dt).round() as usize).max(1);
    let opts = EvolveOptions {
        mode: spec.mode,
        dt: spec.dt,
        t_final: spec.horizon,
        record_every,
    };

    let mut rows = Vec::with_capacity(sizes.len());
    for &delta in sizes {
        let u0 = match spec.kind {
            PerturbationKind::AmplitudeScale => phi.scale(Complex64::new(1.0 + delta, 0.0)),
            PerturbationKind::AdditiveBump => phi.add_scaled(Complex64::new(delta, 0.0), &bump),
            PerturbationKind::PhaseRamp => {
                let mut flat = 0usize;
                let values = phi
                    .values()
                    .iter()
                    .map(|z| {
                        let x1 = grid.coordinate(grid.unravel(flat)[0]);
                        flat += 1;
                        z * Complex64::from_polar(1.0, delta * x1)
                    })
                    .collect();
                ComplexField::new(grid, values).expect("phase ramp keeps values finite")
            }
        };
        let initial_distance = align_phase(&u0, &phi).distance;
        match evolution::evolve(&u0, params, &opts, Some(&phi)) {
            Ok(rec) => {
                let col = rec.orbital_distance.as_ref().expect("reference was supplied");
                let sup = col.iter().cloned().fold(0.0_f64, f64::max);
                let ratio = if initial_distance > 1e-6 * sigma_phi {
                    sup / initial_distance
                } else {
                    f64::NAN
                };
                rows.push(StabilityRow {
                    delta,
                    initial_distance,
                    sup_distance: sup,
                    ratio,
                    failed_at: None,
                });
            }
            Err(Error::NonFinite { last_finite_time }) => {
                rows.push(StabilityRow {
                    delta,
                    initial_distance,
                    sup_distance: f64::NAN,
                    ratio: f64::NAN,
                    failed_at: Some(last_finite_time),
                });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(StabilityTable { rows })
}

/// One element of the constructed minimizing sequence.
#[derive(Debug, Clone, Copy)]
pub struct MinimizingRow {
    pub epsilon: f64,
    /// S_ω(u_n) − d(ω), the excess action over the closed-form level.
    pub action_gap: f64,
    /// Σ-distance from u_n to the ground-state orbit.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizingSequence {
    pub rows: Vec<MinimizingRow>,
}

/// Build the minimizing sequence u_n = Π(φ + 2^{−n}·w_n), n = 1..=count,
/// with Π the Nehari rescaling and w_n fresh random smooth localized fields
/// scaled to ‖φ‖_Σ, and record action gaps and orbit distances.
pub fn minimizing_sequence_experiment(
    grid: GridSpec,
    params: &Params,
    count: usize,
    seed: u64,
) -> MinimizingSequence {
    let phi = ComplexField::gausson(grid, params, 0.0);
    let sigma_phi = field::norms(&phi).sigma_sq.sqrt();
    let level = functionals::ground_energy_closed_form(params, grid.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut rows = Vec::with_capacity(count);
    for n in 1..=count {
        let raw = field::random_smooth_localized(grid, &mut rng, 8, 1.0 / params.gamma().sqrt());
        let scale = sigma_phi / field::norms(&raw).sigma_sq.sqrt();
        let eps = 0.5_f64.powi(n as i32);
        let u = nehari_project(
            &phi.add_scaled(Complex64::new(eps * scale, 0.0), &raw),
            params,
        );
        let action = functionals::report(&u, params).action;
        rows.push(MinimizingRow {
            epsilon: eps,
            action_gap: action - level,
            distance: align_phase(&u, &phi).distance,
        });
    }
    MinimizingSequence { rows }
}
