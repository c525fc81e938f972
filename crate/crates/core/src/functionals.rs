//! Energy-type functionals and scalar inequalities.
//!
//! The potential energy of the model splits the non-convex s²Log s² into a
//! difference of convex pieces, switching branch at s = e⁻³ (the inflection
//! of −s²Log s²):
//!
//! ```text
//! A(s) = −s²Log s²                  on [0, e⁻³],
//!        3s² + 4e⁻³s − e⁻⁶         on [e⁻³, ∞),     (C¹ across the knot)
//! B(s) = s²Log s² + A(s)            (≡ 0 on [0, e⁻³]),
//! ```
//!
//! so ∫|u|²Log|u|² = ∫B(|u|) − ∫A(|u|).  A is an N-function and induces the
//! Luxemburg norm computed by [`orlicz_norm`].

use crate::field::{self, ComplexField};
use crate::params::Params;

/// Branch knot e⁻³ of the convex splitting.
pub const SPLIT_KNOT: f64 = 0.049787068367863944;
/// e⁻⁶, the constant term of the polynomial branch.
const E_NEG6: f64 = 0.0024787521766663585;

/// Moduli with |u|² below this are treated as exact zeros inside logarithms
/// (the 0·Log 0 = 0 convention, kept clear of subnormal trouble).
pub const LOG_FLOOR: f64 = 1e-300;

/// Convex piece A of the splitting.  Panics on negative or non-finite s.
pub fn a_of(s: f64) -> f64 {
    assert!(s >= 0.0 && s.is_finite(), "modulus must be nonnegative and finite (got {s})");
    if s <= SPLIT_KNOT {
        if s == 0.0 {
            0.0
        } else {
            -2.0 * s * s * s.ln()
        }
    } else {
        3.0 * s * s + 4.0 * SPLIT_KNOT * s - E_NEG6
    }
}

/// Convex piece B of the splitting; B(s) = s²Log s² + A(s), identically zero
/// on [0, e⁻³].  Panics on negative or non-finite s.
pub fn b_of(s: f64) -> f64 {
    assert!(s >= 0.0 && s.is_finite(), "modulus must be nonnegative and finite (got {s})");
    if s <= SPLIT_KNOT {
        0.0
    } else {
        2.0 * s * s * s.ln() + 3.0 * s * s + 4.0 * SPLIT_KNOT * s - E_NEG6
    }
}

/// Entropy ∫|u|²Log|u|² dx as an hᴺ-weighted sum, with 0·Log 0 = 0.
pub fn entropy(u: &ComplexField) -> f64 {
    let mut sum = 0.0;
    for z in u.values() {
        let p = z.norm_sqr();
        if p >= LOG_FLOOR {
            sum += p * p.ln();
        }
    }
    sum * u.grid().cell_volume()
}

/// Norms plus the energy E, action S_ω, and Nehari functional I_ω of a field:
///
/// ```text
/// E(u)   = ½‖∇u‖² + ½γ(γ−1)‖xu‖² − ½∫|u|²Log|u|²,
/// S_ω(u) = E(u) + (ω+1)/2·‖u‖²,
/// I_ω(u) = ‖∇u‖² + γ(γ−1)‖xu‖² + ω‖u‖² − ∫|u|²Log|u|².
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalReport {
    pub mass: f64,
    pub grad_sq: f64,
    pub moment_sq: f64,
    pub entropy: f64,
    pub energy: f64,
    pub action: f64,
    pub nehari: f64,
}

pub fn report(u: &ComplexField, params: &Params) -> FunctionalReport {
    let ns = field::norms(u);
    let ent = entropy(u);
    let c = params.potential_coupling();
    let energy = 0.5 * ns.grad_sq + 0.5 * c * ns.moment_sq - 0.5 * ent;
    let action = energy + (params.omega() + 1.0) / 2.0 * ns.mass;
    // Summed independently of `action` so the identity I = 2S − ‖u‖² is a
    // genuine cross-check rather than an algebraic tautology.
    let nehari = ns.grad_sq + c * ns.moment_sq + params.omega() * ns.mass - ent;
    FunctionalReport {
        mass: ns.mass,
        grad_sq: ns.grad_sq,
        moment_sq: ns.moment_sq,
        entropy: ent,
        energy,
        action,
        nehari,
    }
}

/// Ground-state action level in closed form: d(ω) = ½·π^{N/2}·γ^{−N/2}·e^{ω+γN}.
pub fn ground_energy_closed_form(params: &Params, dim: usize) -> f64 {
    let n = dim as f64;
    0.5 * (std::f64::consts::PI / params.gamma()).powf(n / 2.0)
        * (params.omega() + params.gamma() * n).exp()
}

/// Defect of the sharp logarithmic Sobolev inequality at scale α > 0:
///
/// ```text
/// residual = (α²/π)‖∇u‖² + (Log‖u‖² − N(1+Log α))‖u‖² − ∫|u|²Log|u|²,
/// ```
///
/// nonnegative for every u, zero exactly on translated multiples of
/// e^{−π|x|²/(2α²)}.  Panics for a zero field or α ≤ 0.
pub fn log_sobolev_residual(u: &ComplexField, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive (got {alpha})");
    let ns = field::norms(u);
    assert!(ns.mass > 0.0, "log-Sobolev residual needs a nonzero field");
    let n = u.grid().dim() as f64;
    alpha * alpha / std::f64::consts::PI * ns.grad_sq
        + (ns.mass.ln() - n * (1.0 + alpha.ln())) * ns.mass
        - entropy(u)
}

/// Luxemburg norm ‖u‖_{L^A} = inf { k > 0 : ∫A(|u|/k) dx ≤ 1 }, by bisection
/// on the strictly decreasing map k ↦ ∫A(|u|/k).  Returns 0 for the zero
/// field.  Relative tolerance 1e-10.
pub fn orlicz_norm(u: &ComplexField) -> f64 {
    orlicz_norm_impl(u).0
}

const ORLICZ_REL_TOL: f64 = 1e-10;

/// Returns (norm, bisection iteration count); the count stays below 60.
fn orlicz_norm_impl(u: &ComplexField) -> (f64, usize) {
    let moduli: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    if moduli.iter().all(|&s| s == 0.0) {
        return (0.0, 0);
    }
    let h_n = u.grid().cell_volume();
    let total = |k: f64| -> f64 { moduli.iter().map(|&s| a_of(s / k)).sum::<f64>() * h_n };

    // Doubling bracket around ∫A(|u|/k) = 1.
    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    if total(1.0) > 1.0 {
        while total(hi) > 1.0 {
            hi *= 2.0;
            assert!(hi.is_finite(), "Orlicz bracket diverged");
        }
        lo = hi / 2.0;
    } else {
        while total(lo) <= 1.0 {
            lo /= 2.0;
            if lo < f64::MIN_POSITIVE {
                // ∫A never reaches 1: only possible for vanishing data.
                return (0.0, 0);
            }
        }
        hi = lo * 2.0;
    }

    let mut iters = 0usize;
    while hi - lo > ORLICZ_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    (hi, iters)
}

/// Rayleigh quotient (‖∇u‖² + γ²‖xu‖²)/‖u‖² of the harmonic oscillator
/// −Δ + γ²|x|²; its infimum over Σ is γN.  Panics for a zero field.
pub fn oscillator_rayleigh(u: &ComplexField, params: &Params) -> f64 {
    let ns = field::norms(u);
    assert!(ns.mass > 0.0, "Rayleigh quotient needs a nonzero field");
    (ns.grad_sq + params.gamma() * params.gamma() * ns.moment_sq) / ns.mass
}

/// Scales a field so its A-integral hits any target: used in tests via the
/// norm itself (v = u/‖u‖_{L^A} has ∫A(|v|) = 1).
pub fn a_integral(u: &ComplexField) -> f64 {
    u.values().iter().map(|z| a_of(z.norm())).sum::<f64>() * u.grid().cell_volume()
}
