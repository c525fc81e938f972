//! Numerical laboratory for the logarithmic Schrödinger equation with a
//! harmonic potential,
//!
//! ```text
//! i ∂ₜu + Δu − γ(γ−1)|x|² u + u·Log|u|² = 0,   γ > 1,  x ∈ ℝᴺ,  N ∈ {1,2,3},
//! ```
//!
//! whose ground states are the explicit Gaussian solitons ("Gaussons")
//! φ_ω(x) = e^{(ω+γN)/2} e^{−γ|x|²/2}.  Fields live on a uniform periodic grid
//! over [−L, L)ᴺ and derivatives are spectral, so everything here assumes data
//! that decays well inside the box.
//!
//! The crate is organised around what you can do with a field:
//!
//! * [`grid`] / [`field`] — grids, complex fields, spectral calculus, norms;
//! * [`functionals`] — energy, action, Nehari functional, the A/B convex
//!   splitting of s²Log s², Orlicz norm, log-Sobolev and oscillator checks;
//! * [`regularization`] — the saturated nonlinearity g_m and its energy;
//! * [`groundstate`] — Nehari projection and the projected-descent solver;
//! * [`evolution`] — Strang splitting, conservation tracking, step-size study;
//! * [`stability`] — orbital distance, perturbation sweeps, minimizing
//!   sequences.

pub mod error;
pub mod evolution;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod params;
pub mod regularization;
pub mod stability;

mod spectral;

pub use error::Error;
pub use field::{ComplexField, Norms};
pub use grid::GridSpec;
pub use params::Params;
