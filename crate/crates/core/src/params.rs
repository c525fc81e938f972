//! Physical parameters of the model.

use crate::error::Error;

/// Trap strength γ (strictly > 1), frequency ω, and saturation index m ≥ 1
/// for the regularized nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    gamma: f64,
    omega: f64,
    reg_index: u64,
}

/// Default saturation index: exact on amplitudes within [10⁻⁶, 10⁶].
pub const DEFAULT_REG_INDEX: u64 = 1_000_000;

impl Params {
    pub fn new(gamma: f64, omega: f64, reg_index: u64) -> Result<Self, Error> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidGamma(gamma));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidOmega(omega));
        }
        if reg_index == 0 {
            return Err(Error::InvalidRegIndex(reg_index));
        }
        Ok(Self { gamma, omega, reg_index })
    }

    /// γ and ω with the default saturation index.
    pub fn with_defaults(gamma: f64, omega: f64) -> Result<Self, Error> {
        Self::new(gamma, omega, DEFAULT_REG_INDEX)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn reg_index(&self) -> u64 {
        self.reg_index
    }

    /// Coefficient γ(γ−1) of the |x|² potential.
    pub fn potential_coupling(&self) -> f64 {
        self.gamma * (self.gamma - 1.0)
    }
}
