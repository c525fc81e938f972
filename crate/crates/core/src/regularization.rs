//! Saturation of the logarithmic nonlinearity.
//!
//! For an index m ≥ 1 the multiplier Log s² is frozen below s = 1/m on its
//! convex side and above s = m on its concave side:
//!
//! ```text
//! ã_m(s) = m²A(1/m) on [0, 1/m],   A(s)/s² beyond,
//! b̃_m(s) = B(s)/s²  on [0, m],     B(m)/m² beyond,
//! g_m(z)  = z·(b̃_m − ã_m)(|z|),
//! ```
//!
//! so g_m(z) = z·Log|z|² exactly whenever 1/m ≤ |z| ≤ m, and g_m is globally
//! Lipschitz with a constant that grows like 2·Log m.  The pointwise
//! potential-energy primitives Φ_m(t) = ∫₀ᵗ s·ã_m ds and
//! Ψ_m(t) = ∫₀ᵗ s·b̃_m ds have closed forms used by [`energy_regularized`].

use num_complex::Complex64;

use crate::field::{self, ComplexField};
use crate::functionals::{a_of, SPLIT_KNOT};
use crate::params::Params;

const E_NEG6: f64 = 0.0024787521766663585;

/// The saturated multiplier and its energy primitives at a fixed index m.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedNonlinearity {
    index: u64,
    m: f64,
    inv_m: f64,
    /// ã on the frozen segment [0, 1/m]: m²·A(1/m).
    a_floor: f64,
    /// b̃ on the frozen segment [m, ∞): B(m)/m².
    b_ceil: f64,
}

impl RegularizedNonlinearity {
    /// Panics if `reg_index` is zero.
    pub fn new(reg_index: u64) -> Self {
        assert!(reg_index >= 1, "reg_index must be a positive integer");
        let m = reg_index as f64;
        let inv_m = 1.0 / m;
        Self {
            index: reg_index,
            m,
            inv_m,
            a_floor: m * m * a_of(inv_m),
            b_ceil: 2.0 * m.ln() + 3.0 + 4.0 * SPLIT_KNOT / m - E_NEG6 / (m * m),
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// ã_m(s).  Panics on negative or non-finite s.
    pub fn a_tilde(&self, s: f64) -> f64 {
        assert!(s >= 0.0 && s.is_finite(), "modulus must be nonnegative and finite (got {s})");
        if s <= self.inv_m {
            self.a_floor
        } else if s <= SPLIT_KNOT {
            -2.0 * s.ln()
        } else {
            3.0 + 4.0 * SPLIT_KNOT / s - E_NEG6 / (s * s)
        }
    }

    /// b̃_m(s).  Panics on negative or non-finite s.
    pub fn b_tilde(&self, s: f64) -> f64 {
        assert!(s >= 0.0 && s.is_finite(), "modulus must be nonnegative and finite (got {s})");
        if s <= SPLIT_KNOT {
            0.0
        } else if s <= self.m {
            2.0 * s.ln() + 3.0 + 4.0 * SPLIT_KNOT / s - E_NEG6 / (s * s)
        } else {
            self.b_ceil
        }
    }

    /// The multiplier (b̃_m − ã_m)(s); equals Log s² on [1/m, m].
    pub fn multiplier(&self, s: f64) -> f64 {
        if s >= self.inv_m && s <= self.m {
            2.0 * s.ln()
        } else {
            self.b_tilde(s) - self.a_tilde(s)
        }
    }

    /// The multiplier as a function of the squared modulus p = |z|²; on the
    /// pure region this is literally `p.ln()`, the same float expression an
    /// unregularized u·Log|u|² uses, so the two agree bitwise there.
    pub(crate) fn multiplier_from_sq(&self, p: f64) -> f64 {
        if p >= self.inv_m * self.inv_m && p <= self.m * self.m {
            p.ln()
        } else {
            self.multiplier(p.sqrt())
        }
    }

    /// g_m(z) = z·(b̃_m − ã_m)(|z|); bitwise equal to z·Log|z|² for
    /// 1/m ≤ |z| ≤ m.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        z * self.multiplier_from_sq(z.norm_sqr())
    }

    /// Φ_m(t) = ∫₀ᵗ s·ã_m(s) ds in closed form.  Panics on negative t.
    pub fn phi(&self, t: f64) -> f64 {
        assert!(t >= 0.0 && t.is_finite(), "upper limit must be nonnegative and finite (got {t})");
        let s0 = self.inv_m;
        let t0 = t.min(s0);
        let mut acc = 0.5 * self.a_floor * t0 * t0;
        if t > s0 {
            if s0 < SPLIT_KNOT {
                let t1 = t.min(SPLIT_KNOT);
                acc += prim_a_log(t1) - prim_a_log(s0);
                if t > SPLIT_KNOT {
                    acc += prim_a_poly(t) - prim_a_poly(SPLIT_KNOT);
                }
            } else {
                // m < e³: the frozen segment already covers the log branch.
                acc += prim_a_poly(t) - prim_a_poly(s0);
            }
        }
        acc
    }

    /// Ψ_m(t) = ∫₀ᵗ s·b̃_m(s) ds in closed form; zero for t ≤ e⁻³.
    /// Panics on negative t.
    pub fn psi(&self, t: f64) -> f64 {
        assert!(t >= 0.0 && t.is_finite(), "upper limit must be nonnegative and finite (got {t})");
        if t <= SPLIT_KNOT {
            return 0.0;
        }
        let t1 = t.min(self.m);
        let mut acc = prim_b_poly(t1) - prim_b_poly(SPLIT_KNOT);
        if t > self.m {
            acc += 0.5 * self.b_ceil * (t * t - self.m * self.m);
        }
        acc
    }

    /// Empirical global Lipschitz constant of z ↦ g_m(z): the sampled sup of
    /// max(|h|, |h + s·h′|) (tangential and radial differentials of z·h(|z|))
    /// over a dense logarithmic sweep including the knots.
    pub fn lipschitz_bound(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut probe = |s: f64| {
            if s <= 0.0 {
                return;
            }
            let h = self.multiplier(s);
            let ds = s * 1e-6;
            let hp = (self.multiplier(s + ds) - self.multiplier((s - ds).max(0.0))) / (2.0 * ds);
            worst = worst.max(h.abs()).max((h + s * hp).abs());
        };
        let lo = (self.inv_m * 1e-3).ln();
        let hi = (self.m * 1e3).ln();
        let steps = 4000;
        for i in 0..=steps {
            probe((lo + (hi - lo) * i as f64 / steps as f64).exp());
        }
        for knot in [self.inv_m, SPLIT_KNOT, self.m] {
            for shift in [0.999_999, 1.0, 1.000_001] {
                probe(knot * shift);
            }
        }
        worst
    }
}

// Antiderivatives of A(s)/s and B(s)/s on their branches.
fn prim_a_log(s: f64) -> f64 {
    s * s * (0.5 - s.ln())
}

fn prim_a_poly(s: f64) -> f64 {
    1.5 * s * s + 4.0 * SPLIT_KNOT * s - E_NEG6 * s.ln()
}

fn prim_b_poly(s: f64) -> f64 {
    s * s * (s.ln() + 1.0) + 4.0 * SPLIT_KNOT * s - E_NEG6 * s.ln()
}

/// One-shot g_m(z) without keeping the struct around.
pub fn g_m(z: Complex64, reg_index: u64) -> Complex64 {
    RegularizedNonlinearity::new(reg_index).apply(z)
}

/// One-shot (Φ_m(t), Ψ_m(t)).
pub fn phi_psi_m(t: f64, reg_index: u64) -> (f64, f64) {
    let reg = RegularizedNonlinearity::new(reg_index);
    (reg.phi(t), reg.psi(t))
}

/// Conserved energy of the saturated flow, normalized so that it converges to
/// the plain energy E(u) as m → ∞:
///
/// ```text
/// E_m(u) = ½‖∇u‖² + ½γ(γ−1)‖xu‖² + ∫(Φ_m − Ψ_m)(|u|) dx − ½‖u‖².
/// ```
///
/// The primitives Φ_m, Ψ_m carry an extra ½|u|² relative to the logarithmic
/// potential −½|u|²Log|u|²; mass is conserved by the flow, so subtracting it
/// keeps E_m conserved while pinning the m → ∞ limit to E.
pub fn energy_regularized(u: &ComplexField, params: &Params) -> f64 {
    energy_regularized_with(u, params, params.reg_index())
}

/// Same as [`energy_regularized`] but with an explicit index, for callers
/// that saturate at a different level than the one stored in the parameters.
pub fn energy_regularized_with(u: &ComplexField, params: &Params, reg_index: u64) -> f64 {
    let reg = RegularizedNonlinearity::new(reg_index);
    let ns = field::norms(u);
    let mut pot = 0.0;
    for z in u.values() {
        let s = z.norm();
        pot += reg.phi(s) - reg.psi(s);
    }
    pot *= u.grid().cell_volume();
    0.5 * ns.grad_sq + 0.5 * params.potential_coupling() * ns.moment_sq + pot - 0.5 * ns.mass
}
