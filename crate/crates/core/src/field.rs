//! Complex fields on a grid and their spectral calculus.
//!
//! Integrals are hᴺ-weighted point sums, which for smooth fields that decay
//! inside the box is the trapezoidal rule on a periodic domain — spectrally
//! accurate.  Derivatives go through the FFT: ∇ and Δ act as multiplication
//! by ik and −|k|² on the spectrum.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Error;
use crate::grid::GridSpec;
use crate::params::Params;
use crate::spectral;

/// A complex-valued field sampled on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

/// Squared norms of a field: mass ‖u‖², kinetic ‖∇u‖², moment ‖xu‖², and the
/// energy-space norm ‖u‖²_Σ = ‖∇u‖² + ‖xu‖² + ‖u‖².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub mass: f64,
    pub grad_sq: f64,
    pub moment_sq: f64,
    pub sigma_sq: f64,
}

impl Norms {
    /// The two-term seminorm ‖∇u‖² + ‖xu‖², without the mass term.
    pub fn sigma_seminorm_sq(&self) -> f64 {
        self.grad_sq + self.moment_sq
    }
}

impl ComplexField {
    /// Wraps raw values; rejects wrong lengths and non-finite entries.
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self, Error> {
        if values.len() != grid.total_points() {
            return Err(Error::WrongLength { expected: grid.total_points(), got: values.len() });
        }
        for (j, z) in values.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFiniteValue(j));
            }
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.total_points());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::default(); grid.total_points()] }
    }

    /// Builds a field from a function of the coordinates (slice of length dim).
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.total_points());
        let mut coords = [0.0f64; 3];
        for flat in 0..grid.total_points() {
            let idx = grid.unravel(flat);
            for a in 0..grid.dim() {
                coords[a] = grid.coordinate(idx[a]);
            }
            values.push(f(&coords[..grid.dim()]));
        }
        Self { grid, values }
    }

    /// The Gausson ground state with a global phase:
    /// e^{iθ}·e^{(ω+γN)/2}·e^{−γ|x|²/2}.
    pub fn gausson(grid: GridSpec, params: &Params, phase: f64) -> Self {
        let amp = ((params.omega() + params.gamma() * grid.dim() as f64) / 2.0).exp();
        let rot = Complex64::from_polar(1.0, phase);
        let gamma = params.gamma();
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            rot * amp * (-gamma * r2 / 2.0).exp()
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// u ↦ c·u.
    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|z| c * z).collect())
    }

    /// u + c·v (grids must match).
    pub fn add_scaled(&self, c: Complex64, v: &ComplexField) -> Self {
        assert_eq!(self.grid, v.grid, "grid mismatch");
        let values = self.values.iter().zip(&v.values).map(|(a, b)| a + c * b).collect();
        Self::from_raw(self.grid, values)
    }

    /// Largest modulus over the grid.
    pub fn peak_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus on the outermost grid faces divided by the peak
    /// modulus; a value above ~1e-8 means the box is too small for the data.
    pub fn boundary_to_peak_ratio(&self) -> f64 {
        let peak = self.peak_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.points_per_axis();
        let mut worst = 0.0f64;
        for (flat, z) in self.values.iter().enumerate() {
            let idx = self.grid.unravel(flat);
            if idx[..self.grid.dim()].iter().any(|&j| j == 0 || j == n - 1) {
                worst = worst.max(z.norm());
            }
        }
        worst / peak
    }

    /// Forward spectrum (unnormalized DFT) of the field.
    pub(crate) fn spectrum(&self) -> Vec<Complex64> {
        let mut hat = self.values.clone();
        spectral::forward_nd(&self.grid, &mut hat);
        hat
    }
}

/// L² inner product hᴺ·Σ u_j·conj(v_j) (antilinear in the second argument).
pub fn inner_l2(u: &ComplexField, v: &ComplexField) -> Complex64 {
    assert_eq!(u.grid, v.grid, "grid mismatch");
    let sum: Complex64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b.conj()).sum();
    sum * u.grid.cell_volume()
}

/// Spectral Laplacian: inverse transform of −|k|²·û.
pub fn laplacian(u: &ComplexField) -> ComplexField {
    let mut hat = u.spectrum();
    let ksq = u.grid.wavenumber_sq_table();
    for (z, k2) in hat.iter_mut().zip(&ksq) {
        *z *= -k2;
    }
    spectral::inverse_nd(&u.grid, &mut hat);
    ComplexField::from_raw(u.grid, hat)
}

/// Mass, kinetic, moment, and Σ norms of a field.  ‖∇u‖² is evaluated in
/// Fourier space as (hᴺ/nᴺ)·Σ|k|²|û_k|².
pub fn norms(u: &ComplexField) -> Norms {
    let rsq = u.grid.radius_sq_table();
    let hat = u.spectrum();
    norms_given(u, &rsq, &hat)
}

/// As [`norms`], with the |x|² table and spectrum supplied by the caller.
pub(crate) fn norms_given(u: &ComplexField, rsq: &[f64], hat: &[Complex64]) -> Norms {
    let h_n = u.grid.cell_volume();
    let mut mass = 0.0;
    let mut moment = 0.0;
    for (z, r2) in u.values.iter().zip(rsq) {
        let p = z.norm_sqr();
        mass += p;
        moment += r2 * p;
    }
    mass *= h_n;
    moment *= h_n;

    let ksq = u.grid.wavenumber_sq_table();
    let mut grad = 0.0;
    for (z, k2) in hat.iter().zip(&ksq) {
        grad += k2 * z.norm_sqr();
    }
    grad *= h_n / u.grid.total_points() as f64;

    Norms { mass, grad_sq: grad, moment_sq: moment, sigma_sq: grad + moment + mass }
}

/// Σ inner product ⟨∇u,∇v⟩ + ⟨xu,xv⟩ + ⟨u,v⟩ (antilinear in v).
pub fn sigma_inner(u: &ComplexField, v: &ComplexField) -> Complex64 {
    assert_eq!(u.grid, v.grid, "grid mismatch");
    let h_n = u.grid.cell_volume();
    let rsq = u.grid.radius_sq_table();

    let mut low = Complex64::default();
    for ((a, b), r2) in u.values.iter().zip(&v.values).zip(&rsq) {
        low += (1.0 + r2) * a * b.conj();
    }
    low *= h_n;

    let uhat = u.spectrum();
    let vhat = v.spectrum();
    let ksq = u.grid.wavenumber_sq_table();
    let mut grad = Complex64::default();
    for ((a, b), k2) in uhat.iter().zip(&vhat).zip(&ksq) {
        grad += k2 * a * b.conj();
    }
    grad *= h_n / u.grid.total_points() as f64;

    low + grad
}

/// Standard normal via Box–Muller.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random smooth periodic field built from the Fourier modes with every
/// signed index ≤ `max_mode` in magnitude; coefficients are damped complex
/// Gaussians.  Not normalized.
pub fn random_band_limited(grid: GridSpec, rng: &mut impl Rng, max_mode: usize) -> ComplexField {
    let n = grid.points_per_axis();
    let mut hat = vec![Complex64::default(); grid.total_points()];
    for (flat, h) in hat.iter_mut().enumerate() {
        let idx = grid.unravel(flat);
        let mut m2 = 0usize;
        let mut ok = true;
        for &j in &idx[..grid.dim()] {
            let m = if j < n / 2 { j } else { n - j };
            if m > max_mode {
                ok = false;
                break;
            }
            m2 += m * m;
        }
        if ok {
            let damp = (-(m2 as f64) / (max_mode as f64)).exp();
            *h = Complex64::new(standard_normal(rng), standard_normal(rng)) * damp;
        }
    }
    spectral::inverse_nd(&grid, &mut hat);
    ComplexField::from_raw(grid, hat)
}

/// Band-limited noise under a Gaussian envelope e^{−|x|²/(2w²)}, so the field
/// decays inside the box and all Σ quantities are faithful.  Not normalized.
pub fn random_smooth_localized(
    grid: GridSpec,
    rng: &mut impl Rng,
    max_mode: usize,
    envelope_width: f64,
) -> ComplexField {
    let noise = random_band_limited(grid, rng, max_mode);
    let rsq = grid.radius_sq_table();
    let w2 = envelope_width * envelope_width;
    let values = noise
        .values
        .iter()
        .zip(&rsq)
        .map(|(z, r2)| z * (-r2 / (2.0 * w2)).exp())
        .collect();
    ComplexField::from_raw(grid, values)
}
