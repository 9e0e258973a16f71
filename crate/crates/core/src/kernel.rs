//! Capillarity kernels and the nonlocal operator `D[ρ] = φ*ρ - ρ`.
//!
//! A [`Kernel`] samples an even, nonnegative profile on the torus lattice
//! (index 0 is the origin), renormalizes it to unit discrete mass and caches
//! its discrete Fourier transform so that circular convolution costs two
//! transforms.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::grid::{gradient, Grid, GridError, ScalarField, VectorField};

/// Gaussian profiles are cut off at this many standard deviations.
pub const GAUSSIAN_CUTOFF: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel wraps torus: support radius {radius} must be below half the extent {half}")]
    WrapsTorus { radius: f64, half: f64 },
    #[error("kernel width must be positive and finite, got {0}")]
    Width(f64),
    #[error("kernel table has a negative entry {value} at index {index}")]
    Negative { index: usize, value: f64 },
    #[error("kernel table is not even: entries {index} and its mirror differ by {gap:e}")]
    NotEven { index: usize, gap: f64 },
    #[error("kernel table has zero mass")]
    ZeroMass,
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Gaussian { sigma: f64 },
    Tent { radius: f64 },
    /// One sample per cell in lattice order, index 0 at the origin.
    Table { samples: Vec<f64> },
}

/// Signed lattice offset of coordinate `c` from the origin, in `(-n/2, n/2]`.
fn signed_offset(c: usize, n: usize) -> isize {
    if c <= n / 2 {
        c as isize
    } else {
        c as isize - n as isize
    }
}

fn origin_distance(grid: &Grid, idx: usize) -> f64 {
    let h = grid.spacing();
    let mut r2 = 0.0;
    for axis in 0..grid.dim() {
        let d = signed_offset(grid.coord(idx, axis), grid.n()) as f64 * h;
        r2 += d * d;
    }
    r2.sqrt()
}

/// Index of the lattice point `-x` when index 0 is the origin.
fn origin_mirror(grid: &Grid, idx: usize) -> usize {
    let n = grid.n();
    let mut out = 0;
    for axis in 0..grid.dim() {
        let c = grid.coord(idx, axis);
        out += ((n - c) % n) * grid.stride(axis);
    }
    out
}

#[derive(Clone)]
struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized multi-dimensional transform in place.
    fn transform(&self, grid: &Grid, buf: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        plan.process(buf);
        if grid.dim() == 2 {
            let n = grid.n();
            transpose_square(buf, n);
            plan.process(buf);
            transpose_square(buf, n);
        }
    }
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Discretized admissible capillarity kernel with cached spectrum.
#[derive(Clone)]
pub struct Kernel {
    samples: ScalarField,
    spectrum: Vec<Complex64>,
    support_radius: f64,
    fft: Spectral,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("grid", self.grid())
            .field("support_radius", &self.support_radius)
            .finish_non_exhaustive()
    }
}

impl Kernel {
    pub fn build(spec: &KernelSpec, grid: Grid) -> Result<Self, KernelError> {
        let half = 0.5 * grid.length();
        let (raw, support_radius) = match *spec {
            KernelSpec::Gaussian { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(KernelError::Width(sigma));
                }
                let radius = GAUSSIAN_CUTOFF * sigma;
                if radius >= half {
                    return Err(KernelError::WrapsTorus { radius, half });
                }
                let raw = (0..grid.cells())
                    .map(|i| {
                        let r = origin_distance(&grid, i);
                        if r <= radius {
                            (-0.5 * (r / sigma).powi(2)).exp()
                        } else {
                            0.0
                        }
                    })
                    .collect::<Vec<_>>();
                (raw, radius)
            }
            KernelSpec::Tent { radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(KernelError::Width(radius));
                }
                if radius >= half {
                    return Err(KernelError::WrapsTorus { radius, half });
                }
                let raw = (0..grid.cells())
                    .map(|i| (1.0 - origin_distance(&grid, i) / radius).max(0.0))
                    .collect::<Vec<_>>();
                (raw, radius)
            }
            KernelSpec::Table { ref samples } => {
                if samples.len() != grid.cells() {
                    return Err(GridError::Length {
                        expected: grid.cells(),
                        got: samples.len(),
                    }
                    .into());
                }
                if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
                    return Err(GridError::NonFinite(i).into());
                }
                if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| **v < 0.0) {
                    return Err(KernelError::Negative { index, value });
                }
                for (i, &v) in samples.iter().enumerate() {
                    let gap = (v - samples[origin_mirror(&grid, i)]).abs();
                    if gap > 1e-12 {
                        return Err(KernelError::NotEven { index: i, gap });
                    }
                }
                let radius = samples
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, _)| origin_distance(&grid, i))
                    .fold(0.0, f64::max);
                if radius >= half {
                    return Err(KernelError::WrapsTorus { radius, half });
                }
                // Exact evenness after the tolerance check.
                let sym = (0..grid.cells())
                    .map(|i| 0.5 * (samples[i] + samples[origin_mirror(&grid, i)]))
                    .collect();
                (sym, radius)
            }
        };
        let mass: f64 = raw.iter().sum::<f64>() * grid.cell_volume();
        if !(mass > 0.0) {
            return Err(KernelError::ZeroMass);
        }
        let samples = ScalarField::new(grid, raw.iter().map(|v| v / mass).collect())?;
        let fft = Spectral::new(grid.n());
        let mut spectrum: Vec<Complex64> =
            samples.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.transform(&grid, &mut spectrum, false);
        Ok(Self {
            samples,
            spectrum,
            support_radius,
            fft,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.samples.grid()
    }

    /// Normalized samples, index 0 at the origin.
    pub fn samples(&self) -> &ScalarField {
        &self.samples
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Discrete mass `Σ φ h^dim`.
    pub fn mass(&self) -> f64 {
        self.samples.integrate()
    }

    fn check(&self, f: &ScalarField) -> Result<(), GridError> {
        if f.grid() != self.grid() {
            Err(GridError::Mismatch)
        } else {
            Ok(())
        }
    }

    /// Circular convolution `(φ*f)_j = Σ_i φ_{j-i} f_i h^dim`, computed spectrally.
    pub fn convolve(&self, f: &ScalarField) -> Result<ScalarField, GridError> {
        self.check(f)?;
        let grid = *self.grid();
        let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.transform(&grid, &mut buf, false);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.fft.transform(&grid, &mut buf, true);
        let scale = grid.cell_volume() / grid.cells() as f64;
        Ok(ScalarField::from_raw(
            grid,
            buf.iter().map(|c| c.re * scale).collect(),
        ))
    }

    /// `D[ρ] = φ*ρ - ρ`. Evaluated on `ρ - ρ_0` with `ρ_0` the first cell
    /// value, which is the same operator for a unit-mass kernel and makes
    /// `D` of a constant field exactly zero.
    pub fn capillarity(&self, rho: &ScalarField) -> Result<ScalarField, GridError> {
        let g = self.offset_field(rho)?;
        self.convolve(&g)?.zip_with(&g, |c, r| c - r)
    }

    fn offset_field(&self, rho: &ScalarField) -> Result<ScalarField, GridError> {
        self.check(rho)?;
        let base = rho.values()[0];
        Ok(rho.map(|r| r - base))
    }

    /// `κ ρ ∇D[ρ]`.
    pub fn capillary_force(&self, rho: &ScalarField, kappa: f64) -> Result<VectorField, GridError> {
        self.check(rho)?;
        let grid = *self.grid();
        if kappa == 0.0 {
            return Ok(VectorField::zeros(grid));
        }
        let grad = gradient(&self.capillarity(rho)?);
        let mut values = grad.values().to_vec();
        let cells = grid.cells();
        for (k, v) in values.iter_mut().enumerate() {
            *v *= kappa * rho.values()[k % cells];
        }
        Ok(VectorField::from_raw(grid, values))
    }

    /// Pointwise interaction energy density `(κ/4)(ρ² + φ*ρ² - 2ρ(φ*ρ))`.
    ///
    /// Like [`Kernel::capillarity`] this works on `ρ - ρ_0`; the energy only
    /// sees differences of `ρ`, and the offset removes the cancellation
    /// between large terms when `ρ` has a large mean.
    pub fn interaction_density(&self, rho: &ScalarField, kappa: f64) -> Result<ScalarField, GridError> {
        let rho = &self.offset_field(rho)?;
        let sq = rho.map(|r| r * r);
        let conv_sq = self.convolve(&sq)?;
        let conv = self.convolve(rho)?;
        let vals = (0..rho.values().len())
            .map(|i| {
                let r = rho.values()[i];
                0.25 * kappa * (r * r + conv_sq.values()[i] - 2.0 * r * conv.values()[i])
            })
            .collect();
        Ok(ScalarField::from_raw(*rho.grid(), vals))
    }

    /// `∫ E_global[ρ]`, the nonlocal interaction energy.
    pub fn interaction_energy(&self, rho: &ScalarField, kappa: f64) -> Result<f64, GridError> {
        Ok(self.interaction_density(rho, kappa)?.integrate())
    }
}
