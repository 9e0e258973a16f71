//! Uniform periodic grids, cell-centered fields and the centered difference
//! operators shared by the kernel, solver and diagnostics.
//!
//! Cells are stored row-major: in two dimensions the flat index of cell
//! `(i, j)` is `i * n + j`, where axis 0 is `x` and axis 1 is `y`. Vector
//! fields are stored component-major, one contiguous block per component.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("dimension must be 1 or 2, got {0}")]
    Dimension(usize),
    #[error("cells per axis must be a power of two and at least 8, got {0}")]
    Resolution(usize),
    #[error("extent must be positive and finite, got {0}")]
    Extent(f64),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    Mismatch,
    #[error("L^p norm requires p >= 1, got {0}")]
    Exponent(f64),
}

/// Uniform periodic lattice on the torus `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self, GridError> {
        if !(1..=2).contains(&dim) {
            return Err(GridError::Dimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(GridError::Resolution(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(GridError::Extent(length));
        }
        Ok(Self { dim, n, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Cell width `h = L / n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// `h^dim`, the quadrature weight of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        if self.dim == 2 && axis == 0 {
            self.n
        } else {
            1
        }
    }

    /// Lattice coordinate of a flat index along `axis`.
    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.n
    }

    /// Flat index of the cell `offset` steps away along `axis`, wrapping periodically.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let n = self.n as isize;
        let c = self.coord(idx, axis) as isize;
        let moved = (c + offset).rem_euclid(n);
        (idx as isize + (moved - c) * self.stride(axis) as isize) as usize
    }

    /// Physical position of the cell center, `(i + 1/2) h` per axis. Unused
    /// axes are zero.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        let mut x = [0.0; 2];
        for (axis, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = (self.coord(idx, axis) as f64 + 0.5) * h;
        }
        x
    }

    /// Index of the cell mirrored through the origin (`x -> -x` on every axis).
    pub fn mirror(&self, idx: usize) -> usize {
        let mut out = 0;
        for axis in 0..self.dim {
            let c = self.coord(idx, axis);
            out += (self.n - 1 - c) * self.stride(axis);
        }
        out
    }
}

fn check_finite(values: &[f64]) -> Result<(), GridError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(GridError::NonFinite(i)),
        None => Ok(()),
    }
}

/// One real value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.cells() {
            return Err(GridError::Length {
                expected: grid.cells(),
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    /// Builds a field without validation. Callers guarantee the length.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.cells());
        Self { grid, values }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self::from_raw(grid, vec![value; grid.cells()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.cells()).map(|i| f(grid.center(i))).collect();
        Self::from_raw(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(
        &self,
        other: &ScalarField,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, GridError> {
        if self.grid != other.grid {
            return Err(GridError::Mismatch);
        }
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &ScalarField, b: f64) -> Result<Self, GridError> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    /// `Σ values · h^dim`.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// `(Σ |v|^p h^dim)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64, GridError> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(GridError::Exponent(p));
        }
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((sum * self.grid.cell_volume()).powf(1.0 / p))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Periodic translation: the result at cell `i` is the input at `i - offset`.
    pub fn shifted(&self, axis: usize, offset: isize) -> Self {
        let g = self.grid;
        let values = (0..g.cells())
            .map(|i| self.values[g.shift(i, axis, -offset)])
            .collect();
        Self::from_raw(g, values)
    }

    /// Reflection `x -> -x` through the origin of the torus.
    pub fn mirrored(&self) -> Self {
        let g = self.grid;
        Self::from_raw(g, (0..g.cells()).map(|i| self.values[g.mirror(i)]).collect())
    }
}

/// `dim` real components per cell, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    values: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        let expected = grid.dim() * grid.cells();
        if values.len() != expected {
            return Err(GridError::Length {
                expected,
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.dim() * grid.cells());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_raw(grid, vec![0.0; grid.dim() * grid.cells()])
    }

    pub fn constant(grid: Grid, value: &[f64]) -> Self {
        assert_eq!(value.len(), grid.dim(), "one value per component");
        let mut values = Vec::with_capacity(grid.dim() * grid.cells());
        for &v in value {
            values.extend(std::iter::repeat(v).take(grid.cells()));
        }
        Self::from_raw(grid, values)
    }

    pub fn from_components(components: &[ScalarField]) -> Result<Self, GridError> {
        let grid = *components.first().ok_or(GridError::Length {
            expected: 1,
            got: 0,
        })?.grid();
        if components.len() != grid.dim() {
            return Err(GridError::Length {
                expected: grid.dim(),
                got: components.len(),
            });
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(GridError::Mismatch);
        }
        let values = components.iter().flat_map(|c| c.values().iter().copied()).collect();
        Ok(Self::from_raw(grid, values))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.cells();
        &self.values[c * n..(c + 1) * n]
    }

    pub(crate) fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.cells();
        &mut self.values[c * n..(c + 1) * n]
    }

    pub fn component_field(&self, c: usize) -> ScalarField {
        ScalarField::from_raw(self.grid, self.component(c).to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn lincomb(&self, a: f64, other: &VectorField, b: f64) -> Result<Self, GridError> {
        if self.grid != other.grid {
            return Err(GridError::Mismatch);
        }
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        ))
    }

    /// Integral of each component.
    pub fn integrate(&self) -> Vec<f64> {
        let w = self.grid.cell_volume();
        (0..self.grid.dim())
            .map(|c| self.component(c).iter().sum::<f64>() * w)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn shifted(&self, axis: usize, offset: isize) -> Self {
        let comps: Vec<_> = (0..self.grid.dim())
            .map(|c| self.component_field(c).shifted(axis, offset))
            .collect();
        Self::from_components(&comps).expect("same grid")
    }

    /// Reflection `x -> -x`; components are moved but not negated.
    pub fn mirrored(&self) -> Self {
        let comps: Vec<_> = (0..self.grid.dim())
            .map(|c| self.component_field(c).mirrored())
            .collect();
        Self::from_components(&comps).expect("same grid")
    }
}

/// Centered periodic difference `(f[j+1] - f[j-1]) / 2h` of a raw slice along `axis`.
pub(crate) fn centered_diff(grid: &Grid, f: &[f64], axis: usize, out: &mut [f64]) {
    let inv = 0.5 / grid.spacing();
    for (i, o) in out.iter_mut().enumerate() {
        *o = (f[grid.shift(i, axis, 1)] - f[grid.shift(i, axis, -1)]) * inv;
    }
}

/// Forward periodic difference `(f[j+1] - f[j]) / h` along `axis`.
pub(crate) fn forward_diff(grid: &Grid, f: &[f64], axis: usize, out: &mut [f64]) {
    let inv = 1.0 / grid.spacing();
    for (i, o) in out.iter_mut().enumerate() {
        *o = (f[grid.shift(i, axis, 1)] - f[i]) * inv;
    }
}

/// Centered second-order gradient.
pub fn gradient(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    let mut out = VectorField::zeros(g);
    for axis in 0..g.dim() {
        centered_diff(&g, f.values(), axis, out.component_mut(axis));
    }
    out
}

/// Forward-difference gradient `D+ f`. Summation-by-parts partner of the
/// compact Laplacian: `Σ f Δf = -Σ |D+ f|^2`.
pub fn forward_gradient(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    let mut out = VectorField::zeros(g);
    for axis in 0..g.dim() {
        forward_diff(&g, f.values(), axis, out.component_mut(axis));
    }
    out
}

/// Centered divergence, summed over components.
pub fn divergence(v: &VectorField) -> ScalarField {
    let g = *v.grid();
    let mut out = vec![0.0; g.cells()];
    let mut tmp = vec![0.0; g.cells()];
    for axis in 0..g.dim() {
        centered_diff(&g, v.component(axis), axis, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o += t;
        }
    }
    ScalarField::from_raw(g, out)
}

fn compact_laplacian_raw(g: &Grid, f: &[f64], out: &mut [f64]) {
    let inv = 1.0 / (g.spacing() * g.spacing());
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for axis in 0..g.dim() {
            acc += f[g.shift(i, axis, 1)] - 2.0 * f[i] + f[g.shift(i, axis, -1)];
        }
        *o = acc * inv;
    }
}

/// Compact 3-point (1D) / 5-point (2D) Laplacian.
pub fn laplacian_scalar(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    let mut out = vec![0.0; g.cells()];
    compact_laplacian_raw(&g, f.values(), &mut out);
    ScalarField::from_raw(g, out)
}

/// Compact Laplacian applied to each component.
pub fn laplacian_vector(v: &VectorField) -> VectorField {
    let g = *v.grid();
    let mut out = VectorField::zeros(g);
    for c in 0..g.dim() {
        compact_laplacian_raw(&g, v.component(c), out.component_mut(c));
    }
    out
}

/// `gradient(divergence(v))`.
pub fn grad_div(v: &VectorField) -> VectorField {
    gradient(&divergence(v))
}

/// The wide stencil `(f[j+2] - 2 f[j] + f[j-2]) / 4h^2` per axis, which is
/// what `divergence(gradient(f))` assembles to.
pub fn composed_laplacian(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    let inv = 0.25 / (g.spacing() * g.spacing());
    let v = f.values();
    let out = (0..g.cells())
        .map(|i| {
            let mut acc = 0.0;
            for axis in 0..g.dim() {
                acc += v[g.shift(i, axis, 2)] - 2.0 * v[i] + v[g.shift(i, axis, -2)];
            }
            acc * inv
        })
        .collect();
    ScalarField::from_raw(g, out)
}

/// Wide composed stencil applied per component.
pub fn composed_laplacian_vector(v: &VectorField) -> VectorField {
    let comps: Vec<_> = (0..v.grid().dim())
        .map(|c| composed_laplacian(&v.component_field(c)))
        .collect();
    VectorField::from_components(&comps).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn g1(n: usize) -> Grid {
        Grid::new(1, n, 1.0).unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_validation() {
        assert_eq!(Grid::new(3, 16, 1.0), Err(GridError::Dimension(3)));
        assert_eq!(Grid::new(1, 4, 1.0), Err(GridError::Resolution(4)));
        assert_eq!(Grid::new(1, 24, 1.0), Err(GridError::Resolution(24)));
        assert!(matches!(Grid::new(2, 16, -1.0), Err(GridError::Extent(_))));
        let g = Grid::new(2, 16, 2.0).unwrap();
        assert_eq!(g.cells(), 256);
        assert_eq!(g.spacing(), 0.125);
    }

    #[test]
    fn field_rejects_nonfinite_and_bad_length() {
        let g = g1(8);
        assert!(matches!(
            ScalarField::new(g, vec![0.0; 7]),
            Err(GridError::Length { .. })
        ));
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert_eq!(ScalarField::new(g, v), Err(GridError::NonFinite(3)));
    }

    #[test]
    fn constant_fields_are_annihilated() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = ScalarField::constant(g, 5.0);
        assert!(gradient(&f).values().iter().all(|&v| v == 0.0));
        assert!(laplacian_scalar(&f).values().iter().all(|&v| v == 0.0));
        let v = VectorField::constant(g, &[1.0, 1.0]);
        assert!(divergence(&v).values().iter().all(|&x| x == 0.0));
        assert!(laplacian_vector(&v).values().iter().all(|&x| x == 0.0));
        assert!(grad_div(&v).values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_of_one_hot() {
        let g = g1(16);
        let h = g.spacing();
        let mut v = vec![0.0; 16];
        v[5] = 1.0;
        let grad = gradient(&ScalarField::new(g, v).unwrap());
        for (i, &d) in grad.values().iter().enumerate() {
            // (f[i+1] - f[i-1]) / 2h
            let expected = match i {
                4 => 1.0 / (2.0 * h),
                6 => -1.0 / (2.0 * h),
                _ => 0.0,
            };
            assert_eq!(d, expected, "cell {i}");
        }
    }

    #[test]
    fn sine_derivatives_are_second_order() {
        let k = 2.0 * PI;
        let mut prev: Option<(f64, f64, f64)> = None;
        for n in [32, 64, 128, 256] {
            let g = g1(n);
            let f = ScalarField::from_fn(g, |x| (k * x[0]).sin());
            let grad = gradient(&f);
            let e_grad = (0..g.cells())
                .map(|i| (grad.values()[i] - k * (k * g.center(i)[0]).cos()).abs())
                .fold(0.0, f64::max);
            let lap = laplacian_scalar(&f);
            let e_lap = (0..g.cells())
                .map(|i| (lap.values()[i] + k * k * (k * g.center(i)[0]).sin()).abs())
                .fold(0.0, f64::max);
            let v = VectorField::from_components(&[ScalarField::from_fn(g, |x| (k * x[0]).cos())])
                .unwrap();
            let div = divergence(&v);
            let e_div = (0..g.cells())
                .map(|i| (div.values()[i] + k * (k * g.center(i)[0]).sin()).abs())
                .fold(0.0, f64::max);
            let h = g.spacing();
            // Leading truncation terms: k^3 h^2 / 6 and k^4 h^2 / 12.
            assert!(e_grad <= k.powi(3) * h * h / 6.0 * 1.01);
            assert!(e_div <= k.powi(3) * h * h / 6.0 * 1.01);
            assert!(e_lap <= k.powi(4) * h * h / 12.0 * 1.01);
            if let Some((pg, pl, pd)) = prev {
                assert!(pg / e_grad >= 3.5);
                assert!(pl / e_lap >= 3.5);
                assert!(pd / e_div >= 3.5);
            }
            prev = Some((e_grad, e_lap, e_div));
        }
    }

    #[test]
    fn integrate_and_norms() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let one = ScalarField::constant(g, 1.0);
        assert!((one.integrate() - 9.0).abs() < 1e-14);

        let g = g1(16);
        let half: Vec<f64> = (0..16).map(|i| if i < 8 { 2.0 } else { 0.0 }).collect();
        let f = ScalarField::new(g, half).unwrap();
        assert!((f.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f.lp_norm(0.5), Err(GridError::Exponent(0.5)));
        let l2 = f.lp_norm(2.0).unwrap();
        let sq = f.map(|v| v * v).integrate();
        assert!((l2 * l2 - sq).abs() <= 1e-12 * sq);
    }

    #[test]
    fn one_dimensional_grad_div_is_composed_laplacian() {
        let g = g1(32);
        let v = VectorField::from_components(&[ScalarField::from_fn(g, |x| {
            (2.0 * PI * x[0]).sin() + 0.3 * (6.0 * PI * x[0]).cos()
        })])
        .unwrap();
        let a = grad_div(&v);
        let b = composed_laplacian_vector(&v);
        assert!(max_diff(a.values(), b.values()) < 1e-10);
    }

    fn field_strategy(dim: usize, n: usize) -> impl Strategy<Value = ScalarField> {
        let cells = n.pow(dim as u32);
        prop::collection::vec(-10.0f64..10.0, cells)
            .prop_map(move |v| ScalarField::new(Grid::new(dim, n, 1.7).unwrap(), v).unwrap())
    }

    proptest! {
        #[test]
        fn div_grad_equals_composed_stencil(f in field_strategy(2, 8)) {
            let a = divergence(&gradient(&f));
            let b = composed_laplacian(&f);
            let scale = f.max_abs() / (f.grid().spacing().powi(2));
            prop_assert!(max_diff(a.values(), b.values()) <= 1e-13 * scale.max(1.0));
        }

        #[test]
        fn operators_commute_with_shift(f in field_strategy(2, 8), axis in 0usize..2, off in -5isize..5) {
            let s = f.shifted(axis, off);
            prop_assert_eq!(gradient(&s), gradient(&f).shifted(axis, off));
            prop_assert_eq!(laplacian_scalar(&s), laplacian_scalar(&f).shifted(axis, off));
            let v = gradient(&f);
            prop_assert_eq!(divergence(&v.shifted(axis, off)), divergence(&v).shifted(axis, off));
            prop_assert_eq!(grad_div(&v.shifted(axis, off)), grad_div(&v).shifted(axis, off));
        }

        #[test]
        fn operators_are_linear(f in field_strategy(1, 16), g in field_strategy(1, 16), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let comb = f.lincomb(a, &g, b).unwrap();
            let scale = 1.0 / f.grid().spacing().powi(2) * 10.0 * (a.abs() + b.abs() + 1.0);
            let lhs = laplacian_scalar(&comb);
            let rhs = laplacian_scalar(&f).lincomb(a, &laplacian_scalar(&g), b).unwrap();
            prop_assert!(max_diff(lhs.values(), rhs.values()) <= 1e-13 * scale);
            let lhs = gradient(&comb);
            let rhs = gradient(&f).lincomb(a, &gradient(&g), b).unwrap();
            prop_assert!(max_diff(lhs.values(), rhs.values()) <= 1e-13 * scale);
        }
    }
}
