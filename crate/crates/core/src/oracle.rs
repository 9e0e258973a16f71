//! Brute-force reference computations. These deliberately avoid the fast
//! paths used elsewhere (no transforms, no expanded identities) so they can
//! serve as independent checks.

use crate::grid::ScalarField;

fn lattice_offset_index(grid: &crate::grid::Grid, to: usize, from: usize) -> usize {
    let n = grid.n();
    let mut idx = 0;
    for axis in 0..grid.dim() {
        let d = (grid.coord(to, axis) + n - grid.coord(from, axis)) % n;
        idx += d * grid.stride(axis);
    }
    idx
}

/// `(φ*f)_j = Σ_i φ(x_j - x_i) f_i h^dim` by direct double loop.
pub fn direct_convolution(kernel: &ScalarField, f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    assert_eq!(kernel.grid(), f.grid());
    let phi = kernel.values();
    let w = grid.cell_volume();
    let out = (0..grid.cells())
        .map(|j| {
            (0..grid.cells())
                .map(|i| phi[lattice_offset_index(&grid, j, i)] * f.values()[i])
                .sum::<f64>()
                * w
        })
        .collect();
    ScalarField::new(grid, out).expect("finite")
}

/// `(κ/4) Σ_x Σ_y φ(x - y) (ρ(y) - ρ(x))² h^{2 dim}`.
pub fn interaction_double_sum(kernel: &ScalarField, rho: &ScalarField, kappa: f64) -> f64 {
    let grid = *rho.grid();
    assert_eq!(kernel.grid(), rho.grid());
    let phi = kernel.values();
    let r = rho.values();
    let mut total = 0.0;
    for x in 0..grid.cells() {
        for y in 0..grid.cells() {
            let d = r[y] - r[x];
            total += phi[lattice_offset_index(&grid, x, y)] * d * d;
        }
    }
    0.25 * kappa * total * grid.cell_volume() * grid.cell_volume()
}

/// `max |a - b| / max |b|`.
pub fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

/// `Σ ½ m²/ρ h^dim` with the vacuum convention, cell by cell.
pub fn kinetic_direct(rho: &[f64], momentum: &[&[f64]], cell_volume: f64, eps_vac: f64) -> f64 {
    let mut total = 0.0;
    for (i, &r) in rho.iter().enumerate() {
        if r < eps_vac {
            continue;
        }
        let mut m2 = 0.0;
        for comp in momentum {
            m2 += comp[i] * comp[i];
        }
        total += 0.5 * m2 / r;
    }
    total * cell_volume
}
