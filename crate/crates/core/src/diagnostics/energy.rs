use super::DiagnosticsError;
use crate::grid::{divergence, ScalarField};
use crate::solver::{velocity, PhysParams, State};
use crate::thermo::FreeEnergy;

/// The three parts of the total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub free: f64,
    pub nonlocal: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.free + self.nonlocal
    }
}

/// `∫ ½|m|²/ρ`, with the density taken as zero on cells below `eps_vac`.
pub fn kinetic_energy(state: &State, eps_vac: f64) -> f64 {
    let grid = state.rho.grid();
    let cells = grid.cells();
    let rho = state.rho.values();
    let m = state.m.values();
    let mut total = 0.0;
    for (i, &r) in rho.iter().enumerate() {
        if r < eps_vac {
            continue;
        }
        let m2: f64 = (0..grid.dim()).map(|c| m[c * cells + i] * m[c * cells + i]).sum();
        total += 0.5 * m2 / r;
    }
    total * grid.cell_volume()
}

/// Kinetic, free and interaction energy of a state.
pub fn total_energy(
    state: &State,
    params: &PhysParams,
    free: &FreeEnergy,
    eps_vac: f64,
) -> Result<EnergyParts, DiagnosticsError> {
    let mut pi = 0.0;
    for &r in state.rho.values() {
        pi += free.eval(r)?;
    }
    Ok(EnergyParts {
        kinetic: kinetic_energy(state, eps_vac),
        free: pi * state.rho.grid().cell_volume(),
        nonlocal: params.kernel().interaction_energy(&state.rho, params.kappa())?,
    })
}

/// `P(ρ) + (κ/2)ρ² - (2μ+λ) div u`.
pub fn effective_flux(state: &State, params: &PhysParams, eps_vac: f64) -> Result<ScalarField, DiagnosticsError> {
    let u = velocity(&state.rho, &state.m, eps_vac);
    let div = divergence(&u);
    let zeta = 2.0 * params.mu() + params.lambda();
    let law = params.law();
    let kappa = params.kappa();
    Ok(state.rho.zip_with(&div, |r, d| {
        law.p(r.max(0.0)) + 0.5 * kappa * r * r - zeta * d
    })?)
}
