//! Pressure laws, free energy, the Van der Waals monotone splitting, the
//! relative free energy `j_γ` and Orlicz norms.

mod free_energy;
mod law;
mod orlicz;
mod split;

use thiserror::Error;

pub use free_energy::{FreeEnergy, FreeEnergyBranch};
pub use law::{Isentropic, MonotoneTable, PressureLaw, VanDerWaals};
pub use orlicz::{orlicz_norm, orlicz_psi};
pub use split::{SplitPressure, MOLLIFIER_CELLS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("density must be nonnegative and finite, got {0}")]
    NegativeDensity(f64),
    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid pressure table: {0}")]
    Table(String),
    #[error("quadrature of P(z)/z^2 failed to converge on [{lo}, {hi}] (non-integrable singularity?)")]
    Quadrature { lo: f64, hi: f64 },
    #[error("free-energy branch {0:?} is not available for this pressure law")]
    BranchUnavailable(FreeEnergyBranch),
    #[error("P' = {slope} < 0 at rho = {rho} inside the forced-monotone extension")]
    NonMonotoneExtension { rho: f64, slope: f64 },
    #[error("field contains a non-finite value")]
    NonFinite,
}

/// Relative free energy `j_γ(ρ) = ρ^γ + (γ-1) ρ̄^γ - γ ρ̄^{γ-1} ρ`.
///
/// Convex in `ρ` with minimum 0 at `ρ = ρ̄`.
pub fn j_gamma(rho: f64, rho_bar: f64, gamma: f64) -> f64 {
    rho.powf(gamma) + (gamma - 1.0) * rho_bar.powf(gamma) - gamma * rho_bar.powf(gamma - 1.0) * rho
}
