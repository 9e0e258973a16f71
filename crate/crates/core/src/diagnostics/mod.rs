//! Functionals and identities evaluated along trajectories: energies and
//! dissipation, the effective viscous flux, renormalized transport residuals,
//! cut-off functions, the integrability monitor and the equilibrium
//! functionals.

mod cutoff;
mod energy;
mod equilibrium;
mod ledger;
mod monitor;
mod renorm;

use thiserror::Error;

use crate::grid::GridError;
use crate::thermo::ThermoError;

pub use cutoff::{cutoff_l, cutoff_l_slope, cutoff_t, cutoff_t_slope, t_profile};
pub use energy::{effective_flux, kinetic_energy, total_energy, EnergyParts};
pub use equilibrium::{equilibrium_energy, orlicz_perturbation_norm, EquilibriumRecord, EquilibriumSpec};
pub use ledger::{EnergyLedger, LedgerColumns, LedgerRecord};
pub use monitor::{IntegrabilityMonitor, MonitorSpec};
pub use renorm::{mass_residual, renorm_residual, RenormFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("snapshots are not equally spaced in time: {first} vs {second}")]
    NonUniformTime { first: f64, second: f64 },
    #[error("snapshot times must increase: {0}")]
    TimeOrder(String),
    #[error("integrability exponent eps = {eps} outside the window 0<ε≤4/N−1 (N = {n_formal}, upper bound {upper})")]
    EpsilonWindow { eps: f64, n_formal: usize, upper: f64 },
    #[error("formal dimension must be at least 2, got {0}")]
    FormalDimension(usize),
    #[error("gamma = 1 needs the logarithmic extension flag for the equilibrium energy")]
    IsothermalEquilibrium,
    #[error("invalid {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("ledger column mismatch: {0}")]
    Columns(String),
}

/// Optional diagnostics attached to a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsConfig {
    pub monitor: Option<MonitorSpec>,
    pub equilibrium: Option<EquilibriumSpec>,
    pub renorm: Option<RenormFunction>,
}
