//! Periodic-grid simulator for the isothermal compressible
//! Navier–Stokes–Korteweg system with nonlocal capillarity
//! `D[ρ] = φ*ρ - ρ`, together with the energy functionals, pressure laws and
//! weak-solution diagnostics used to check it.
//!
//! Module map:
//! - [`grid`]: periodic lattices, fields and centered difference operators.
//! - [`kernel`]: capillarity kernels, spectral convolution, `D[ρ]`, the
//!   capillary force and the interaction energy.
//! - [`thermo`]: pressure laws, free energy, the Van der Waals splitting,
//!   `j_γ` and Orlicz norms.
//! - [`solver`]: conservative explicit time stepping and the run loop.
//! - [`diagnostics`]: energy ledger, effective flux, renormalized transport
//!   residuals, cut-offs, integrability monitor, equilibrium functionals.
//! - [`config`], [`scenario`], [`output`]: configuration files, initial data
//!   and artifact writing for the `nsk` binary.

pub mod config;
pub mod diagnostics;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod oracle;
pub mod output;
pub mod scenario;
pub mod solver;
pub mod suites;
pub mod thermo;

pub use grid::{Grid, GridError, ScalarField, VectorField};
pub use kernel::{Kernel, KernelError, KernelSpec};
pub use solver::{PhysParams, Solver, State};
pub use thermo::{FreeEnergy, PressureLaw, ThermoError};
