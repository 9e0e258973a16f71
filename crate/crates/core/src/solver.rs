//! Explicit conservative time stepping of the NSK system in `(ρ, m)`.
//!
//! Spatial terms use the centered operators of [`crate::grid`]. Stability
//! comes from a Rusanov-type interface diffusion `½ α (q_R - q_L)` with
//! `α = max(|u_d| + c)` over the two adjacent cells. `q_L` and `q_R` are
//! van Leer limited linear reconstructions, so the added diffusion is
//! second order where the solution is smooth. It is written in flux form
//! and so conserves mass and momentum exactly.
//!
//! The viscous terms `μΔu + (λ+μ)∇div u` pair with the dissipation density
//! `μ|D⁺u|² + (λ+μ)(div u)²` by summation by parts, which is what the
//! energy ledger accumulates.

use thiserror::Error;

use crate::diagnostics::{
    renorm_residual, total_energy, DiagnosticsConfig, DiagnosticsError, EnergyLedger, EquilibriumSpec,
    IntegrabilityMonitor, LedgerColumns, LedgerRecord,
};
use crate::grid::{centered_diff, divergence, forward_diff, laplacian_vector, Grid, GridError, ScalarField, VectorField};
use crate::kernel::{Kernel, KernelError, KernelSpec};
use crate::thermo::{FreeEnergy, PressureLaw};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("viscosity constraint violated (mu = {mu}, lambda = {lambda}): require μ>0 and λ+2μ>0")]
    Viscosity { mu: f64, lambda: f64 },
    #[error("capillarity must satisfy κ ≥ 0, got {0}")]
    Kappa(f64),
    #[error("vacuum threshold must be positive and finite, got {0}")]
    Vacuum(f64),
    #[error("negative density {value} at cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },
    #[error("momentum {value} at cell {cell} where the density is below the vacuum threshold")]
    VacuumMomentum { cell: usize, value: f64 },
    #[error("non-finite value at cell {cell} (t = {t:e})")]
    NonFinite { cell: usize, t: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Physical parameters `μ, λ, κ`, the pressure law and the kernel.
#[derive(Debug, Clone)]
pub struct PhysParams {
    mu: f64,
    lambda: f64,
    kappa: f64,
    law: PressureLaw,
    kernel: Kernel,
}

impl PhysParams {
    pub fn new(
        mu: f64,
        lambda: f64,
        kappa: f64,
        law: PressureLaw,
        kernel: &KernelSpec,
        grid: Grid,
    ) -> Result<Self, SolverError> {
        Self::with_kernel(mu, lambda, kappa, law, Kernel::build(kernel, grid)?)
    }

    pub fn with_kernel(mu: f64, lambda: f64, kappa: f64, law: PressureLaw, kernel: Kernel) -> Result<Self, SolverError> {
        Self::check_viscosity(mu, lambda)?;
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(SolverError::Kappa(kappa));
        }
        Ok(Self {
            mu,
            lambda,
            kappa,
            law,
            kernel,
        })
    }

    pub fn check_viscosity(mu: f64, lambda: f64) -> Result<(), SolverError> {
        if mu.is_finite() && lambda.is_finite() && mu > 0.0 && lambda + 2.0 * mu > 0.0 {
            Ok(())
        } else {
            Err(SolverError::Viscosity { mu, lambda })
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn law(&self) -> &PressureLaw {
        &self.law
    }
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }
}

/// Time, density and momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub rho: ScalarField,
    pub m: VectorField,
}

impl State {
    /// Checks `ρ >= 0` and `m = 0` wherever `ρ = 0`.
    pub fn new(t: f64, rho: ScalarField, m: VectorField) -> Result<Self, SolverError> {
        if rho.grid() != m.grid() {
            return Err(GridError::Mismatch.into());
        }
        if let Some(cell) = rho.values().iter().position(|&r| r < 0.0) {
            return Err(SolverError::NegativeDensity {
                cell,
                value: rho.values()[cell],
            });
        }
        let cells = rho.values().len();
        for (k, &v) in m.values().iter().enumerate() {
            if v != 0.0 && rho.values()[k % cells] == 0.0 {
                return Err(SolverError::VacuumMomentum { cell: k % cells, value: v });
            }
        }
        Ok(Self { t, rho, m })
    }

    /// `(ρ̄, ρ̄u)` everywhere.
    pub fn uniform(grid: Grid, rho: f64, u: &[f64]) -> Self {
        let m: Vec<f64> = u.iter().map(|v| rho * v).collect();
        Self {
            t: 0.0,
            rho: ScalarField::constant(grid, rho),
            m: VectorField::constant(grid, &m),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    pub fn mass(&self) -> f64 {
        self.rho.integrate()
    }

    pub fn momentum(&self) -> Vec<f64> {
        self.m.integrate()
    }

    /// `x -> -x` with the momentum reversed.
    pub fn mirrored(&self) -> Self {
        Self {
            t: self.t,
            rho: self.rho.mirrored(),
            m: self.m.mirrored().map(|v| -v),
        }
    }
}

/// `u = m/ρ` where `ρ >= eps_vac`, zero elsewhere.
pub fn velocity(rho: &ScalarField, m: &VectorField, eps_vac: f64) -> VectorField {
    let cells = rho.values().len();
    let vals = m
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let r = rho.values()[k % cells];
            if r >= eps_vac {
                v / r
            } else {
                0.0
            }
        })
        .collect();
    VectorField::from_raw(*rho.grid(), vals)
}

/// Result of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: State,
    /// Mass added by the vacuum floor, `Σ (ε_vac - ρ)⁺ h^dim`.
    pub vacuum_mass: f64,
    /// `dt` times the dissipation rate at the midpoint stage.
    pub dissipation: f64,
}

#[inline]
fn van_leer(a: f64, b: f64) -> f64 {
    if a * b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

/// The spatial discretization together with the vacuum threshold.
#[derive(Debug, Clone)]
pub struct Solver {
    params: PhysParams,
    eps_vac: f64,
}

impl Solver {
    pub fn new(params: PhysParams, eps_vac: f64) -> Result<Self, SolverError> {
        if !(eps_vac.is_finite() && eps_vac > 0.0) {
            return Err(SolverError::Vacuum(eps_vac));
        }
        Ok(Self { params, eps_vac })
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn eps_vac(&self) -> f64 {
        self.eps_vac
    }

    pub fn velocity(&self, state: &State) -> VectorField {
        velocity(&state.rho, &state.m, self.eps_vac)
    }

    fn sound_speed(&self, rho: f64) -> f64 {
        let r = rho.max(0.0);
        (self.params.law.dp(r).max(0.0) + self.params.kappa * r).sqrt()
    }

    /// Time derivatives `(dρ/dt, dm/dt)`.
    pub fn rhs(&self, state: &State) -> Result<(ScalarField, VectorField), SolverError> {
        let grid = *state.grid();
        if grid != *self.params.kernel.grid() {
            return Err(GridError::Mismatch.into());
        }
        let (cells, dim) = (grid.cells(), grid.dim());
        let h = grid.spacing();
        let rho = state.rho.values();
        let m = state.m.values();
        let u_field = self.velocity(state);
        let u = u_field.values();
        let mut tmp = vec![0.0; cells];

        let mut drho = vec![0.0; cells];
        for d in 0..dim {
            centered_diff(&grid, &m[d * cells..(d + 1) * cells], d, &mut tmp);
            for (o, t) in drho.iter_mut().zip(&tmp) {
                *o -= t;
            }
        }

        let pressure: Vec<f64> = rho.iter().map(|&r| self.params.law.p(r.max(0.0))).collect();
        let lap = laplacian_vector(&u_field);
        let div_u = divergence(&u_field);
        let cap = self.params.kernel.capillary_force(&state.rho, self.params.kappa)?;
        let (mu, xi) = (self.params.mu, self.params.lambda + self.params.mu);
        let mut dm = vec![0.0; cells * dim];
        let mut flux = vec![0.0; cells];
        for c in 0..dim {
            let out = &mut dm[c * cells..(c + 1) * cells];
            for d in 0..dim {
                for i in 0..cells {
                    flux[i] = m[c * cells + i] * u[d * cells + i];
                }
                centered_diff(&grid, &flux, d, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o -= t;
                }
            }
            centered_diff(&grid, &pressure, c, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o -= t;
            }
            centered_diff(&grid, div_u.values(), c, &mut tmp);
            let lap_c = lap.component(c);
            let cap_c = cap.component(c);
            for i in 0..cells {
                out[i] += mu * lap_c[i] + xi * tmp[i] + cap_c[i];
            }
        }

        // Interface diffusion.
        let speed: Vec<f64> = rho.iter().map(|&r| self.sound_speed(r)).collect();
        let mut alpha = vec![0.0; cells];
        let mut jump = vec![0.0; cells];
        for d in 0..dim {
            let ud = &u[d * cells..(d + 1) * cells];
            for (i, a) in alpha.iter_mut().enumerate() {
                let j = grid.shift(i, d, 1);
                *a = (ud[i].abs() + speed[i]).max(ud[j].abs() + speed[j]);
            }
            let mut diffuse = |q: &[f64], out: &mut [f64]| {
                for (i, jmp) in jump.iter_mut().enumerate() {
                    let (im, ip, ipp) = (grid.shift(i, d, -1), grid.shift(i, d, 1), grid.shift(i, d, 2));
                    let s_i = van_leer(q[i] - q[im], q[ip] - q[i]);
                    let s_ip = van_leer(q[ip] - q[i], q[ipp] - q[ip]);
                    let left = q[i] + 0.5 * s_i;
                    let right = q[ip] - 0.5 * s_ip;
                    *jmp = 0.5 * alpha[i] * (right - left) / h;
                }
                for (i, o) in out.iter_mut().enumerate() {
                    *o += jump[i] - jump[grid.shift(i, d, -1)];
                }
            };
            diffuse(rho, &mut drho);
            for c in 0..dim {
                diffuse(&m[c * cells..(c + 1) * cells], &mut dm[c * cells..(c + 1) * cells]);
            }
        }

        if let Some(k) = drho.iter().chain(&dm).position(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite {
                cell: k % cells,
                t: state.t,
            });
        }
        Ok((ScalarField::from_raw(grid, drho), VectorField::from_raw(grid, dm)))
    }

    /// `∫ μ|D⁺u|² + (λ+μ)(div u)²`.
    pub fn dissipation_rate(&self, state: &State) -> f64 {
        let grid = *state.grid();
        let (cells, dim) = (grid.cells(), grid.dim());
        let u = self.velocity(state);
        let mut tmp = vec![0.0; cells];
        let mut grad_sq = 0.0;
        for c in 0..dim {
            for d in 0..dim {
                forward_diff(&grid, u.component(c), d, &mut tmp);
                grad_sq += tmp.iter().map(|v| v * v).sum::<f64>();
            }
        }
        let div_sq: f64 = divergence(&u).values().iter().map(|v| v * v).sum();
        (self.params.mu * grad_sq + (self.params.lambda + self.params.mu) * div_sq) * grid.cell_volume()
    }

    /// `c_cfl · min(h/(|u|max + c_max), h²/(2·dim·ν_max))`.
    pub fn cfl_dt(&self, state: &State, c_cfl: f64) -> f64 {
        let grid = state.grid();
        let h = grid.spacing();
        let u = self.velocity(state);
        let cells = grid.cells();
        let mut umax: f64 = 0.0;
        for i in 0..cells {
            let s: f64 = (0..grid.dim()).map(|c| u.component(c)[i].powi(2)).sum();
            umax = umax.max(s.sqrt());
        }
        let cmax = state.rho.values().iter().fold(0.0f64, |a, &r| a.max(self.sound_speed(r)));
        let rho_min = state.rho.min().max(self.eps_vac);
        let nu = (2.0 * self.params.mu + self.params.lambda.abs()) / rho_min;
        let acoustic = if umax + cmax > 0.0 { h / (umax + cmax) } else { f64::INFINITY };
        let viscous = h * h / (2.0 * grid.dim() as f64 * nu);
        c_cfl * acoustic.min(viscous)
    }

    fn add_scaled(&self, state: &State, dt: f64, drho: &ScalarField, dm: &VectorField) -> State {
        let grid = *state.grid();
        let rho = state.rho.values().iter().zip(drho.values()).map(|(r, d)| r + dt * d).collect();
        let m = state.m.values().iter().zip(dm.values()).map(|(r, d)| r + dt * d).collect();
        State {
            t: state.t + dt,
            rho: ScalarField::from_raw(grid, rho),
            m: VectorField::from_raw(grid, m),
        }
    }

    /// One explicit midpoint step followed by the vacuum projection.
    pub fn step(&self, state: &State, dt: f64) -> Result<StepOutcome, SolverError> {
        let (k1_rho, k1_m) = self.rhs(state)?;
        let mid = self.add_scaled(state, 0.5 * dt, &k1_rho, &k1_m);
        let (k2_rho, k2_m) = self.rhs(&mid)?;
        let dissipation = dt * self.dissipation_rate(&mid);
        let mut next = self.add_scaled(state, dt, &k2_rho, &k2_m);
        let vacuum_mass = self.project_vacuum(&mut next);
        if let Some(k) = next.rho.values().iter().chain(next.m.values()).position(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite {
                cell: k % next.grid().cells(),
                t: next.t,
            });
        }
        Ok(StepOutcome {
            state: next,
            vacuum_mass,
            dissipation,
        })
    }

    /// Raises `ρ < ε_vac` to `ε_vac`, zeroes `m` there, returns the added mass.
    fn project_vacuum(&self, state: &mut State) -> f64 {
        let grid = *state.grid();
        let cells = grid.cells();
        let mut rho = std::mem::replace(&mut state.rho, ScalarField::zeros(grid)).into_values();
        let mut m = std::mem::replace(&mut state.m, VectorField::zeros(grid)).values().to_vec();
        let mut added = 0.0;
        for i in 0..cells {
            if rho[i] < self.eps_vac {
                added += self.eps_vac - rho[i];
                rho[i] = self.eps_vac;
                for c in 0..grid.dim() {
                    m[c * cells + i] = 0.0;
                }
            }
        }
        state.rho = ScalarField::from_raw(grid, rho);
        state.m = VectorField::from_raw(grid, m);
        added * grid.cell_volume()
    }

    fn record(
        &self,
        state: &State,
        free: &FreeEnergy,
        dissipation_cum: f64,
        vacuum_cum: f64,
        equilibrium: Option<&EquilibriumSpec>,
        monitor: Option<&IntegrabilityMonitor>,
        renorm: Option<f64>,
    ) -> Result<LedgerRecord, DiagnosticsError> {
        let e = total_energy(state, &self.params, free, self.eps_vac)?;
        let equilibrium = match equilibrium {
            Some(spec) => Some(crate::diagnostics::equilibrium_energy(state, &self.params, spec, self.eps_vac)?),
            None => None,
        };
        Ok(LedgerRecord {
            t: state.t,
            mass: state.mass(),
            momentum: state.momentum(),
            kinetic: e.kinetic,
            free: e.free,
            nonlocal: e.nonlocal,
            dissipation_cum,
            vacuum_cum,
            equilibrium,
            monitor: monitor.map(|m| (m.accumulated(), m.average())),
            renorm,
        })
    }

    /// Advances `initial` to `control.t_end`, recording the ledger.
    pub fn run(&self, initial: State, control: &RunControl, diag: &DiagnosticsConfig) -> Result<RunOutcome, RunError> {
        control.validate()?;
        let free = FreeEnergy::new(self.params.law.clone());
        let columns = LedgerColumns {
            equilibrium: diag.equilibrium.is_some(),
            monitor: diag.monitor.is_some(),
            renorm: diag.renorm.is_some(),
        };
        let mut ledger = EnergyLedger::new(initial.grid().dim(), columns);
        let mut monitor = match diag.monitor {
            Some(spec) => Some(IntegrabilityMonitor::new(spec, initial.t, &initial.rho)?),
            None => None,
        };
        let (mut dissipation_cum, mut vacuum_cum) = (0.0, 0.0);
        let mut snapshots = Vec::new();
        let t_end = control.t_end;

        ledger.push(self.record(&initial, &free, 0.0, 0.0, diag.equilibrium.as_ref(), monitor.as_ref(), None)?)?;
        if control.snapshot_every > 0 {
            snapshots.push((0, initial.clone()));
        }

        let mut state = initial;
        let mut previous: Option<(State, f64)> = None;
        let mut steps = 0usize;
        while state.t < t_end {
            if let Some(max) = control.max_steps {
                if steps >= max {
                    return Err(RunError::StepLimit { steps, t: state.t });
                }
            }
            let limit = self.cfl_dt(&state, control.c_cfl);
            let mut dt = match control.fixed_dt {
                Some(dt) => {
                    let hard = self.cfl_dt(&state, 1.0);
                    if dt > hard {
                        return Err(RunError::TimeStep { dt, limit: hard, t: state.t });
                    }
                    dt
                }
                None => limit,
            };
            let last = state.t + dt >= t_end * (1.0 - 1e-12) || t_end - (state.t + dt) < 1e-9 * dt;
            if last {
                dt = t_end - state.t;
            }
            let out = match self.step(&state, dt) {
                Ok(out) => out,
                Err(SolverError::NonFinite { cell, t }) => {
                    return Err(RunError::BlowUp {
                        step: steps,
                        t,
                        cell,
                        last_good: Box::new(state),
                    })
                }
                Err(e) => return Err(e.into()),
            };
            steps += 1;
            dissipation_cum += out.dissipation;
            vacuum_cum += out.vacuum_mass;
            let mut next = out.state;
            if last {
                next.t = t_end;
            }
            if let Some(m) = monitor.as_mut() {
                m.advance(next.t, &next.rho);
            }
            if diag.renorm.is_some() {
                previous = Some((state, dt));
            }
            state = next;

            let emit = last || steps % control.record_every == 0;
            if emit {
                let renorm = match (diag.renorm, &previous) {
                    (Some(b), Some((prev, dt_prev))) => {
                        // Probe step with the same dt for a centered time difference.
                        match self.step(&state, *dt_prev) {
                            Ok(probe) => Some(renorm_residual(prev, &state, &probe.state, b, self.eps_vac)?),
                            Err(_) => None,
                        }
                    }
                    _ => None,
                };
                ledger.push(self.record(
                    &state,
                    &free,
                    dissipation_cum,
                    vacuum_cum,
                    diag.equilibrium.as_ref(),
                    monitor.as_ref(),
                    renorm,
                )?)?;
            }
            if control.snapshot_every > 0 && (last || steps % control.snapshot_every == 0) {
                snapshots.push((steps, state.clone()));
            }
            if last {
                break;
            }
        }
        Ok(RunOutcome {
            final_state: state,
            ledger,
            snapshots,
            steps,
        })
    }
}

/// Time-stepping controls for [`Solver::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunControl {
    pub t_end: f64,
    pub c_cfl: f64,
    /// Use this step instead of the adaptive one; must not exceed the `c_cfl = 1` limit.
    pub fixed_dt: Option<f64>,
    /// Ledger record every this many steps (and always at the start and end).
    pub record_every: usize,
    /// Snapshot every this many steps; 0 disables snapshots.
    pub snapshot_every: usize,
    pub max_steps: Option<usize>,
}

impl Default for RunControl {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            c_cfl: 0.5,
            fixed_dt: None,
            record_every: 10,
            snapshot_every: 0,
            max_steps: None,
        }
    }
}

impl RunControl {
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |what: &'static str, value: f64| Err(RunError::Control { what, value });
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad("t_end must be nonnegative", self.t_end);
        }
        if !(self.c_cfl > 0.0 && self.c_cfl <= 1.0) {
            return bad("c_cfl must lie in (0, 1]", self.c_cfl);
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return bad("fixed dt must be positive", dt);
            }
        }
        if self.record_every == 0 {
            return bad("record cadence must be at least 1", 0.0);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub final_state: State,
    pub ledger: EnergyLedger,
    /// `(step, state)` pairs at the snapshot cadence.
    pub snapshots: Vec<(usize, State)>,
    pub steps: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("blow-up at step {step} (t = {t:e}): non-finite value at cell {cell}")]
    BlowUp {
        step: usize,
        t: f64,
        cell: usize,
        last_good: Box<State>,
    },
    #[error("fixed dt = {dt} exceeds the stability limit {limit} at t = {t:e}")]
    TimeStep { dt: f64, limit: f64, t: f64 },
    #[error("step limit reached after {steps} steps at t = {t:e}")]
    StepLimit { steps: usize, t: f64 },
    #[error("invalid run control: {what} (got {value})")]
    Control { what: &'static str, value: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}
