//! Oracle suites behind `nsk oracle <suite>`.
//!
//! Each suite compares a fast path against an independent brute-force or
//! closed-form reference over a fixed set of seeded cases and reports one
//! row per case. The acceptance harness reuses them.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagnostics::{
    cutoff_l, cutoff_t, equilibrium_energy, kinetic_energy, DiagnosticsError, EquilibriumSpec,
};
use crate::grid::{Grid, GridError, ScalarField, VectorField};
use crate::kernel::{Kernel, KernelError, KernelSpec};
use crate::oracle;
use crate::solver::{PhysParams, SolverError, State};
use crate::thermo::{orlicz_norm, orlicz_psi, FreeEnergy, PressureLaw, SplitPressure, ThermoError};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}` (available: {list})", list = SUITES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

pub const SUITES: [&str; 9] = [
    "convolution",
    "energy",
    "exchange",
    "thermo",
    "split",
    "cutoff",
    "orlicz",
    "kinetic",
    "equilibrium",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub case: String,
    pub value: f64,
    pub bound: Bound,
}

impl CaseResult {
    pub fn pass(&self) -> bool {
        self.bound.holds(self.value)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    /// What `value` measures.
    pub metric: &'static str,
    pub cases: Vec<CaseResult>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(CaseResult::pass)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass()).count()
    }

    /// Worst value relative to the bound direction.
    pub fn worst(&self) -> Option<&CaseResult> {
        self.cases.iter().max_by(|a, b| {
            let key = |c: &CaseResult| match c.bound {
                Bound::AtMost(_) => c.value,
                Bound::AtLeast(_) => -c.value,
            };
            key(a).total_cmp(&key(b))
        })
    }

    pub fn table(&self) -> String {
        let width = self.cases.iter().map(|c| c.case.len()).max().unwrap_or(4).max(4);
        let mut out = format!("suite {} ({})\n", self.suite, self.metric);
        let _ = writeln!(out, "  {:<width$}  {:>12}  {:>14}  result", "case", "value", "bound");
        for c in &self.cases {
            let bound = match c.bound {
                Bound::AtMost(b) => format!("<= {b:.3e}"),
                Bound::AtLeast(b) => format!(">= {b:.3e}"),
            };
            let _ = writeln!(
                out,
                "  {:<width$}  {:>12.4e}  {:>14}  {}",
                c.case,
                c.value,
                bound,
                if c.pass() { "PASS" } else { "FAIL" }
            );
        }
        let _ = write!(
            out,
            "{} cases, {} failed, {:.2}s",
            self.cases.len(),
            self.failures(),
            self.elapsed.as_secs_f64()
        );
        out
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport, SuiteError> {
    let start = Instant::now();
    let (metric, cases) = match name {
        "convolution" => ("max relative error, spectral vs direct sum", convolution()?),
        "energy" => ("relative error, expanded form vs double sum", energy()?),
        "exchange" => ("error ratio under dt halving", exchange()?),
        "thermo" => ("max relative residual of P = sΠ' - Π", thermo()?),
        "split" => ("splitting property measure", split()?),
        "cutoff" => ("max deviation from the defining property", cutoff()),
        "orlicz" => ("|∫Ψ(f/‖f‖) - 1|", orlicz()?),
        "kinetic" => ("relative error vs direct summation", kinetic()?),
        "equilibrium" => ("deviation from closed form", equilibrium()?),
        other => return Err(SuiteError::Unknown(other.to_owned())),
    };
    Ok(SuiteReport {
        suite: SUITES.iter().find(|s| **s == name).copied().expect("matched"),
        metric,
        cases,
        elapsed: start.elapsed(),
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_field(grid: Grid, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Result<ScalarField, GridError> {
    ScalarField::new(grid, (0..grid.cells()).map(|_| rng.gen_range(lo..hi)).collect())
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn convolution() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    let mut r = rng(1);
    let specs = [KernelSpec::Gaussian { sigma: 0.05 }, KernelSpec::Tent { radius: 0.15 }];
    for (dim, n, count) in [(1, 64, 20), (2, 32, 5)] {
        let grid = Grid::new(dim, n, 1.0)?;
        for i in 0..count {
            let kernel = Kernel::build(&specs[i % 2], grid)?;
            let f = random_field(grid, &mut r, -1.0, 1.0)?;
            let fast = kernel.convolve(&f)?;
            let slow = oracle::direct_convolution(kernel.samples(), &f);
            cases.push(CaseResult {
                case: format!("{dim}d n={n} #{i}"),
                value: oracle::max_rel_error(fast.values(), slow.values()),
                bound: Bound::AtMost(1e-11),
            });
        }
    }
    Ok(cases)
}

fn energy() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    let mut r = rng(2);
    for (dim, count) in [(1, 5), (2, 5)] {
        let grid = Grid::new(dim, 32, 1.0)?;
        let kernel = Kernel::build(&KernelSpec::Gaussian { sigma: 0.06 }, grid)?;
        for i in 0..count {
            let rho = random_field(grid, &mut r, 0.1, 2.0)?;
            let kappa = r.gen_range(0.5..3.0);
            let fast = kernel.interaction_energy(&rho, kappa)?;
            let slow = oracle::interaction_double_sum(kernel.samples(), &rho, kappa);
            cases.push(CaseResult {
                case: format!("{dim}d n=32 #{i}"),
                value: rel(fast, slow),
                bound: Bound::AtMost(1e-10),
            });
        }
    }
    Ok(cases)
}

/// Smooth density path and its exact time derivative. The second mode has
/// a time-dependent amplitude so the energy changes in every dimension
/// (pure translations leave it invariant).
fn exchange_path(grid: Grid, t: f64) -> (ScalarField, ScalarField) {
    let rho = ScalarField::from_fn(grid, |x| {
        let y = if grid.dim() == 2 { x[1] } else { 0.0 };
        1.0 + 0.3 * (2.0 * PI * x[0] + t).sin() + 0.2 * t.cos() * (2.0 * PI * (x[0] + 2.0 * y)).cos()
    });
    let drho = ScalarField::from_fn(grid, |x| {
        let y = if grid.dim() == 2 { x[1] } else { 0.0 };
        0.3 * (2.0 * PI * x[0] + t).cos() - 0.2 * t.sin() * (2.0 * PI * (x[0] + 2.0 * y)).cos()
    });
    (rho, drho)
}

/// Error of the centered difference of `E_global` against `-κ∫D[ρ]∂tρ`.
pub fn exchange_error(kernel: &Kernel, kappa: f64, t: f64, dt: f64) -> Result<f64, SuiteError> {
    let grid = *kernel.grid();
    let (plus, _) = exchange_path(grid, t + dt);
    let (minus, _) = exchange_path(grid, t - dt);
    let fd = (kernel.interaction_energy(&plus, kappa)? - kernel.interaction_energy(&minus, kappa)?) / (2.0 * dt);
    let (rho, drho) = exchange_path(grid, t);
    let exact = -kappa * kernel.capillarity(&rho)?.zip_with(&drho, |d, r| d * r)?.integrate();
    Ok((fd - exact).abs())
}

fn exchange() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    for (dim, n) in [(1, 128), (2, 32)] {
        let grid = Grid::new(dim, n, 1.0)?;
        let kernel = Kernel::build(&KernelSpec::Gaussian { sigma: 0.08 }, grid)?;
        for t in [0.3, 1.1] {
            let coarse = exchange_error(&kernel, 2.0, t, 1e-3)?;
            let fine = exchange_error(&kernel, 2.0, t, 5e-4)?;
            cases.push(CaseResult {
                case: format!("{dim}d n={n} t={t}"),
                value: coarse / fine,
                bound: Bound::AtLeast(3.5),
            });
        }
    }
    Ok(cases)
}

/// `|P - (sΠ' - Π)| / (|P| + |sΠ'|)` with `Π'` from a fourth-order difference.
pub fn thermo_residual(fe: &FreeEnergy, s: f64) -> Result<f64, ThermoError> {
    let h = 1e-3 * s;
    let f = |x: f64| fe.eval(x);
    let d = (-f(s + 2.0 * h)? + 8.0 * f(s + h)? - 8.0 * f(s - h)? + f(s - 2.0 * h)?) / (12.0 * h);
    let p = fe.law().pressure(s)?;
    let rhs = s * d - fe.eval(s)?;
    Ok((p - rhs).abs() / (p.abs() + (s * d).abs()).max(f64::MIN_POSITIVE))
}

fn thermo() -> Result<Vec<CaseResult>, SuiteError> {
    let laws = [
        ("isentropic γ=1", PressureLaw::isentropic(1.0, 1.0)?, 4.0),
        ("isentropic γ=1.4", PressureLaw::isentropic(1.0, 1.4)?, 4.0),
        ("isentropic γ=2", PressureLaw::isentropic(1.0, 2.0)?, 4.0),
        ("isentropic γ=3", PressureLaw::isentropic(1.0, 3.0)?, 4.0),
        ("vdW RT=0.1 a=b=1", PressureLaw::van_der_waals(1.0, 0.1, 1.0, 1.0, 0.05)?, 2.0),
        ("vdW RT=0.25 a=1 b=1", PressureLaw::van_der_waals(1.0, 0.25, 1.0, 1.0, 0.1)?, 2.0),
    ];
    let mut cases = Vec::new();
    for (name, law, s_max) in laws {
        let fe = FreeEnergy::new(law);
        let mut worst = 0.0f64;
        for i in 0..100 {
            let s = 0.02 + (s_max - 0.02) * i as f64 / 99.0;
            worst = worst.max(thermo_residual(&fe, s)?);
        }
        cases.push(CaseResult {
            case: name.to_owned(),
            value: worst,
            bound: Bound::AtMost(1e-6),
        });
    }
    Ok(cases)
}

fn split() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    for (name, (t_star, a, b, theta)) in [
        ("RT=0.1 a=b=1", (0.1, 1.0, 1.0, 0.05)),
        ("RT=0.2 a=1.5 b=1", (0.2, 1.5, 1.0, 0.05)),
    ] {
        let law = match PressureLaw::van_der_waals(1.0, t_star, a, b, theta)? {
            PressureLaw::VanDerWaals(l) => l,
            _ => unreachable!("constructor returns the Van der Waals variant"),
        };
        let sp = SplitPressure::new(&law)?;
        let rho_max = 2.0 * sp.rho_bar_split();
        let count = 10_000;
        let rhos: Vec<f64> = (0..count).map(|i| rho_max * i as f64 / (count - 1) as f64).collect();
        let p1: Vec<f64> = rhos.iter().map(|&r| sp.p1(r)).collect();
        let min_step = p1.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let min_p2 = rhos.iter().map(|&r| sp.p2(r)).fold(f64::INFINITY, f64::min);
        let tail = rhos
            .iter()
            .filter(|&&r| r >= sp.rho_bar_split())
            .map(|&r| sp.p2(r).abs())
            .fold(0.0, f64::max);
        let recon = rhos
            .iter()
            .map(|&r| {
                let p = law.p(r);
                (sp.p1(r) - sp.p2(r) - p).abs() / (1.0 + p.abs())
            })
            .fold(0.0, f64::max);
        cases.extend([
            CaseResult {
                case: format!("{name}: min forward difference of P1"),
                value: min_step,
                bound: Bound::AtLeast(-1e-9),
            },
            CaseResult {
                case: format!("{name}: min P2"),
                value: min_p2,
                bound: Bound::AtLeast(0.0),
            },
            CaseResult {
                case: format!("{name}: max |P2| beyond split density"),
                value: tail,
                bound: Bound::AtMost(0.0),
            },
            CaseResult {
                case: format!("{name}: reconstruction P1-P2 vs P"),
                value: recon,
                bound: Bound::AtMost(1e-9),
            },
        ]);
    }
    Ok(cases)
}

fn cutoff() -> Vec<CaseResult> {
    let mut cases = Vec::new();
    for k in [1.0, 2.5, 10.0] {
        let below = (0..=1000)
            .map(|i| {
                let z = k * i as f64 / 1000.0;
                (cutoff_t(z, k) - z).abs()
            })
            .fold(0.0, f64::max);
        let above = (0..=1000)
            .map(|i| {
                let z = 3.0 * k + 0.01 * k * i as f64;
                (cutoff_t(z, k) - 2.0 * k).abs()
            })
            .fold(0.0, f64::max);
        let h = 1e-3 * k;
        let concavity = (1..5000)
            .map(|i| {
                let z = i as f64 * h;
                cutoff_t(z - h, k) - 2.0 * cutoff_t(z, k) + cutoff_t(z + h, k)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let entropy = (1..=1000)
            .map(|i| {
                let r = k * i as f64 / 1000.0;
                rel(cutoff_l(r, k), r * r.ln())
            })
            .fold(0.0, f64::max);
        cases.extend([
            CaseResult {
                case: format!("k={k}: T_k(z) = z on [0,k]"),
                value: below,
                bound: Bound::AtMost(0.0),
            },
            CaseResult {
                case: format!("k={k}: T_k(z) = 2k on [3k,∞)"),
                value: above,
                bound: Bound::AtMost(0.0),
            },
            CaseResult {
                case: format!("k={k}: max second difference of T_k"),
                value: concavity,
                bound: Bound::AtMost(1e-12),
            },
            CaseResult {
                case: format!("k={k}: L_k vs ρ ln ρ on (0,k]"),
                value: entropy,
                bound: Bound::AtMost(f64::EPSILON),
            },
        ]);
    }
    cases
}

fn orlicz() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    let mut r = rng(8);
    for i in 0..10 {
        let grid = Grid::new(1 + i % 2, 32, 1.0)?;
        let scale = [0.01, 0.3, 1.0, 5.0, 40.0][i % 5];
        let f = random_field(grid, &mut r, -scale, scale)?;
        let (p, q, delta) = (2.0, [2.0, 3.0, 4.0][i % 3], 1.0);
        let norm = orlicz_norm(&f, p, q, delta)?;
        let modular = f.map(|v| orlicz_psi(v / norm, p, q, delta)).integrate();
        cases.push(CaseResult {
            case: format!("{}d scale={scale} q={q}", grid.dim()),
            value: (modular - 1.0).abs(),
            bound: Bound::AtMost(1e-8),
        });
    }
    Ok(cases)
}

fn kinetic() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    let mut r = rng(9);
    let eps = 1e-10;
    for i in 0..6 {
        let grid = Grid::new(1 + i % 2, 32, 1.0)?;
        let mut rho = random_field(grid, &mut r, 0.05, 2.0)?.into_values();
        // A few vacuum cells exercise the convention.
        for c in 0..3 {
            rho[(7 * c + i) % grid.cells()] = 0.0;
        }
        let mut m: Vec<f64> = (0..grid.dim() * grid.cells()).map(|_| r.gen_range(-1.0..1.0)).collect();
        for (k, v) in m.iter_mut().enumerate() {
            if rho[k % grid.cells()] < eps {
                *v = 0.0;
            }
        }
        let state = State::new(0.0, ScalarField::new(grid, rho.clone())?, VectorField::new(grid, m.clone())?)?;
        let comps: Vec<&[f64]> = m.chunks(grid.cells()).collect();
        let direct = oracle::kinetic_direct(&rho, &comps, grid.cell_volume(), eps);
        cases.push(CaseResult {
            case: format!("{}d n=32 #{i}", grid.dim()),
            value: rel(kinetic_energy(&state, eps), direct),
            bound: Bound::AtMost(1e-12),
        });
    }
    Ok(cases)
}

fn equilibrium() -> Result<Vec<CaseResult>, SuiteError> {
    let mut cases = Vec::new();
    let mut r = rng(10);
    for (dim, n) in [(1, 64), (2, 32)] {
        let grid = Grid::new(dim, n, 1.0)?;
        let a = 1.3;
        let params = PhysParams::new(
            0.1,
            0.0,
            0.7,
            PressureLaw::isentropic(a, 2.0)?,
            &KernelSpec::Gaussian { sigma: 0.05 },
            grid,
        )?;
        let rho_bar = 0.8;
        let spec = EquilibriumSpec {
            rho_bar,
            gamma: 2.0,
            a,
            log_extension: false,
        };
        let at_rest = equilibrium_energy(&State::uniform(grid, rho_bar, &vec![0.0; dim]), &params, &spec, 1e-10)?;
        cases.push(CaseResult {
            case: format!("{dim}d: energy at (ρ̄, 0)"),
            value: at_rest.total().abs(),
            bound: Bound::AtMost(0.0),
        });
        for i in 0..3 {
            let rho = random_field(grid, &mut r, 0.2, 1.6)?;
            let state = State::new(0.0, rho.clone(), VectorField::zeros(grid))?;
            let rec = equilibrium_energy(&state, &params, &spec, 1e-10)?;
            let quad = a * rho.map(|v| (v - rho_bar) * (v - rho_bar)).integrate();
            cases.push(CaseResult {
                case: format!("{dim}d #{i}: γ=2 free part vs a∫(ρ-ρ̄)²"),
                value: rel(rec.free, quad),
                bound: Bound::AtMost(1e-9),
            });
        }
    }
    Ok(cases)
}
