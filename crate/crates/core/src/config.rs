//! Run configuration files.
//!
//! A config is TOML with the flat sections `[grid]`, `[physics]`,
//! `[pressure]`, `[kernel]`, `[scenario]`, `[diagnostics]` and `[output]`.
//! Unknown keys are errors, and validation collects every problem instead
//! of stopping at the first. See `configs/` for one commented exemplar per
//! scenario.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;
use toml::{Table, Value};

use crate::diagnostics::{DiagnosticsConfig, EquilibriumSpec, MonitorSpec, RenormFunction};
use crate::grid::Grid;
use crate::kernel::{Kernel, KernelSpec};
use crate::scenario::{Generator, Geometry, Manufactured, ScenarioError};
use crate::solver::{PhysParams, RunControl, Solver, SolverError, State};
use crate::thermo::{PressureLaw, ThermoError};

/// Every validation failure found in a config.
#[derive(Debug, Error, Clone, PartialEq)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s):", self.errors.len())?;
        for e in &self.errors {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsConfig {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub t_end: f64,
    pub c_cfl: f64,
    pub dt: Option<f64>,
    pub max_steps: Option<usize>,
    /// Defaults to `1e-10` times the scenario's density scale.
    pub eps_vac: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PressureConfig {
    Isentropic { a: f64, gamma: f64 },
    VanDerWaals { r: f64, t_star: f64, a: f64, b: f64, theta: f64 },
    Table { rho: Vec<f64>, p: Vec<f64> },
}

impl PressureConfig {
    pub fn build(&self) -> Result<PressureLaw, ThermoError> {
        match self {
            Self::Isentropic { a, gamma } => PressureLaw::isentropic(*a, *gamma),
            Self::VanDerWaals { r, t_star, a, b, theta } => PressureLaw::van_der_waals(*r, *t_star, *a, *b, *theta),
            Self::Table { rho, p } => PressureLaw::table(rho.clone(), p.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    Binary,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Relative to `NSK_OUT_DIR` when set, else to the working directory.
    pub dir: String,
    pub record_every: usize,
    pub snapshot_every: usize,
    pub format: SnapshotFormat,
}

/// Everything except the initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub pressure: PressureConfig,
    pub kernel: KernelSpec,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
}

/// A named scenario: initial-data generator plus the run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub generator: Generator,
    pub config: RunConfig,
}

impl ScenarioSpec {
    pub fn grid(&self) -> Grid {
        let g = &self.config.grid;
        Grid::new(g.dim, g.n, g.length).expect("validated")
    }

    pub fn law(&self) -> PressureLaw {
        self.config.pressure.build().expect("validated")
    }

    pub fn eps_vac(&self) -> f64 {
        self.config
            .physics
            .eps_vac
            .unwrap_or(1e-10 * self.generator.rho_scale())
    }

    pub fn params(&self) -> Result<PhysParams, SolverError> {
        let p = &self.config.physics;
        PhysParams::new(p.mu, p.lambda, p.kappa, self.law(), &self.config.kernel, self.grid())
    }

    pub fn solver(&self) -> Result<Solver, SolverError> {
        Solver::new(self.params()?, self.eps_vac())
    }

    pub fn initial_state(&self) -> Result<State, ScenarioError> {
        self.generator.generate(self.grid(), &self.law(), self.eps_vac())
    }

    pub fn control(&self) -> RunControl {
        let p = &self.config.physics;
        RunControl {
            t_end: p.t_end,
            c_cfl: p.c_cfl,
            fixed_dt: p.dt,
            record_every: self.config.output.record_every,
            snapshot_every: self.config.output.snapshot_every,
            max_steps: p.max_steps,
        }
    }
}

/// Typed access to one section that remembers which keys were read.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    used: BTreeSet<&'static str>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'static str, errors: &mut Vec<String>) -> Self {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                errors.push(format!("[{name}] must be a table"));
                None
            }
        };
        Self {
            name,
            table,
            used: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.table.and_then(|t| t.get(key))
    }

    fn f64_opt(&mut self, key: &'static str, errors: &mut Vec<String>) -> Option<f64> {
        match self.raw(key)? {
            Value::Float(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            other => {
                errors.push(format!("{}.{key}: expected a number, got {}", self.name, other.type_str()));
                None
            }
        }
    }

    fn f64_or(&mut self, key: &'static str, default: f64, errors: &mut Vec<String>) -> f64 {
        self.f64_opt(key, errors).unwrap_or(default)
    }

    fn f64_req(&mut self, key: &'static str, errors: &mut Vec<String>) -> f64 {
        let present = self.table.is_some_and(|t| t.contains_key(key));
        match self.f64_opt(key, errors) {
            Some(v) => v,
            None => {
                if !present {
                    errors.push(format!("{}.{key}: required", self.name));
                }
                f64::NAN
            }
        }
    }

    fn uint_opt(&mut self, key: &'static str, errors: &mut Vec<String>) -> Option<u64> {
        match self.raw(key)? {
            Value::Integer(v) if *v >= 0 => Some(*v as u64),
            other => {
                errors.push(format!(
                    "{}.{key}: expected a nonnegative integer, got {}",
                    self.name,
                    other
                ));
                None
            }
        }
    }

    fn bool_or(&mut self, key: &'static str, default: bool, errors: &mut Vec<String>) -> bool {
        match self.raw(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(other) => {
                errors.push(format!("{}.{key}: expected a boolean, got {}", self.name, other.type_str()));
                default
            }
        }
    }

    fn str_opt(&mut self, key: &'static str, errors: &mut Vec<String>) -> Option<&'a str> {
        match self.raw(key)? {
            Value::String(s) => Some(s.as_str()),
            other => {
                errors.push(format!("{}.{key}: expected a string, got {}", self.name, other.type_str()));
                None
            }
        }
    }

    fn list_req(&mut self, key: &'static str, errors: &mut Vec<String>) -> Vec<f64> {
        match self.raw(key) {
            None => {
                errors.push(format!("{}.{key}: required", self.name));
                Vec::new()
            }
            Some(Value::Array(items)) => items
                .iter()
                .filter_map(|v| match v {
                    Value::Float(x) => Some(*x),
                    Value::Integer(x) => Some(*x as f64),
                    other => {
                        errors.push(format!("{}.{key}: list entries must be numbers, got {other}", self.name));
                        None
                    }
                })
                .collect(),
            Some(other) => {
                errors.push(format!("{}.{key}: expected a list of numbers, got {}", self.name, other.type_str()));
                Vec::new()
            }
        }
    }

    fn finish(self, errors: &mut Vec<String>) {
        if let Some(t) = self.table {
            for key in t.keys() {
                if !self.used.contains(key.as_str()) {
                    errors.push(format!("[{}]: unknown key `{key}`", self.name));
                }
            }
        }
    }
}

const SECTIONS: [&str; 7] = ["grid", "physics", "pressure", "kernel", "scenario", "diagnostics", "output"];

/// Parses and validates a config, reporting every error found.
pub fn parse_config(text: &str) -> Result<ScenarioSpec, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError {
        errors: vec![format!("TOML syntax: {}", e.message())],
    })?;
    let mut errors = Vec::new();
    for key in root.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            errors.push(format!("unknown section or top-level key `{key}`"));
        }
    }

    // [grid]
    let mut s = Section::new(&root, "grid", &mut errors);
    let dim = s.uint_opt("dim", &mut errors).unwrap_or(1) as usize;
    let n = s.uint_opt("n", &mut errors).unwrap_or_else(|| {
        if !root.get("grid").and_then(|g| g.get("n")).is_some() {
            errors.push("grid.n: required".into());
        }
        0
    }) as usize;
    let length = s.f64_or("length", 1.0, &mut errors);
    s.finish(&mut errors);
    let grid_cfg = GridConfig { dim, n, length };
    let grid = match Grid::new(dim, n, length) {
        Ok(g) => Some(g),
        Err(e) => {
            if n != 0 {
                errors.push(format!("[grid]: {e}"));
            }
            None
        }
    };

    // [physics]
    let mut s = Section::new(&root, "physics", &mut errors);
    let physics = PhysicsConfig {
        mu: s.f64_req("mu", &mut errors),
        lambda: s.f64_or("lambda", 0.0, &mut errors),
        kappa: s.f64_or("kappa", 0.0, &mut errors),
        t_end: s.f64_req("t_end", &mut errors),
        c_cfl: s.f64_or("c_cfl", 0.5, &mut errors),
        dt: s.f64_opt("dt", &mut errors),
        max_steps: s.uint_opt("max_steps", &mut errors).map(|v| v as usize),
        eps_vac: s.f64_opt("eps_vac", &mut errors),
    };
    s.finish(&mut errors);
    if !physics.mu.is_nan() || !physics.lambda.is_nan() {
        if let Err(e) = PhysParams::check_viscosity(physics.mu, physics.lambda) {
            errors.push(format!("[physics]: {e}"));
        }
    }
    if !(physics.kappa.is_finite() && physics.kappa >= 0.0) {
        errors.push(format!("[physics]: kappa = {}: capillarity must satisfy κ ≥ 0", physics.kappa));
    }
    if !(physics.t_end.is_finite() && physics.t_end >= 0.0) && !physics.t_end.is_nan() {
        errors.push(format!("[physics]: t_end = {} must be nonnegative", physics.t_end));
    }
    if !(physics.c_cfl > 0.0 && physics.c_cfl <= 1.0) {
        errors.push(format!("[physics]: c_cfl = {} must satisfy 0 < c_cfl ≤ 1", physics.c_cfl));
    }
    if let Some(dt) = physics.dt {
        if !(dt.is_finite() && dt > 0.0) {
            errors.push(format!("[physics]: dt = {dt} must be positive"));
        }
    }
    if let Some(e) = physics.eps_vac {
        if !(e.is_finite() && e > 0.0) {
            errors.push(format!("[physics]: eps_vac = {e} must be positive"));
        }
    }

    // [pressure]
    let mut s = Section::new(&root, "pressure", &mut errors);
    let pressure = match s.str_opt("law", &mut errors) {
        Some("isentropic") => Some(PressureConfig::Isentropic {
            a: s.f64_req("a", &mut errors),
            gamma: s.f64_req("gamma", &mut errors),
        }),
        Some("van_der_waals") => Some(PressureConfig::VanDerWaals {
            r: s.f64_or("r", 1.0, &mut errors),
            t_star: s.f64_req("t_star", &mut errors),
            a: s.f64_req("a", &mut errors),
            b: s.f64_req("b", &mut errors),
            theta: s.f64_req("theta", &mut errors),
        }),
        Some("table") => Some(PressureConfig::Table {
            rho: s.list_req("rho", &mut errors),
            p: s.list_req("p", &mut errors),
        }),
        Some(other) => {
            errors.push(format!(
                "pressure.law: unknown law `{other}` (expected isentropic, van_der_waals or table)"
            ));
            None
        }
        None => {
            errors.push("pressure.law: required".into());
            None
        }
    };
    if pressure.is_some() {
        s.finish(&mut errors);
    }
    let law = pressure.as_ref().and_then(|p| match p.build() {
        Ok(l) => Some(l),
        Err(e) => {
            if !matches!(e, ThermoError::Parameter { value, .. } if value.is_nan()) {
                errors.push(format!("[pressure]: {e}"));
            }
            None
        }
    });

    // [kernel]
    let mut s = Section::new(&root, "kernel", &mut errors);
    let kernel = match s.str_opt("shape", &mut errors) {
        Some("gaussian") => Some(KernelSpec::Gaussian {
            sigma: s.f64_req("sigma", &mut errors),
        }),
        Some("tent") => Some(KernelSpec::Tent {
            radius: s.f64_req("radius", &mut errors),
        }),
        Some("table") => Some(KernelSpec::Table {
            samples: s.list_req("samples", &mut errors),
        }),
        Some(other) => {
            errors.push(format!("kernel.shape: unknown shape `{other}` (expected gaussian, tent or table)"));
            None
        }
        None => {
            errors.push("kernel.shape: required".into());
            None
        }
    };
    if kernel.is_some() {
        s.finish(&mut errors);
    }
    if let (Some(k), Some(g)) = (&kernel, grid) {
        if let Err(e) = Kernel::build(k, g) {
            errors.push(format!("[kernel]: {e}"));
        }
    }

    // [scenario]
    let mut s = Section::new(&root, "scenario", &mut errors);
    let name = s.str_opt("name", &mut errors).map(str::to_owned);
    let generator = match s.str_opt("generator", &mut errors) {
        Some("equilibrium") => Some(Generator::Equilibrium {
            rho_bar: s.f64_req("rho_bar", &mut errors),
        }),
        Some("perturbation") => Some(Generator::Perturbation {
            rho_bar: s.f64_req("rho_bar", &mut errors),
            amplitude: s.f64_req("amplitude", &mut errors),
            modes: s.uint_opt("modes", &mut errors).unwrap_or(4) as usize,
            seed: s.uint_opt("seed", &mut errors).unwrap_or(0),
        }),
        Some("two_phase") => {
            let rho_liquid = s.f64_req("rho_liquid", &mut errors);
            let rho_vapor = s.f64_req("rho_vapor", &mut errors);
            let width = s.f64_req("width", &mut errors);
            let geometry = match s.str_opt("geometry", &mut errors).unwrap_or("slab") {
                "slab" => Some(Geometry::Slab {
                    fraction: s.f64_or("fraction", 0.5, &mut errors),
                }),
                "disk" => Some(Geometry::Disk {
                    radius: s.f64_req("radius", &mut errors),
                }),
                other => {
                    errors.push(format!("scenario.geometry: unknown geometry `{other}` (expected slab or disk)"));
                    None
                }
            };
            geometry.map(|geometry| Generator::TwoPhase {
                rho_liquid,
                rho_vapor,
                width,
                geometry,
            })
        }
        Some("vacuum_pocket") => Some(Generator::VacuumPocket {
            background: s.f64_req("background", &mut errors),
            radius: s.f64_req("radius", &mut errors),
            width: s.f64_req("width", &mut errors),
            velocity: s.f64_or("velocity", 0.0, &mut errors),
        }),
        Some("manufactured") => {
            let id = s.str_opt("id", &mut errors).unwrap_or("traveling_wave");
            match Manufactured::from_name(id) {
                Some(id) => Some(Generator::Manufactured {
                    id,
                    rho_bar: s.f64_req("rho_bar", &mut errors),
                    amplitude: s.f64_req("amplitude", &mut errors),
                    velocity: s.f64_or("velocity", 0.0, &mut errors),
                    width: s.f64_or("width", 0.05, &mut errors),
                }),
                None => {
                    errors.push(format!(
                        "scenario.id: unknown manufactured solution `{id}` (expected traveling_wave or gaussian_pulse)"
                    ));
                    None
                }
            }
        }
        Some(other) => {
            errors.push(format!(
                "scenario.generator: unknown generator `{other}` (expected equilibrium, perturbation, two_phase, vacuum_pocket or manufactured)"
            ));
            None
        }
        None => {
            errors.push("scenario.generator: required".into());
            None
        }
    };
    if generator.is_some() {
        s.finish(&mut errors);
    }
    if let (Some(g), Some(l)) = (&generator, &law) {
        if let Err(e) = g.validate(l) {
            errors.push(format!("[scenario]: {e}"));
        }
        if let (Generator::TwoPhase { geometry: Geometry::Disk { .. }, .. }, 1) = (g, dim) {
            errors.push(format!("[scenario]: {}", ScenarioError::DiskIn1d));
        }
    }

    // [diagnostics]
    let mut s = Section::new(&root, "diagnostics", &mut errors);
    let law_gamma = match &pressure {
        Some(PressureConfig::Isentropic { gamma, .. }) => Some(*gamma),
        _ => None,
    };
    let law_a = match &pressure {
        Some(PressureConfig::Isentropic { a, .. }) => Some(*a),
        _ => None,
    };
    let monitor_on = s.bool_or("monitor", false, &mut errors);
    let equilibrium_on = s.bool_or("equilibrium", false, &mut errors);
    let gamma_key = s.f64_opt("gamma", &mut errors);
    let need_gamma = monitor_on || equilibrium_on;
    let gamma = gamma_key.or(law_gamma);
    if need_gamma && gamma.is_none() {
        errors.push("diagnostics.gamma: required for non-isentropic laws".into());
    }
    let monitor = if monitor_on {
        let spec = MonitorSpec {
            gamma: gamma.unwrap_or(f64::NAN),
            eps: s.f64_req("epsilon", &mut errors),
            n_formal: s.uint_opt("n_formal", &mut errors).unwrap_or(3) as usize,
        };
        if gamma.is_some() && !spec.eps.is_nan() {
            if let Err(e) = spec.validate() {
                errors.push(format!("[diagnostics]: {e}"));
            }
        }
        Some(spec)
    } else {
        for key in ["epsilon", "n_formal"] {
            if root.get("diagnostics").and_then(|d| d.get(key)).is_some() {
                errors.push(format!("diagnostics.{key}: only meaningful with monitor = true"));
            }
            s.raw(key);
        }
        None
    };
    let equilibrium = if equilibrium_on {
        let rho_bar = s.f64_opt("rho_bar", &mut errors).or(generator.as_ref().and_then(Generator::rho_bar));
        if rho_bar.is_none() {
            errors.push("diagnostics.rho_bar: required for this scenario".into());
        }
        let a = s.f64_opt("a", &mut errors).or(law_a);
        if a.is_none() {
            errors.push("diagnostics.a: required for non-isentropic laws".into());
        }
        let spec = EquilibriumSpec {
            rho_bar: rho_bar.unwrap_or(f64::NAN),
            gamma: gamma.unwrap_or(f64::NAN),
            a: a.unwrap_or(f64::NAN),
            log_extension: s.bool_or("log_extension", false, &mut errors),
        };
        if rho_bar.is_some() && a.is_some() && gamma.is_some() {
            if let Err(e) = spec.validate() {
                errors.push(format!("[diagnostics]: {e}"));
            }
        }
        Some(spec)
    } else {
        for key in ["rho_bar", "a", "log_extension"] {
            if root.get("diagnostics").and_then(|d| d.get(key)).is_some() {
                errors.push(format!("diagnostics.{key}: only meaningful with equilibrium = true"));
            }
            s.raw(key);
        }
        None
    };
    let renorm = match s.str_opt("renorm", &mut errors) {
        None | Some("none") => None,
        Some("identity") => Some(RenormFunction::Identity),
        Some("power") => Some(RenormFunction::Power(s.f64_or("renorm_power", 1.0 / 3.0, &mut errors))),
        Some("t_k") => Some(RenormFunction::CutoffT(s.f64_or("cutoff_k", 1.0, &mut errors))),
        Some("l_k") => Some(RenormFunction::CutoffL(s.f64_or("cutoff_k", 1.0, &mut errors))),
        Some(other) => {
            errors.push(format!(
                "diagnostics.renorm: unknown function `{other}` (expected none, identity, power, t_k or l_k)"
            ));
            None
        }
    };
    if let Some(b) = renorm {
        if let Err(e) = b.validate() {
            errors.push(format!("[diagnostics]: {e}"));
        }
    }
    // Tolerate the unused companions of other renorm choices only when absent.
    for key in ["renorm_power", "cutoff_k"] {
        let present = root.get("diagnostics").and_then(|d| d.get(key)).is_some();
        if present && !s.used.contains(key) {
            errors.push(format!("diagnostics.{key}: does not apply to the selected renorm function"));
            s.used.insert(key);
        }
    }
    s.finish(&mut errors);

    // [output]
    let mut s = Section::new(&root, "output", &mut errors);
    let default_dir = name
        .clone()
        .or_else(|| generator.as_ref().map(|g| g.kind().to_owned()))
        .unwrap_or_else(|| "run".into());
    let output = OutputConfig {
        dir: s.str_opt("dir", &mut errors).map(str::to_owned).unwrap_or(default_dir),
        record_every: s.uint_opt("record_every", &mut errors).unwrap_or(10) as usize,
        snapshot_every: s.uint_opt("snapshot_every", &mut errors).unwrap_or(0) as usize,
        format: match s.str_opt("format", &mut errors).unwrap_or("bin") {
            "bin" => SnapshotFormat::Binary,
            "csv" => SnapshotFormat::Csv,
            other => {
                errors.push(format!("output.format: unknown format `{other}` (expected bin or csv)"));
                SnapshotFormat::Binary
            }
        },
    };
    s.finish(&mut errors);
    if output.record_every == 0 {
        errors.push("output.record_every: must be at least 1".into());
    }

    if !errors.is_empty() {
        return Err(ConfigError { errors });
    }
    let generator = generator.expect("checked");
    Ok(ScenarioSpec {
        name: name.unwrap_or_else(|| generator.kind().to_owned()),
        generator,
        config: RunConfig {
            grid: grid_cfg,
            physics,
            pressure: pressure.expect("checked"),
            kernel: kernel.expect("checked"),
            diagnostics: DiagnosticsConfig {
                monitor,
                equilibrium,
                renorm,
            },
            output,
        },
    })
}

fn list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn quoted(s: &str) -> String {
    Value::String(s.to_owned()).to_string()
}

/// Writes a config that parses back to the same [`ScenarioSpec`].
pub fn dump(spec: &ScenarioSpec) -> String {
    let c = &spec.config;
    let mut o = String::new();
    let _ = writeln!(o, "[grid]\ndim = {}\nn = {}\nlength = {:?}\n", c.grid.dim, c.grid.n, c.grid.length);

    let p = &c.physics;
    let _ = writeln!(
        o,
        "[physics]\nmu = {:?}\nlambda = {:?}\nkappa = {:?}\nt_end = {:?}\nc_cfl = {:?}",
        p.mu, p.lambda, p.kappa, p.t_end, p.c_cfl
    );
    if let Some(dt) = p.dt {
        let _ = writeln!(o, "dt = {dt:?}");
    }
    if let Some(m) = p.max_steps {
        let _ = writeln!(o, "max_steps = {m}");
    }
    if let Some(e) = p.eps_vac {
        let _ = writeln!(o, "eps_vac = {e:?}");
    }
    o.push('\n');

    o.push_str("[pressure]\n");
    match &c.pressure {
        PressureConfig::Isentropic { a, gamma } => {
            let _ = writeln!(o, "law = \"isentropic\"\na = {a:?}\ngamma = {gamma:?}");
        }
        PressureConfig::VanDerWaals { r, t_star, a, b, theta } => {
            let _ = writeln!(
                o,
                "law = \"van_der_waals\"\nr = {r:?}\nt_star = {t_star:?}\na = {a:?}\nb = {b:?}\ntheta = {theta:?}"
            );
        }
        PressureConfig::Table { rho, p } => {
            let _ = writeln!(o, "law = \"table\"\nrho = {}\np = {}", list(rho), list(p));
        }
    }
    o.push('\n');

    o.push_str("[kernel]\n");
    match &c.kernel {
        KernelSpec::Gaussian { sigma } => {
            let _ = writeln!(o, "shape = \"gaussian\"\nsigma = {sigma:?}");
        }
        KernelSpec::Tent { radius } => {
            let _ = writeln!(o, "shape = \"tent\"\nradius = {radius:?}");
        }
        KernelSpec::Table { samples } => {
            let _ = writeln!(o, "shape = \"table\"\nsamples = {}", list(samples));
        }
    }
    o.push('\n');

    let _ = writeln!(o, "[scenario]\nname = {}\ngenerator = \"{}\"", quoted(&spec.name), spec.generator.kind());
    match &spec.generator {
        Generator::Equilibrium { rho_bar } => {
            let _ = writeln!(o, "rho_bar = {rho_bar:?}");
        }
        Generator::Perturbation {
            rho_bar,
            amplitude,
            modes,
            seed,
        } => {
            let _ = writeln!(o, "rho_bar = {rho_bar:?}\namplitude = {amplitude:?}\nmodes = {modes}\nseed = {seed}");
        }
        Generator::TwoPhase {
            rho_liquid,
            rho_vapor,
            width,
            geometry,
        } => {
            let _ = writeln!(o, "rho_liquid = {rho_liquid:?}\nrho_vapor = {rho_vapor:?}\nwidth = {width:?}");
            match geometry {
                Geometry::Slab { fraction } => {
                    let _ = writeln!(o, "geometry = \"slab\"\nfraction = {fraction:?}");
                }
                Geometry::Disk { radius } => {
                    let _ = writeln!(o, "geometry = \"disk\"\nradius = {radius:?}");
                }
            }
        }
        Generator::VacuumPocket {
            background,
            radius,
            width,
            velocity,
        } => {
            let _ = writeln!(
                o,
                "background = {background:?}\nradius = {radius:?}\nwidth = {width:?}\nvelocity = {velocity:?}"
            );
        }
        Generator::Manufactured {
            id,
            rho_bar,
            amplitude,
            velocity,
            width,
        } => {
            let _ = writeln!(
                o,
                "id = \"{}\"\nrho_bar = {rho_bar:?}\namplitude = {amplitude:?}\nvelocity = {velocity:?}\nwidth = {width:?}",
                id.name()
            );
        }
    }
    o.push('\n');

    o.push_str("[diagnostics]\n");
    let d = &c.diagnostics;
    let gamma = d.monitor.map(|m| m.gamma).or(d.equilibrium.map(|e| e.gamma));
    if let Some(g) = gamma {
        let _ = writeln!(o, "gamma = {g:?}");
    }
    if let Some(m) = d.monitor {
        let _ = writeln!(o, "monitor = true\nepsilon = {:?}\nn_formal = {}", m.eps, m.n_formal);
    }
    if let Some(e) = d.equilibrium {
        let _ = writeln!(
            o,
            "equilibrium = true\nrho_bar = {:?}\na = {:?}\nlog_extension = {}",
            e.rho_bar, e.a, e.log_extension
        );
    }
    match d.renorm {
        None => {}
        Some(RenormFunction::Identity) => o.push_str("renorm = \"identity\"\n"),
        Some(RenormFunction::Power(e)) => {
            let _ = writeln!(o, "renorm = \"power\"\nrenorm_power = {e:?}");
        }
        Some(RenormFunction::CutoffT(k)) => {
            let _ = writeln!(o, "renorm = \"t_k\"\ncutoff_k = {k:?}");
        }
        Some(RenormFunction::CutoffL(k)) => {
            let _ = writeln!(o, "renorm = \"l_k\"\ncutoff_k = {k:?}");
        }
    }
    o.push('\n');

    let out = &c.output;
    let _ = writeln!(
        o,
        "[output]\ndir = {}\nrecord_every = {}\nsnapshot_every = {}\nformat = \"{}\"",
        quoted(&out.dir),
        out.record_every,
        out.snapshot_every,
        match out.format {
            SnapshotFormat::Binary => "bin",
            SnapshotFormat::Csv => "csv",
        }
    );
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
n = 128

[physics]
mu = 0.01
t_end = 0.1

[pressure]
law = "isentropic"
a = 1.0
gamma = 2.0

[kernel]
shape = "gaussian"
sigma = 0.05

[scenario]
generator = "equilibrium"
rho_bar = 1.0
"#;

    #[test]
    fn minimal_config_round_trips() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.name, "equilibrium");
        assert_eq!(spec.config.grid.dim, 1);
        assert_eq!(spec.config.physics.c_cfl, 0.5);
        assert_eq!(spec.config.output.dir, "equilibrium");
        let again = parse_config(&dump(&spec)).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn negative_viscosity_cites_constraint() {
        let text = MINIMAL.replace("mu = 0.01", "mu = -0.1");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("μ>0 and λ+2μ>0"), "{err}");
    }

    #[test]
    fn epsilon_window_is_enforced() {
        let text = format!("{MINIMAL}\n[diagnostics]\nmonitor = true\nepsilon = 0.5\nn_formal = 3\n");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0<ε≤4/N−1") && msg.contains("0.333"), "{msg}");
        let ok = text.replace("epsilon = 0.5", "epsilon = 0.25");
        assert!(parse_config(&ok).is_ok());
    }

    #[test]
    fn unknown_keys_and_multiple_errors() {
        let text = MINIMAL
            .replace("n = 128", "n = 100\ncolour = 3")
            .replace("mu = 0.01", "mu = 0.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.errors.len() >= 3, "{err}");
        assert!(err.errors.iter().any(|e| e.contains("unknown key `colour`")));
        assert!(err.errors.iter().any(|e| e.contains("power of two")));
        assert!(err.errors.iter().any(|e| e.contains("μ>0 and λ+2μ>0")));
        let extra = format!("{MINIMAL}\n[extras]\nx = 1\n");
        assert!(parse_config(&extra).is_err());
    }

    #[test]
    fn kernel_wrap_is_reported() {
        let text = MINIMAL.replace("sigma = 0.05", "sigma = 0.3");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("kernel wraps torus"));
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
[grid]
dim = 2
n = 32
length = 2.0
[physics]
mu = 0.01
lambda = -0.005
kappa = 1.5
t_end = 0.2
c_cfl = 0.4
dt = 1e-4
max_steps = 5000
eps_vac = 1e-8
[pressure]
law = "van_der_waals"
t_star = 0.1
a = 1.0
b = 1.0
theta = 0.05
[kernel]
shape = "tent"
radius = 0.2
[scenario]
name = "bubble"
generator = "two_phase"
rho_liquid = 0.8
rho_vapor = 0.03
width = 0.05
geometry = "disk"
radius = 0.4
[diagnostics]
gamma = 2.0
monitor = true
epsilon = 0.25
renorm = "power"
renorm_power = 0.5
[output]
dir = "out/bubble"
record_every = 5
snapshot_every = 50
format = "csv"
"#;
        let spec = parse_config(text).unwrap();
        assert_eq!(parse_config(&dump(&spec)).unwrap(), spec);
        assert_eq!(spec.eps_vac(), 1e-8);
        let state = spec.initial_state().unwrap();
        assert_eq!(state.grid().cells(), 1024);
    }

    #[test]
    fn two_phase_with_monotone_law_is_rejected() {
        let text = MINIMAL.replace(
            "generator = \"equilibrium\"\nrho_bar = 1.0",
            "generator = \"two_phase\"\nrho_liquid = 0.8\nrho_vapor = 0.1\nwidth = 0.02",
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("spinodal"));
    }
}
