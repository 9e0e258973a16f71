//! Run artifacts on disk.
//!
//! A run directory holds `config.toml` (the parsed config written back out),
//! `ledger.csv`, `snap_<step>.<ext>` at the snapshot cadence (components
//! `ρ, m_x[, m_y]`), the final `effective_flux.<ext>`, and `split.csv` for
//! Van der Waals pressures. The output root is `NSK_OUT_DIR` when set.

use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{dump, ScenarioSpec, SnapshotFormat};
use crate::diagnostics::{effective_flux, DiagnosticsError};
use crate::grid::{ScalarField, VectorField};
use crate::io::{write_binary, write_csv, FieldData, SnapshotError};
use crate::solver::{Solver, SolverError, State};
use crate::thermo::{PressureLaw, SplitPressure, ThermoError};

/// Environment variable that overrides the output root.
pub const OUT_DIR_ENV: &str = "NSK_OUT_DIR";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("invalid state snapshot: {0}")]
    State(#[from] SolverError),
    #[error("ledger CSV: {0}")]
    Ledger(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Resolves a configured directory against `NSK_OUT_DIR`.
pub fn resolve_dir(dir: &str) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(dir),
        _ => PathBuf::from(dir),
    }
}

/// Writes artifacts for one scenario into a fixed directory.
pub struct RunWriter {
    dir: PathBuf,
    format: SnapshotFormat,
}

impl RunWriter {
    pub fn create(dir: PathBuf, format: SnapshotFormat) -> Result<Self, OutputError> {
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self { dir, format })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn ext(&self) -> &'static str {
        match self.format {
            SnapshotFormat::Binary => "bin",
            SnapshotFormat::Csv => "csv",
        }
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, OutputError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn write_field(&self, stem: &str, data: &FieldData) -> Result<PathBuf, OutputError> {
        let path = self.dir.join(format!("{stem}.{}", self.ext()));
        let file = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        match self.format {
            SnapshotFormat::Binary => write_binary(file, data)?,
            SnapshotFormat::Csv => write_csv(file, data)?,
        }
        Ok(path)
    }

    pub fn write_state(&self, stem: &str, state: &State) -> Result<PathBuf, OutputError> {
        self.write_field(stem, &state_data(state))
    }

    pub fn write_config(&self, spec: &ScenarioSpec) -> Result<PathBuf, OutputError> {
        self.write_text("config.toml", &dump(spec))
    }

    /// `split.csv` for Van der Waals laws; no-op otherwise.
    pub fn write_split(&self, law: &PressureLaw, rho_max: f64) -> Result<Option<PathBuf>, OutputError> {
        match law {
            PressureLaw::VanDerWaals(l) => {
                let split = SplitPressure::new(l)?;
                Ok(Some(self.write_text("split.csv", &split.to_csv(rho_max, 2001))?))
            }
            _ => Ok(None),
        }
    }

    pub fn write_effective_flux(&self, solver: &Solver, state: &State) -> Result<PathBuf, OutputError> {
        let flux = effective_flux(state, solver.params(), solver.eps_vac())?;
        self.write_field("effective_flux", &FieldData::from(&flux))
    }
}

/// Packs a state as one field with components `ρ, m_x[, m_y]`.
pub fn state_data(state: &State) -> FieldData {
    let mut values = state.rho.values().to_vec();
    values.extend_from_slice(state.m.values());
    FieldData {
        grid: *state.grid(),
        ncomp: 1 + state.grid().dim(),
        values,
    }
}

/// Inverse of [`state_data`].
pub fn state_from_data(data: &FieldData, t: f64) -> Result<State, OutputError> {
    let grid = data.grid;
    if data.ncomp != 1 + grid.dim() {
        return Err(SnapshotError::Format(format!(
            "state snapshot needs {} components, found {}",
            1 + grid.dim(),
            data.ncomp
        ))
        .into());
    }
    let cells = grid.cells();
    let rho = ScalarField::new(grid, data.values[..cells].to_vec()).map_err(SnapshotError::from)?;
    let m = VectorField::new(grid, data.values[cells..].to_vec()).map_err(SnapshotError::from)?;
    Ok(State::new(t, rho, m)?)
}

/// Turns `ledger.csv` text into a whitespace-separated table with a `#`
/// header, as read by gnuplot. Empty cells become `NaN`.
pub fn ledger_to_gnuplot(csv: &str) -> Result<String, OutputError> {
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| OutputError::Ledger("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") {
        return Err(OutputError::Ledger(format!("expected first column `t`, found `{}`", cols[0])));
    }
    let mut out = String::from("#");
    for (i, c) in cols.iter().enumerate() {
        out.push_str(&format!(" {}:{c}", i + 1));
    }
    out.push('\n');
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(OutputError::Ledger(format!(
                "row {}: {} fields, header has {}",
                row + 2,
                cells.len(),
                cols.len()
            )));
        }
        let mut fields = Vec::with_capacity(cells.len());
        for c in cells {
            if c.is_empty() {
                fields.push("NaN".to_owned());
            } else {
                let v: f64 = c
                    .parse()
                    .map_err(|_| OutputError::Ledger(format!("row {}: `{c}` is not a number", row + 2)))?;
                fields.push(format!("{v:e}"));
            }
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    Ok(out)
}
