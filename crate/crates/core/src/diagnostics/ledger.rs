use std::fmt::Write as _;

use super::equilibrium::EquilibriumRecord;
use super::DiagnosticsError;

/// Which optional column groups a ledger carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LedgerColumns {
    pub equilibrium: bool,
    pub monitor: bool,
    pub renorm: bool,
}

/// One row of the energy ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRecord {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub kinetic: f64,
    pub free: f64,
    pub nonlocal: f64,
    pub dissipation_cum: f64,
    pub vacuum_cum: f64,
    pub equilibrium: Option<EquilibriumRecord>,
    /// Accumulator and accumulator / elapsed time.
    pub monitor: Option<(f64, f64)>,
    pub renorm: Option<f64>,
}

impl LedgerRecord {
    pub fn energy(&self) -> f64 {
        self.kinetic + self.free + self.nonlocal
    }
}

/// Time series of ledger records with strictly increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    dim: usize,
    columns: LedgerColumns,
    records: Vec<LedgerRecord>,
}

impl EnergyLedger {
    pub fn new(dim: usize, columns: LedgerColumns) -> Self {
        Self {
            dim,
            columns,
            records: Vec::new(),
        }
    }

    pub fn columns(&self) -> LedgerColumns {
        self.columns
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub fn push(&mut self, record: LedgerRecord) -> Result<(), DiagnosticsError> {
        if record.momentum.len() != self.dim {
            return Err(DiagnosticsError::Columns(format!(
                "{} momentum components on a {}-dimensional ledger",
                record.momentum.len(),
                self.dim
            )));
        }
        if record.equilibrium.is_some() != self.columns.equilibrium || record.monitor.is_some() != self.columns.monitor {
            return Err(DiagnosticsError::Columns("optional column presence differs".into()));
        }
        if let Some(last) = self.records.last() {
            if !(record.t > last.t) {
                return Err(DiagnosticsError::TimeOrder(format!("{} after {}", record.t, last.t)));
            }
        }
        self.records.push(record);
        Ok(())
    }

    /// `E(t_n) - E(t_0) + dissipation_cum(t_n)` for every record.
    pub fn energy_residuals(&self) -> Vec<f64> {
        let Some(first) = self.records.first() else {
            return Vec::new();
        };
        let e0 = first.energy() + first.dissipation_cum;
        self.records
            .iter()
            .map(|r| r.energy() + r.dissipation_cum - e0)
            .collect()
    }

    /// Same as [`EnergyLedger::energy_residuals`] for the equilibrium energy.
    pub fn equilibrium_residuals(&self) -> Option<Vec<f64>> {
        let first = self.records.first()?;
        let e0 = first.equilibrium?.total() + first.dissipation_cum;
        self.records
            .iter()
            .map(|r| r.equilibrium.map(|e| e.total() + r.dissipation_cum - e0))
            .collect()
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["t", "mass", "mom_x"];
        if self.dim == 2 {
            cols.push("mom_y");
        }
        cols.extend(["kinetic", "free", "nonlocal", "dissipation_cum", "vacuum_cum"]);
        if self.columns.equilibrium {
            cols.extend(["eq_kinetic", "eq_free", "eq_nonlocal"]);
        }
        if self.columns.monitor {
            cols.extend(["monitor_acc", "monitor_avg"]);
        }
        if self.columns.renorm {
            cols.push("renorm");
        }
        cols.join(",")
    }

    /// CSV with a header row; floats are written in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.records {
            let mut fields: Vec<String> = vec![format!("{:?}", r.t), format!("{:?}", r.mass)];
            fields.extend(r.momentum.iter().map(|m| format!("{m:?}")));
            for v in [r.kinetic, r.free, r.nonlocal, r.dissipation_cum, r.vacuum_cum] {
                fields.push(format!("{v:?}"));
            }
            if let Some(e) = r.equilibrium {
                for v in [e.kinetic, e.free, e.nonlocal] {
                    fields.push(format!("{v:?}"));
                }
            }
            if let Some((acc, avg)) = r.monitor {
                fields.push(format!("{acc:?}"));
                fields.push(format!("{avg:?}"));
            }
            if self.columns.renorm {
                fields.push(r.renorm.map(|v| format!("{v:?}")).unwrap_or_default());
            }
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64) -> LedgerRecord {
        LedgerRecord {
            t,
            mass: 1.0,
            momentum: vec![0.0],
            kinetic: 0.5 - 0.1 * t,
            free: 1.0,
            nonlocal: 0.0,
            dissipation_cum: 0.1 * t,
            vacuum_cum: 0.0,
            equilibrium: None,
            monitor: None,
            renorm: None,
        }
    }

    #[test]
    fn residuals_and_ordering() {
        let mut l = EnergyLedger::new(1, LedgerColumns::default());
        l.push(record(0.0)).unwrap();
        l.push(record(0.5)).unwrap();
        assert!(l.push(record(0.5)).is_err());
        for r in l.energy_residuals() {
            assert!(r.abs() < 1e-15);
        }
    }

    #[test]
    fn csv_layout() {
        let cols = LedgerColumns {
            equilibrium: false,
            monitor: false,
            renorm: true,
        };
        let mut l = EnergyLedger::new(1, cols);
        l.push(record(0.0)).unwrap();
        let mut r = record(1.0);
        r.renorm = Some(0.25);
        l.push(r).unwrap();
        let csv = l.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "t,mass,mom_x,kinetic,free,nonlocal,dissipation_cum,vacuum_cum,renorm"
        );
        assert!(lines[1].ends_with(','));
        assert!(lines[2].ends_with(",0.25"));
        let two = EnergyLedger::new(2, LedgerColumns::default());
        assert!(two.header().starts_with("t,mass,mom_x,mom_y,kinetic"));
    }

    #[test]
    fn rejects_wrong_shape() {
        let mut l = EnergyLedger::new(2, LedgerColumns::default());
        assert!(l.push(record(0.0)).is_err());
    }
}
