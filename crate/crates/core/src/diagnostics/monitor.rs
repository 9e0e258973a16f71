use super::DiagnosticsError;
use crate::grid::ScalarField;

/// Exponents for `∫∫ (ρ^{γ+ε} + ρ^{2+ε}) dx dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSpec {
    pub gamma: f64,
    pub eps: f64,
    /// Dimension the exponent window is checked against; may differ from the grid's.
    pub n_formal: usize,
}

impl MonitorSpec {
    /// Largest admissible `ε`: `4/N - 1` for `N ∈ {2, 3}`, `2γ/N - 1` beyond.
    pub fn eps_upper(&self) -> Result<f64, DiagnosticsError> {
        match self.n_formal {
            2 | 3 => Ok(4.0 / self.n_formal as f64 - 1.0),
            n if n >= 4 => Ok(2.0 * self.gamma / n as f64 - 1.0),
            n => Err(DiagnosticsError::FormalDimension(n)),
        }
    }

    pub fn validate(&self) -> Result<(), DiagnosticsError> {
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(DiagnosticsError::Parameter {
                name: "gamma",
                value: self.gamma,
                reason: "must satisfy gamma >= 1",
            });
        }
        let upper = self.eps_upper()?;
        // Slack so that decimal literals like 1/3 at the boundary are accepted.
        if !(self.eps > 0.0 && self.eps <= upper + 1e-12) {
            return Err(DiagnosticsError::EpsilonWindow {
                eps: self.eps,
                n_formal: self.n_formal,
                upper,
            });
        }
        Ok(())
    }

    pub fn integrand(&self, rho: &ScalarField) -> f64 {
        let (a, b) = (self.gamma + self.eps, 2.0 + self.eps);
        rho.map(|r| {
            let r = r.max(0.0);
            r.powf(a) + r.powf(b)
        })
        .integrate()
    }
}

/// Trapezoidal time accumulator of the monitor integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityMonitor {
    spec: MonitorSpec,
    t0: f64,
    t: f64,
    last: f64,
    accumulated: f64,
}

impl IntegrabilityMonitor {
    pub fn new(spec: MonitorSpec, t0: f64, rho: &ScalarField) -> Result<Self, DiagnosticsError> {
        spec.validate()?;
        Ok(Self {
            spec,
            t0,
            t: t0,
            last: spec.integrand(rho),
            accumulated: 0.0,
        })
    }

    pub fn spec(&self) -> &MonitorSpec {
        &self.spec
    }

    /// Adds the interval from the previous time to `t`.
    pub fn advance(&mut self, t: f64, rho: &ScalarField) {
        let q = self.spec.integrand(rho);
        self.accumulated += 0.5 * (t - self.t) * (self.last + q);
        self.t = t;
        self.last = q;
    }

    pub fn accumulated(&self) -> f64 {
        self.accumulated
    }

    /// Accumulator divided by elapsed time (the current integrand before any time has passed).
    pub fn average(&self) -> f64 {
        let elapsed = self.t - self.t0;
        if elapsed > 0.0 {
            self.accumulated / elapsed
        } else {
            self.last
        }
    }
}
