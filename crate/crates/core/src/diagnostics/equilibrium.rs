use super::energy::kinetic_energy;
use super::DiagnosticsError;
use crate::grid::ScalarField;
use crate::solver::{PhysParams, State};
use crate::thermo::{j_gamma, orlicz_norm};

/// Parameters of the energy relative to the constant state `(ρ̄, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSpec {
    pub rho_bar: f64,
    pub gamma: f64,
    pub a: f64,
    /// Allow `γ = 1` through `a(ρ ln(ρ/ρ̄) - (ρ - ρ̄))`.
    pub log_extension: bool,
}

impl EquilibriumSpec {
    pub fn validate(&self) -> Result<(), DiagnosticsError> {
        let positive = |name, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(DiagnosticsError::Parameter {
                    name,
                    value,
                    reason: "must be positive",
                })
            }
        };
        positive("rho_bar", self.rho_bar)?;
        positive("a", self.a)?;
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(DiagnosticsError::Parameter {
                name: "gamma",
                value: self.gamma,
                reason: "must satisfy gamma >= 1",
            });
        }
        if self.gamma == 1.0 && !self.log_extension {
            return Err(DiagnosticsError::IsothermalEquilibrium);
        }
        Ok(())
    }

    /// Free-energy density relative to `ρ̄`.
    pub fn free_density(&self, rho: f64) -> f64 {
        let rb = self.rho_bar;
        if self.gamma == 1.0 {
            let log_part = if rho > 0.0 { rho * (rho / rb).ln() } else { 0.0 };
            self.a * (log_part - (rho - rb))
        } else {
            self.a / (self.gamma - 1.0) * j_gamma(rho, rb, self.gamma)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumRecord {
    pub kinetic: f64,
    pub free: f64,
    pub nonlocal: f64,
}

impl EquilibriumRecord {
    pub fn total(&self) -> f64 {
        self.kinetic + self.free + self.nonlocal
    }
}

/// Kinetic energy, `∫ a/(γ-1) j_γ(ρ)` and `∫ E_global[ρ - ρ̄]`.
pub fn equilibrium_energy(
    state: &State,
    params: &PhysParams,
    spec: &EquilibriumSpec,
    eps_vac: f64,
) -> Result<EquilibriumRecord, DiagnosticsError> {
    spec.validate()?;
    let free = state.rho.map(|r| spec.free_density(r)).integrate();
    let pert = state.rho.map(|r| r - spec.rho_bar);
    Ok(EquilibriumRecord {
        kinetic: kinetic_energy(state, eps_vac),
        free,
        nonlocal: params.kernel().interaction_energy(&pert, params.kappa())?,
    })
}

/// Orlicz norm of `ρ - ρ̄` with `p = 2`, `q = max(γ, 2)`, `δ = 1`.
pub fn orlicz_perturbation_norm(rho: &ScalarField, rho_bar: f64, gamma: f64) -> Result<f64, DiagnosticsError> {
    let pert = rho.map(|r| r - rho_bar);
    Ok(orlicz_norm(&pert, 2.0, gamma.max(2.0), 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, VectorField};
    use crate::kernel::KernelSpec;
    use crate::thermo::PressureLaw;

    fn setup() -> (Grid, PhysParams) {
        let grid = Grid::new(1, 64, 1.0).unwrap();
        let p = PhysParams::new(
            0.1,
            0.0,
            0.5,
            PressureLaw::isentropic(1.3, 2.0).unwrap(),
            &KernelSpec::Tent { radius: 0.1 },
            grid,
        )
        .unwrap();
        (grid, p)
    }

    fn spec(gamma: f64) -> EquilibriumSpec {
        EquilibriumSpec {
            rho_bar: 1.2,
            gamma,
            a: 1.3,
            log_extension: false,
        }
    }

    #[test]
    fn equilibrium_state_has_zero_energy() {
        let (grid, p) = setup();
        let s = State::uniform(grid, 1.2, &[0.0]);
        let e = equilibrium_energy(&s, &p, &spec(2.0), 1e-10).unwrap();
        assert_eq!(e.total(), 0.0);
    }

    #[test]
    fn quadratic_free_part() {
        let (grid, p) = setup();
        let rho = ScalarField::from_fn(grid, |x| 1.2 + 0.4 * (2.0 * std::f64::consts::PI * x[0]).cos());
        let s = State::new(0.0, rho.clone(), VectorField::zeros(grid)).unwrap();
        let e = equilibrium_energy(&s, &p, &spec(2.0), 1e-10).unwrap();
        let want = 1.3 * rho.map(|r| (r - 1.2) * (r - 1.2)).integrate();
        assert!((e.free - want).abs() <= 1e-9 * want);
        assert!(e.nonlocal > 0.0);
    }

    #[test]
    fn isothermal_needs_flag() {
        let (grid, p) = setup();
        let s = State::uniform(grid, 1.0, &[0.0]);
        assert!(matches!(
            equilibrium_energy(&s, &p, &spec(1.0), 1e-10),
            Err(DiagnosticsError::IsothermalEquilibrium)
        ));
        let mut sp = spec(1.0);
        sp.log_extension = true;
        let e = equilibrium_energy(&s, &p, &sp, 1e-10).unwrap();
        assert!(e.free > 0.0);
        // Limit γ → 1 of the power form.
        let near = spec(1.0 + 1e-7).free_density(1.7);
        assert!((near - sp.free_density(1.7)).abs() < 1e-6);
    }

    #[test]
    fn orlicz_and_j_gamma_move_together() {
        let (grid, _) = setup();
        let bump = ScalarField::from_fn(grid, |x| (-((x[0] - 0.5) / 0.1).powi(2)).exp());
        let mut last = (0.0, 0.0);
        for s in [0.1, 0.3, 0.6, 1.0] {
            let rho = bump.map(|b| 1.0 + s * b);
            let norm = orlicz_perturbation_norm(&rho, 1.0, 3.0).unwrap();
            let j = rho.map(|r| j_gamma(r, 1.0, 3.0)).integrate();
            assert!(norm > last.0 && j > last.1);
            last = (norm, j);
        }
        let rho = bump.map(|b| 1.0 + 0.5 * b);
        let norm = orlicz_perturbation_norm(&rho, 1.0, 2.0).unwrap();
        let j = rho.map(|r| j_gamma(r, 1.0, 2.0)).integrate();
        assert!((norm * norm - j).abs() <= 1e-9 * j);
    }
}
