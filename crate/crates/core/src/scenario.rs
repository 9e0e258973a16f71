//! Initial-data generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{Grid, ScalarField, VectorField};
use crate::solver::{SolverError, State};
use crate::thermo::PressureLaw;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("perturbation amplitude {amplitude} must be below the mean density {rho_bar}")]
    Amplitude { amplitude: f64, rho_bar: f64 },
    #[error("two_phase needs a pressure law with a spinodal window (P' < 0 somewhere); this law is monotone")]
    NoSpinodal,
    #[error("two_phase density {rho} (phase {phase}) lies inside the spinodal window [{lo}, {hi}] where P' <= 0")]
    InsideSpinodal {
        phase: &'static str,
        rho: f64,
        lo: f64,
        hi: f64,
    },
    #[error("vapor density {vapor} must lie below the liquid density {liquid}")]
    PhaseOrder { vapor: f64, liquid: f64 },
    #[error("disk geometry needs a two-dimensional grid")]
    DiskIn1d,
    #[error("invalid {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    State(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Liquid band `|x - L/2| < fraction·L/2` along the first axis.
    Slab { fraction: f64 },
    /// Liquid disk of the given radius at the domain center.
    Disk { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manufactured {
    /// `ρ = ρ̄ + A sin(2πx/L)`, `u = U`.
    TravelingWave,
    /// `ρ = ρ̄ + A exp(-((x - L/2)/w)²)`, `u = 0`.
    GaussianPulse,
}

impl Manufactured {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TravelingWave => "traveling_wave",
            Self::GaussianPulse => "gaussian_pulse",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "traveling_wave" => Some(Self::TravelingWave),
            "gaussian_pulse" => Some(Self::GaussianPulse),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Equilibrium {
        rho_bar: f64,
    },
    Perturbation {
        rho_bar: f64,
        amplitude: f64,
        modes: usize,
        seed: u64,
    },
    TwoPhase {
        rho_liquid: f64,
        rho_vapor: f64,
        width: f64,
        geometry: Geometry,
    },
    VacuumPocket {
        background: f64,
        radius: f64,
        width: f64,
        velocity: f64,
    },
    Manufactured {
        id: Manufactured,
        rho_bar: f64,
        amplitude: f64,
        velocity: f64,
        width: f64,
    },
}

fn positive(name: &'static str, value: f64) -> Result<(), ScenarioError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::Parameter {
            name,
            value,
            reason: "must be positive",
        })
    }
}

/// `0 → 1` cubic smoothstep on `[0, 1]`.
fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

impl Generator {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Equilibrium { .. } => "equilibrium",
            Self::Perturbation { .. } => "perturbation",
            Self::TwoPhase { .. } => "two_phase",
            Self::VacuumPocket { .. } => "vacuum_pocket",
            Self::Manufactured { .. } => "manufactured",
        }
    }

    /// Typical density, used to scale the default vacuum threshold.
    pub fn rho_scale(&self) -> f64 {
        match *self {
            Self::Equilibrium { rho_bar }
            | Self::Perturbation { rho_bar, .. }
            | Self::Manufactured { rho_bar, .. } => rho_bar,
            Self::TwoPhase { rho_liquid, .. } => rho_liquid,
            Self::VacuumPocket { background, .. } => background,
        }
    }

    /// Mean density for the equilibrium diagnostics, where one exists.
    pub fn rho_bar(&self) -> Option<f64> {
        match *self {
            Self::Equilibrium { rho_bar }
            | Self::Perturbation { rho_bar, .. }
            | Self::Manufactured { rho_bar, .. } => Some(rho_bar),
            _ => None,
        }
    }

    /// Checks that do not depend on the grid.
    pub fn validate(&self, law: &PressureLaw) -> Result<(), ScenarioError> {
        match *self {
            Self::Equilibrium { rho_bar } => positive("rho_bar", rho_bar),
            Self::Perturbation { rho_bar, amplitude, .. } => {
                positive("rho_bar", rho_bar)?;
                if !(amplitude >= 0.0 && amplitude < rho_bar) {
                    return Err(ScenarioError::Amplitude { amplitude, rho_bar });
                }
                Ok(())
            }
            Self::TwoPhase {
                rho_liquid,
                rho_vapor,
                width,
                geometry,
            } => {
                positive("rho_liquid", rho_liquid)?;
                positive("rho_vapor", rho_vapor)?;
                positive("width", width)?;
                match geometry {
                    Geometry::Slab { fraction } if !(fraction > 0.0 && fraction < 1.0) => {
                        return Err(ScenarioError::Parameter {
                            name: "fraction",
                            value: fraction,
                            reason: "must lie in (0, 1)",
                        })
                    }
                    Geometry::Disk { radius } => positive("radius", radius)?,
                    _ => {}
                }
                if rho_vapor >= rho_liquid {
                    return Err(ScenarioError::PhaseOrder {
                        vapor: rho_vapor,
                        liquid: rho_liquid,
                    });
                }
                let PressureLaw::VanDerWaals(vdw) = law else {
                    return Err(ScenarioError::NoSpinodal);
                };
                let (lo, hi) = vdw.spinodal().ok_or(ScenarioError::NoSpinodal)?;
                for (phase, rho) in [("vapor", rho_vapor), ("liquid", rho_liquid)] {
                    if law.dp(rho) <= 0.0 || (rho > lo && rho < hi) {
                        return Err(ScenarioError::InsideSpinodal { phase, rho, lo, hi });
                    }
                }
                if rho_vapor > lo {
                    // Both phases on the liquid side of the window.
                    return Err(ScenarioError::InsideSpinodal {
                        phase: "vapor",
                        rho: rho_vapor,
                        lo,
                        hi,
                    });
                }
                if rho_liquid < hi {
                    return Err(ScenarioError::InsideSpinodal {
                        phase: "liquid",
                        rho: rho_liquid,
                        lo,
                        hi,
                    });
                }
                Ok(())
            }
            Self::VacuumPocket {
                background,
                radius,
                width,
                velocity,
            } => {
                positive("background", background)?;
                positive("radius", radius)?;
                positive("width", width)?;
                if !velocity.is_finite() {
                    return Err(ScenarioError::Parameter {
                        name: "velocity",
                        value: velocity,
                        reason: "must be finite",
                    });
                }
                Ok(())
            }
            Self::Manufactured {
                rho_bar,
                amplitude,
                velocity,
                width,
                ..
            } => {
                positive("rho_bar", rho_bar)?;
                positive("width", width)?;
                if !(amplitude.abs() < rho_bar) {
                    return Err(ScenarioError::Amplitude { amplitude, rho_bar });
                }
                if !velocity.is_finite() {
                    return Err(ScenarioError::Parameter {
                        name: "velocity",
                        value: velocity,
                        reason: "must be finite",
                    });
                }
                Ok(())
            }
        }
    }

    /// Builds `(ρ₀, m₀)` at `t = 0`. Deterministic; `m₀ = 0` wherever `ρ₀ < eps_vac`.
    pub fn generate(&self, grid: Grid, law: &PressureLaw, eps_vac: f64) -> Result<State, ScenarioError> {
        self.validate(law)?;
        let l = grid.length();
        let dim = grid.dim();
        let center = 0.5 * l;
        let radial = |x: [f64; 2]| -> f64 {
            (0..dim).map(|a| (x[a] - center).powi(2)).sum::<f64>().sqrt()
        };
        let (rho, u): (ScalarField, Vec<f64>) = match *self {
            Self::Equilibrium { rho_bar } => (ScalarField::constant(grid, rho_bar), vec![0.0; dim]),
            Self::Perturbation {
                rho_bar,
                amplitude,
                modes,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let max = modes.max(1) as i64;
                let mut terms = Vec::new();
                let ky_range = if dim == 2 { 0..=max } else { 0..=0 };
                for kx in 0..=max {
                    for ky in ky_range.clone() {
                        if kx == 0 && ky == 0 {
                            continue;
                        }
                        let c: f64 = rng.gen_range(-1.0..1.0);
                        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
                        terms.push((kx as f64, ky as f64, c, phase));
                    }
                }
                let norm: f64 = terms.iter().map(|t| t.2.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
                let rho = ScalarField::from_fn(grid, |x| {
                    let s: f64 = terms
                        .iter()
                        .map(|&(kx, ky, c, ph)| c * (2.0 * PI * (kx * x[0] + ky * x[1]) / l + ph).sin())
                        .sum();
                    rho_bar + amplitude * s / norm
                });
                (rho, vec![0.0; dim])
            }
            Self::TwoPhase {
                rho_liquid,
                rho_vapor,
                width,
                geometry,
            } => {
                let jump = rho_liquid - rho_vapor;
                let rho = match geometry {
                    Geometry::Slab { fraction } => {
                        let half = 0.5 * fraction * l;
                        ScalarField::from_fn(grid, |x| {
                            let d = x[0] - center;
                            rho_vapor + 0.5 * jump * (((d + half) / width).tanh() - ((d - half) / width).tanh())
                        })
                    }
                    Geometry::Disk { radius } => {
                        if dim != 2 {
                            return Err(ScenarioError::DiskIn1d);
                        }
                        ScalarField::from_fn(grid, |x| {
                            rho_vapor + 0.5 * jump * (1.0 - ((radial(x) - radius) / width).tanh())
                        })
                    }
                };
                (rho, vec![0.0; dim])
            }
            Self::VacuumPocket {
                background,
                radius,
                width,
                velocity,
            } => {
                let rho = ScalarField::from_fn(grid, |x| background * smoothstep((radial(x) - radius) / width));
                let mut u = vec![0.0; dim];
                u[0] = velocity;
                (rho, u)
            }
            Self::Manufactured {
                id,
                rho_bar,
                amplitude,
                velocity,
                width,
            } => {
                let rho = match id {
                    Manufactured::TravelingWave => {
                        ScalarField::from_fn(grid, |x| rho_bar + amplitude * (2.0 * PI * x[0] / l).sin())
                    }
                    Manufactured::GaussianPulse => ScalarField::from_fn(grid, |x| {
                        rho_bar + amplitude * (-((x[0] - center) / width).powi(2)).exp()
                    }),
                };
                let mut u = vec![0.0; dim];
                if id == Manufactured::TravelingWave {
                    u[0] = velocity;
                }
                (rho, u)
            }
        };
        let cells = grid.cells();
        let m: Vec<f64> = (0..cells * dim)
            .map(|k| {
                let r = rho.values()[k % cells];
                if r < eps_vac {
                    0.0
                } else {
                    r * u[k / cells]
                }
            })
            .collect();
        let m = VectorField::new(grid, m).map_err(SolverError::from)?;
        Ok(State::new(0.0, rho, m)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vdw() -> PressureLaw {
        PressureLaw::van_der_waals(1.0, 0.1, 1.0, 1.0, 0.05).unwrap()
    }

    #[test]
    fn equilibrium_is_constant() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let law = PressureLaw::isentropic(1.0, 2.0).unwrap();
        let s = Generator::Equilibrium { rho_bar: 1.0 }.generate(grid, &law, 1e-10).unwrap();
        assert!(s.rho.values().iter().all(|&r| r == 1.0));
        assert!(s.m.values().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn perturbation_is_deterministic_and_bounded() {
        let grid = Grid::new(2, 16, 1.0).unwrap();
        let law = PressureLaw::isentropic(1.0, 2.0).unwrap();
        let g = Generator::Perturbation {
            rho_bar: 1.0,
            amplitude: 0.3,
            modes: 3,
            seed: 7,
        };
        let a = g.generate(grid, &law, 1e-10).unwrap();
        let b = g.generate(grid, &law, 1e-10).unwrap();
        assert_eq!(a, b);
        assert!(a.rho.min() >= 0.7 - 1e-12 && a.rho.max() <= 1.3 + 1e-12);
        let bad = Generator::Perturbation {
            rho_bar: 1.0,
            amplitude: 1.0,
            modes: 3,
            seed: 7,
        };
        assert!(matches!(bad.generate(grid, &law, 1e-10), Err(ScenarioError::Amplitude { .. })));
    }

    #[test]
    fn two_phase_places_phases_outside_spinodal() {
        let grid = Grid::new(1, 128, 1.0).unwrap();
        let law = vdw();
        let g = Generator::TwoPhase {
            rho_liquid: 0.8,
            rho_vapor: 0.03,
            width: 0.02,
            geometry: Geometry::Slab { fraction: 0.5 },
        };
        let s = g.generate(grid, &law, 1e-10).unwrap();
        assert!(law.dpressure(0.8).unwrap() > 0.0 && law.dpressure(0.03).unwrap() > 0.0);
        assert!((s.rho.max() - 0.8).abs() < 1e-6 && (s.rho.min() - 0.03).abs() < 1e-6);

        let inside = Generator::TwoPhase {
            rho_liquid: 0.5,
            rho_vapor: 0.03,
            width: 0.02,
            geometry: Geometry::Slab { fraction: 0.5 },
        };
        assert!(matches!(inside.validate(&law), Err(ScenarioError::InsideSpinodal { .. })));
        let mono = PressureLaw::isentropic(1.0, 2.0).unwrap();
        assert!(matches!(g.validate(&mono), Err(ScenarioError::NoSpinodal)));
    }

    #[test]
    fn vacuum_pocket_has_no_momentum_in_vacuum() {
        let grid = Grid::new(2, 32, 1.0).unwrap();
        let law = PressureLaw::isentropic(1.0, 1.4).unwrap();
        let g = Generator::VacuumPocket {
            background: 1.0,
            radius: 0.15,
            width: 0.1,
            velocity: 0.2,
        };
        let eps = 1e-6;
        let s = g.generate(grid, &law, eps).unwrap();
        assert!(s.rho.min() == 0.0);
        for i in 0..grid.cells() {
            if s.rho.values()[i] < eps {
                assert_eq!(s.m.values()[i], 0.0);
                assert_eq!(s.m.values()[grid.cells() + i], 0.0);
            }
        }
        assert!(s.m.max_abs() > 0.0);
    }
}
