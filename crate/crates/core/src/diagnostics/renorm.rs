//! Residual of the renormalized transport equation
//! `∂t b(ρ) + div(b(ρ)u) + (ρb'(ρ) - b(ρ)) div u = 0`
//! at the middle of three equally spaced snapshots.

use super::cutoff::{cutoff_l, cutoff_t, cutoff_t_slope};
use super::DiagnosticsError;
use crate::grid::{divergence, ScalarField, VectorField};
use crate::solver::{velocity, State};

/// The renormalizing function `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenormFunction {
    Identity,
    /// `b(ρ) = ρ^ε` with `0 < ε < 1`.
    Power(f64),
    /// `b = T_k`.
    CutoffT(f64),
    /// `b = L_k`.
    CutoffL(f64),
}

impl RenormFunction {
    pub fn validate(&self) -> Result<(), DiagnosticsError> {
        match *self {
            Self::Identity => Ok(()),
            Self::Power(e) if e > 0.0 && e < 1.0 => Ok(()),
            Self::Power(e) => Err(DiagnosticsError::Parameter {
                name: "renorm power",
                value: e,
                reason: "must lie in (0, 1)",
            }),
            Self::CutoffT(k) | Self::CutoffL(k) if k >= 1.0 && k.is_finite() => Ok(()),
            Self::CutoffT(k) | Self::CutoffL(k) => Err(DiagnosticsError::Parameter {
                name: "cut-off level k",
                value: k,
                reason: "must satisfy k >= 1",
            }),
        }
    }

    pub fn value(&self, rho: f64) -> f64 {
        match *self {
            Self::Identity => rho,
            Self::Power(e) => rho.max(0.0).powf(e),
            Self::CutoffT(k) => cutoff_t(rho, k),
            Self::CutoffL(k) => cutoff_l(rho, k),
        }
    }

    /// `ρ b'(ρ) - b(ρ)`, simplified by hand for each family so that the
    /// identity gives exactly zero.
    pub fn defect(&self, rho: f64) -> f64 {
        match *self {
            Self::Identity => 0.0,
            Self::Power(e) => (e - 1.0) * rho.max(0.0).powf(e),
            Self::CutoffT(k) => {
                if rho <= k {
                    0.0
                } else {
                    rho * cutoff_t_slope(rho, k) - cutoff_t(rho, k)
                }
            }
            Self::CutoffL(k) => rho.clamp(0.0, k),
        }
    }

    /// Exponents `(λ0, λ1)` with `|b'(t)| <= c t^{-λ0}` on `(0, 1]` and
    /// `|b'(t)| <= c t^{λ1}` on `[1, ∞)`.
    pub fn growth_exponents(&self) -> (f64, f64) {
        match *self {
            Self::Identity => (0.0, 0.0),
            Self::Power(e) => (1.0 - e, e - 1.0),
            // b' vanishes past 3k, so any λ1 > -1 works.
            Self::CutoffT(_) => (0.0, -0.5),
            // ln t is dominated by t^{-1/2} near zero; b' is constant past k.
            Self::CutoffL(_) => (0.5, 0.0),
        }
    }

    /// Growth window `λ0 < 1`, `-1 < λ1 < s/2 - 1` for density integrability `s`.
    pub fn admissible(&self, s: f64) -> bool {
        let (l0, l1) = self.growth_exponents();
        l0 < 1.0 && l1 > -1.0 && l1 < 0.5 * s - 1.0
    }
}

fn time_step(prev: &State, mid: &State, next: &State) -> Result<f64, DiagnosticsError> {
    if prev.rho.grid() != mid.rho.grid() || mid.rho.grid() != next.rho.grid() {
        return Err(crate::grid::GridError::Mismatch.into());
    }
    let (a, b) = (mid.t - prev.t, next.t - mid.t);
    if !(a > 0.0 && b > 0.0) {
        return Err(DiagnosticsError::TimeOrder(format!("{} {} {}", prev.t, mid.t, next.t)));
    }
    if (a - b).abs() > 1e-9 * a.max(b) {
        return Err(DiagnosticsError::NonUniformTime { first: a, second: b });
    }
    Ok(0.5 * (a + b))
}

/// Pointwise mass-equation residual `(ρ⁺ - ρ⁻)/2dt + div(ρu)` at the middle snapshot.
fn mass_residual_field(prev: &State, mid: &State, next: &State, eps_vac: f64) -> Result<ScalarField, DiagnosticsError> {
    let dt = time_step(prev, mid, next)?;
    let u = velocity(&mid.rho, &mid.m, eps_vac);
    let flux = scaled(&u, &mid.rho);
    let div = divergence(&flux);
    let dt_part = next.rho.zip_with(&prev.rho, |a, b| (a - b) / (2.0 * dt))?;
    Ok(dt_part.zip_with(&div, |a, b| a + b)?)
}

fn scaled(u: &VectorField, s: &ScalarField) -> VectorField {
    let cells = s.values().len();
    let vals = u
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * s.values()[k % cells])
        .collect();
    VectorField::new(*s.grid(), vals).expect("finite")
}

/// L² norm of the mass-equation residual.
pub fn mass_residual(prev: &State, mid: &State, next: &State, eps_vac: f64) -> Result<f64, DiagnosticsError> {
    Ok(mass_residual_field(prev, mid, next, eps_vac)?.lp_norm(2.0)?)
}

/// L² norm of the renormalized transport residual at the middle snapshot,
/// with centered time differences and centered spatial operators.
pub fn renorm_residual(
    prev: &State,
    mid: &State,
    next: &State,
    b: RenormFunction,
    eps_vac: f64,
) -> Result<f64, DiagnosticsError> {
    let dt = time_step(prev, mid, next)?;
    let u = velocity(&mid.rho, &mid.m, eps_vac);
    let b_mid = mid.rho.map(|r| b.value(r));
    let div_flux = divergence(&scaled(&u, &b_mid));
    let div_u = divergence(&u);
    let dt_part = next.rho.zip_with(&prev.rho, |a, c| (b.value(a) - b.value(c)) / (2.0 * dt))?;
    let transport = dt_part.zip_with(&div_flux, |a, c| a + c)?;
    let defect = mid.rho.zip_with(&div_u, |r, d| b.defect(r) * d)?;
    Ok(transport.zip_with(&defect, |a, c| a + c)?.lp_norm(2.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn manufactured(grid: Grid, t: f64) -> State {
        let rho = ScalarField::from_fn(grid, |x| 1.0 + 0.1 * (2.0 * PI * (x[0] - t)).sin());
        let m = VectorField::from_components(std::slice::from_ref(&rho)).unwrap();
        State::new(t, rho, m).unwrap()
    }

    fn residual(n: usize, b: RenormFunction) -> f64 {
        let grid = Grid::new(1, n, 1.0).unwrap();
        let dt = 0.2 / n as f64;
        let t = 0.3;
        renorm_residual(
            &manufactured(grid, t - dt),
            &manufactured(grid, t),
            &manufactured(grid, t + dt),
            b,
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn constant_trajectory_has_zero_residual() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let s = |t| State::new(t, ScalarField::constant(grid, 1.3), VectorField::zeros(grid)).unwrap();
        for b in [RenormFunction::Identity, RenormFunction::Power(0.3), RenormFunction::CutoffL(2.0)] {
            assert_eq!(renorm_residual(&s(0.0), &s(0.1), &s(0.2), b, 1e-12).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_equals_mass_residual() {
        let grid = Grid::new(1, 32, 1.0).unwrap();
        let (a, b, c) = (manufactured(grid, 0.0), manufactured(grid, 0.01), manufactured(grid, 0.02));
        let r = renorm_residual(&a, &b, &c, RenormFunction::Identity, 1e-12).unwrap();
        assert_eq!(r, mass_residual(&a, &b, &c, 1e-12).unwrap());
        assert!(r > 0.0);
    }

    #[test]
    fn manufactured_residual_is_second_order() {
        for b in [RenormFunction::Power(1.0 / 3.0), RenormFunction::CutoffT(1.0)] {
            let r: Vec<f64> = [64, 128, 256].iter().map(|&n| residual(n, b)).collect();
            assert!(r[0] / r[1] >= 3.0 && r[1] / r[2] >= 3.0, "{r:?}");
        }
    }

    #[test]
    fn rejects_uneven_spacing() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let res = renorm_residual(
            &manufactured(grid, 0.0),
            &manufactured(grid, 0.1),
            &manufactured(grid, 0.3),
            RenormFunction::Identity,
            1e-12,
        );
        assert!(matches!(res, Err(DiagnosticsError::NonUniformTime { .. })));
    }

    #[test]
    fn defects_match_definition() {
        let fns = [
            RenormFunction::Power(0.4),
            RenormFunction::CutoffT(1.5),
            RenormFunction::CutoffL(2.0),
        ];
        for b in fns {
            for rho in [0.3, 1.0, 2.2, 3.7, 6.0] {
                let e = 1e-6;
                let slope = (b.value(rho + e) - b.value(rho - e)) / (2.0 * e);
                let want = rho * slope - b.value(rho);
                assert!((b.defect(rho) - want).abs() < 1e-7, "{b:?} at {rho}");
            }
        }
    }

    #[test]
    fn growth_windows() {
        assert!(RenormFunction::Power(1.0 / 3.0).admissible(2.0));
        assert!(RenormFunction::CutoffT(1.0).admissible(2.0));
        assert!(!RenormFunction::CutoffL(1.0).admissible(2.0));
        assert!(RenormFunction::CutoffL(1.0).admissible(3.0));
        assert!(RenormFunction::Power(1.5).validate().is_err());
        assert!(RenormFunction::CutoffT(0.5).validate().is_err());
    }
}
