use super::law::PressureLaw;
use super::ThermoError;

/// How `Π` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeEnergyBranch {
    /// `aρ^γ/(γ-1)`, isentropic `γ > 1` only.
    PowerLaw,
    /// `ρ ∫_1^ρ P(s)/s² ds`, used when `∫_0 P(z)/z² dz` diverges.
    LogReference,
    /// `ρ ∫_0^ρ P(z)/z² dz` by adaptive quadrature.
    Quadrature,
}

/// Free energy `Π` attached to a pressure law, with `P = sΠ' - Π`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergy {
    law: PressureLaw,
    branch: FreeEnergyBranch,
}

impl FreeEnergy {
    /// Picks the closed form when one exists, the reference-point form when
    /// `P(s)/s` has a positive limit at 0, and quadrature from 0 otherwise.
    pub fn new(law: PressureLaw) -> Self {
        let branch = match &law {
            PressureLaw::Isentropic(l) if l.gamma() > 1.0 => FreeEnergyBranch::PowerLaw,
            _ if law.slope_at_zero() > 0.0 => FreeEnergyBranch::LogReference,
            _ => FreeEnergyBranch::Quadrature,
        };
        Self { law, branch }
    }

    pub fn with_branch(law: PressureLaw, branch: FreeEnergyBranch) -> Self {
        Self { law, branch }
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }

    pub fn branch(&self) -> FreeEnergyBranch {
        self.branch
    }

    pub fn eval(&self, rho: f64) -> Result<f64, ThermoError> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(ThermoError::NegativeDensity(rho));
        }
        if rho == 0.0 {
            return Ok(0.0);
        }
        match self.branch {
            FreeEnergyBranch::PowerLaw => match &self.law {
                PressureLaw::Isentropic(l) if l.gamma() > 1.0 => {
                    Ok(l.a() * rho.powf(l.gamma()) / (l.gamma() - 1.0))
                }
                _ => Err(ThermoError::BranchUnavailable(self.branch)),
            },
            FreeEnergyBranch::LogReference => Ok(rho * self.reference_integral(rho)?),
            FreeEnergyBranch::Quadrature => {
                let integrand = |z: f64| self.law.p(z) / (z * z);
                Ok(rho * integrate_split(&integrand, 0.0, rho, &self.law.breakpoints())?)
            }
        }
    }

    /// `∫_1^ρ P(s)/s² ds`.
    fn reference_integral(&self, rho: f64) -> Result<f64, ThermoError> {
        match &self.law {
            PressureLaw::Isentropic(l) => {
                let g = l.gamma();
                Ok(if g == 1.0 {
                    l.a() * rho.ln()
                } else {
                    l.a() * (rho.powf(g - 1.0) - 1.0) / (g - 1.0)
                })
            }
            PressureLaw::VanDerWaals(l) => Ok(l.antiderivative(rho) - l.antiderivative(1.0)),
            PressureLaw::MonotoneTable(_) => {
                // Peel off the logarithmic part so the remainder is integrable at 0.
                let c0 = self.law.slope_at_zero();
                let integrand = |s: f64| (self.law.p(s) - c0 * s) / (s * s);
                let (lo, hi, sign) = if rho < 1.0 { (rho, 1.0, -1.0) } else { (1.0, rho, 1.0) };
                let rest = integrate_split(&integrand, lo, hi, &self.law.breakpoints())?;
                Ok(c0 * rho.ln() + sign * rest)
            }
        }
    }
}

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];
const MAX_DEPTH: u32 = 50;
const MAX_EVALS: usize = 2_000_000;

fn gauss5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

struct Adaptive<'a> {
    f: &'a dyn Fn(f64) -> f64,
    evals: usize,
    /// Absolute acceptance level below which tolerances are not split further.
    floor: f64,
}

impl Adaptive<'_> {
    fn run(&mut self, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Option<f64> {
        let mid = 0.5 * (a + b);
        let left = gauss5(self.f, a, mid);
        let right = gauss5(self.f, mid, b);
        self.evals += 10;
        let sum = left + right;
        if !sum.is_finite() || self.evals > MAX_EVALS {
            return None;
        }
        if (sum - whole).abs() <= tol.max(self.floor) {
            return Some(sum);
        }
        if depth == 0 {
            return None;
        }
        Some(self.run(a, mid, left, 0.5 * tol, depth - 1)? + self.run(mid, b, right, 0.5 * tol, depth - 1)?)
    }
}

/// Adaptive Gauss–Legendre quadrature on `[a, b]`, split at `breaks`.
/// Fails instead of returning an unconverged value.
pub(crate) fn integrate_split(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
) -> Result<f64, ThermoError> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    let mut total = 0.0;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let whole = gauss5(f, lo, hi);
        let scale = whole.abs().max(hi - lo).max(1e-300);
        let mut q = Adaptive {
            f,
            evals: 0,
            floor: 1e-16 * scale,
        };
        let tol = 1e-13 * scale;
        total += q
            .run(lo, hi, whole, tol, MAX_DEPTH)
            .ok_or(ThermoError::Quadrature { lo, hi })?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_identity(fe: &FreeEnergy, s: f64) -> f64 {
        let h = 1e-4 * s;
        let d = (fe.eval(s + h).unwrap() - fe.eval(s - h).unwrap()) / (2.0 * h);
        let p = fe.law().p(s);
        (p - (s * d - fe.eval(s).unwrap())).abs() / (1.0 + p.abs())
    }

    #[test]
    fn closed_forms() {
        let fe = FreeEnergy::new(PressureLaw::isentropic(1.0, 2.0).unwrap());
        assert_eq!(fe.branch(), FreeEnergyBranch::PowerLaw);
        assert_eq!(fe.eval(2.0).unwrap(), 4.0);
        let fe = FreeEnergy::new(PressureLaw::isentropic(1.0, 1.0).unwrap());
        assert_eq!(fe.branch(), FreeEnergyBranch::LogReference);
        let e = std::f64::consts::E;
        assert!((fe.eval(e).unwrap() - e).abs() < 1e-15);
        assert_eq!(fe.eval(0.0).unwrap(), 0.0);
        assert!(fe.eval(-1.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let law = PressureLaw::isentropic(0.8, 2.5).unwrap();
        let closed = FreeEnergy::new(law.clone());
        let quad = FreeEnergy::with_branch(law, FreeEnergyBranch::Quadrature);
        for s in [0.1, 0.5, 1.0, 3.0] {
            let (a, b) = (closed.eval(s).unwrap(), quad.eval(s).unwrap());
            assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn divergent_quadrature_is_reported() {
        let law = PressureLaw::isentropic(1.0, 1.0).unwrap();
        let fe = FreeEnergy::with_branch(law, FreeEnergyBranch::Quadrature);
        assert!(matches!(fe.eval(1.0), Err(ThermoError::Quadrature { .. })));
        let vdw = PressureLaw::van_der_waals(1.0, 0.1, 1.0, 1.0, 0.05).unwrap();
        let fe = FreeEnergy::with_branch(vdw.clone(), FreeEnergyBranch::PowerLaw);
        assert!(matches!(fe.eval(1.0), Err(ThermoError::BranchUnavailable(_))));
        assert_eq!(FreeEnergy::new(vdw).branch(), FreeEnergyBranch::LogReference);
    }

    #[test]
    fn thermodynamic_identity_all_laws() {
        let laws = [
            PressureLaw::isentropic(1.0, 1.0).unwrap(),
            PressureLaw::isentropic(1.0, 1.4).unwrap(),
            PressureLaw::isentropic(1.0, 3.0).unwrap(),
            PressureLaw::van_der_waals(1.0, 0.1, 1.0, 1.0, 0.05).unwrap(),
            PressureLaw::table(vec![0.0, 0.5, 1.0, 2.0, 4.0], vec![0.0, 0.2, 0.5, 2.0, 9.0]).unwrap(),
            PressureLaw::table(vec![0.0, 1.0, 2.0, 4.0], vec![0.0, 0.0, 1.0, 2.0]).unwrap(),
        ];
        for law in laws {
            let fe = FreeEnergy::new(law);
            for i in 1..=50 {
                let s = 0.1 * i as f64;
                let r = fd_identity(&fe, s);
                assert!(r <= 1e-6, "{:?} at s={s}: {r}", fe.branch());
            }
        }
    }

    #[test]
    fn isentropic_free_energy_is_convex() {
        for g in [1.0, 1.4, 2.0] {
            let fe = FreeEnergy::new(PressureLaw::isentropic(1.0, g).unwrap());
            let v: Vec<f64> = (1..200).map(|i| fe.eval(0.025 * i as f64).unwrap()).collect();
            for w in v.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-13);
            }
        }
    }

    #[test]
    fn table_log_branch_is_chosen_when_slope_positive() {
        let law = PressureLaw::table(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]).unwrap();
        let fe = FreeEnergy::new(law);
        assert_eq!(fe.branch(), FreeEnergyBranch::LogReference);
        // P(s) = s on the table, so Π = ρ ln ρ.
        for s in [0.3, 1.0, 1.7, 5.0] {
            assert!((fe.eval(s).unwrap() - s * s.ln()).abs() < 1e-12);
        }
    }
}
