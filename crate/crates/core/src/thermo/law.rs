use super::ThermoError;

fn positive(name: &'static str, value: f64) -> Result<f64, ThermoError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ThermoError::Parameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

/// `P(ρ) = a ρ^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isentropic {
    a: f64,
    gamma: f64,
}

impl Isentropic {
    pub fn new(a: f64, gamma: f64) -> Result<Self, ThermoError> {
        positive("a", a)?;
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(ThermoError::Parameter {
                name: "gamma",
                value: gamma,
                reason: "must satisfy gamma >= 1",
            });
        }
        Ok(Self { a, gamma })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn p(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    fn dp(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            self.a
        } else {
            self.a * self.gamma * rho.powf(self.gamma - 1.0)
        }
    }
}

/// Van der Waals law `RT*ρ/(b-ρ) - aρ²` on `ρ <= b - θ`, continued beyond
/// `b - θ` by a C¹ quadratic whose slope reaches 1 over a width `θ`, then by
/// a line of slope 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerWaals {
    r: f64,
    t_star: f64,
    a: f64,
    b: f64,
    theta: f64,
    rt: f64,
    join: f64,
    p_join: f64,
    dp_join: f64,
    curvature: f64,
    p_ramp_end: f64,
    slope_bound: f64,
    // Antiderivative constants of P(s)/s² on the two extension pieces.
    quad_coef: [f64; 3],
    quad_shift: f64,
    lin_offset: f64,
    lin_shift: f64,
}

impl VanDerWaals {
    pub fn new(r: f64, t_star: f64, a: f64, b: f64, theta: f64) -> Result<Self, ThermoError> {
        positive("R", r)?;
        positive("T*", t_star)?;
        positive("a", a)?;
        positive("b", b)?;
        positive("theta", theta)?;
        if theta >= b {
            return Err(ThermoError::Parameter {
                name: "theta",
                value: theta,
                reason: "must satisfy theta < b",
            });
        }
        let rt = r * t_star;
        let join = b - theta;
        let p_join = rt * join / (b - join) - a * join * join;
        let dp_join = rt * b / ((b - join) * (b - join)) - 2.0 * a * join;
        let curvature = (1.0 - dp_join) / (2.0 * theta);
        let p_ramp_end = p_join + dp_join * theta + curvature * theta * theta;

        let mut law = Self {
            r,
            t_star,
            a,
            b,
            theta,
            rt,
            join,
            p_join,
            dp_join,
            curvature,
            p_ramp_end,
            slope_bound: 0.0,
            quad_coef: [0.0; 3],
            quad_shift: 0.0,
            lin_offset: 0.0,
            lin_shift: 0.0,
        };

        // min P': convex on the VdW branch, piecewise linear beyond.
        law.slope_bound = law.min_slope(0.0, join + theta + 1.0);

        // P = α0 + α1 s + α2 s² on the quadratic piece.
        let c = curvature;
        law.quad_coef = [
            p_join - dp_join * join + c * join * join,
            dp_join - 2.0 * c * join,
            c,
        ];
        law.quad_shift = law.branch_antiderivative(join) - law.quad_antiderivative_raw(join);
        let ramp_end = join + theta;
        law.lin_offset = p_ramp_end - ramp_end;
        law.lin_shift = law.quad_antiderivative_raw(ramp_end) + law.quad_shift
            - law.lin_antiderivative_raw(ramp_end);
        Ok(law)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn t_star(&self) -> f64 {
        self.t_star
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `b - θ`, where the analytic branch hands over to the extension.
    pub fn join_density(&self) -> f64 {
        self.join
    }

    /// End of the quadratic ramp; `P' = 1` beyond it.
    pub fn ramp_end(&self) -> f64 {
        self.join + self.theta
    }

    /// A valid lower bound on `P'` over `ρ > 0` (attained, not estimated).
    pub fn slope_lower_bound(&self) -> f64 {
        self.slope_bound
    }

    pub(crate) fn p(&self, rho: f64) -> f64 {
        if rho <= self.join {
            self.rt * rho / (self.b - rho) - self.a * rho * rho
        } else {
            let z = rho - self.join;
            if z <= self.theta {
                self.p_join + self.dp_join * z + self.curvature * z * z
            } else {
                self.p_ramp_end + (z - self.theta)
            }
        }
    }

    pub(crate) fn dp(&self, rho: f64) -> f64 {
        if rho <= self.join {
            let d = self.b - rho;
            self.rt * self.b / (d * d) - 2.0 * self.a * rho
        } else {
            let z = rho - self.join;
            if z <= self.theta {
                self.dp_join + 2.0 * self.curvature * z
            } else {
                1.0
            }
        }
    }

    /// Minimizer of `P'` on the analytic branch (`P''' > 0` there).
    fn branch_slope_argmin(&self) -> f64 {
        self.b - (self.rt * self.b / self.a).cbrt()
    }

    /// Exact `min P'` over `[lo, hi]`.
    pub fn min_slope(&self, lo: f64, hi: f64) -> f64 {
        let mut best = self.dp(lo).min(self.dp(hi));
        if lo < self.join {
            let top = hi.min(self.join);
            let m = self.branch_slope_argmin().clamp(lo, top);
            best = best.min(self.dp(m)).min(self.dp(top));
        }
        let ramp_end = self.ramp_end();
        if lo < ramp_end && hi > ramp_end {
            best = best.min(self.dp(ramp_end));
        }
        if lo < self.join && hi > self.join {
            // Right limit at the join equals the left one (C¹).
            best = best.min(self.dp_join);
        }
        best
    }

    /// Spinodal interval `{P' < 0}` on the analytic branch, if any.
    pub fn spinodal(&self) -> Option<(f64, f64)> {
        let m = self.branch_slope_argmin().clamp(0.0, self.join);
        if self.dp(m) >= 0.0 {
            return None;
        }
        let root = |mut lo: f64, mut hi: f64, rising: bool| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let neg = self.dp(mid) < 0.0;
                if neg == rising {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let left = root(0.0, m, false);
        let right = if self.dp(self.join) < 0.0 {
            self.join
        } else {
            root(m, self.join, true)
        };
        Some((left, right))
    }

    fn branch_antiderivative(&self, s: f64) -> f64 {
        (self.rt / self.b) * (s / (self.b - s)).ln() - self.a * s
    }

    fn quad_antiderivative_raw(&self, s: f64) -> f64 {
        let [a0, a1, a2] = self.quad_coef;
        -a0 / s + a1 * s.ln() + a2 * s
    }

    fn lin_antiderivative_raw(&self, s: f64) -> f64 {
        -self.lin_offset / s + s.ln() + 0.0
    }

    /// A continuous antiderivative of `P(s)/s²` for `s > 0`.
    pub(crate) fn antiderivative(&self, s: f64) -> f64 {
        if s <= self.join {
            self.branch_antiderivative(s)
        } else if s <= self.ramp_end() {
            self.quad_antiderivative_raw(s) + self.quad_shift
        } else {
            self.lin_antiderivative_raw(s) + self.lin_shift
        }
    }
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant through
/// nondecreasing samples, continued linearly past the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    rho: Vec<f64>,
    p: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(rho: Vec<f64>, p: Vec<f64>) -> Result<Self, ThermoError> {
        if rho.len() != p.len() {
            return Err(ThermoError::Table(format!(
                "{} densities but {} pressures",
                rho.len(),
                p.len()
            )));
        }
        if rho.len() < 2 {
            return Err(ThermoError::Table("need at least two samples".into()));
        }
        if rho.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(ThermoError::Table("non-finite sample".into()));
        }
        if rho[0] != 0.0 || p[0] != 0.0 {
            return Err(ThermoError::Table(
                "first sample must be (0, 0): P is non-decreasing on [0,+inf) vanishing at 0".into(),
            ));
        }
        if let Some(k) = rho.windows(2).position(|w| w[1] <= w[0]) {
            return Err(ThermoError::Table(format!(
                "densities must increase strictly (index {})",
                k + 1
            )));
        }
        if let Some(k) = p.windows(2).position(|w| w[1] < w[0]) {
            return Err(ThermoError::Table(format!(
                "pressures must be non-decreasing (index {})",
                k + 1
            )));
        }
        let slopes = pchip_slopes(&rho, &p);
        Ok(Self { rho, p, slopes })
    }

    pub fn densities(&self) -> &[f64] {
        &self.rho
    }

    pub fn pressures(&self) -> &[f64] {
        &self.p
    }

    fn segment(&self, x: f64) -> Option<usize> {
        let last = self.rho.len() - 1;
        if x >= self.rho[last] {
            return None;
        }
        Some(self.rho.partition_point(|&r| r <= x).saturating_sub(1).min(last - 1))
    }

    pub(crate) fn p(&self, x: f64) -> f64 {
        match self.segment(x) {
            None => {
                let last = self.rho.len() - 1;
                self.p[last] + self.slopes[last] * (x - self.rho[last])
            }
            Some(k) => {
                let h = self.rho[k + 1] - self.rho[k];
                let t = (x - self.rho[k]) / h;
                let (t2, t3) = (t * t, t * t * t);
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                h00 * self.p[k] + h10 * h * self.slopes[k] + h01 * self.p[k + 1] + h11 * h * self.slopes[k + 1]
            }
        }
    }

    pub(crate) fn dp(&self, x: f64) -> f64 {
        match self.segment(x) {
            None => self.slopes[self.rho.len() - 1],
            Some(k) => {
                let h = self.rho[k + 1] - self.rho[k];
                let t = (x - self.rho[k]) / h;
                let t2 = t * t;
                let d00 = (6.0 * t2 - 6.0 * t) / h;
                let d10 = 3.0 * t2 - 4.0 * t + 1.0;
                let d01 = (-6.0 * t2 + 6.0 * t) / h;
                let d11 = 3.0 * t2 - 2.0 * t;
                d00 * self.p[k] + d10 * self.slopes[k] + d01 * self.p[k + 1] + d11 * self.slopes[k + 1]
            }
        }
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() || d0 == 0.0 {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// A pressure law `P(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PressureLaw {
    Isentropic(Isentropic),
    VanDerWaals(VanDerWaals),
    MonotoneTable(MonotoneTable),
}

impl PressureLaw {
    pub fn isentropic(a: f64, gamma: f64) -> Result<Self, ThermoError> {
        Isentropic::new(a, gamma).map(Self::Isentropic)
    }

    pub fn van_der_waals(r: f64, t_star: f64, a: f64, b: f64, theta: f64) -> Result<Self, ThermoError> {
        VanDerWaals::new(r, t_star, a, b, theta).map(Self::VanDerWaals)
    }

    pub fn table(rho: Vec<f64>, p: Vec<f64>) -> Result<Self, ThermoError> {
        MonotoneTable::new(rho, p).map(Self::MonotoneTable)
    }

    fn check(rho: f64) -> Result<(), ThermoError> {
        if rho.is_finite() && rho >= 0.0 {
            Ok(())
        } else {
            Err(ThermoError::NegativeDensity(rho))
        }
    }

    pub fn pressure(&self, rho: f64) -> Result<f64, ThermoError> {
        Self::check(rho)?;
        Ok(self.p(rho))
    }

    pub fn dpressure(&self, rho: f64) -> Result<f64, ThermoError> {
        Self::check(rho)?;
        Ok(self.dp(rho))
    }

    /// Unchecked `P`; callers guarantee `ρ >= 0`.
    pub(crate) fn p(&self, rho: f64) -> f64 {
        match self {
            Self::Isentropic(l) => l.p(rho),
            Self::VanDerWaals(l) => l.p(rho),
            Self::MonotoneTable(l) => l.p(rho),
        }
    }

    pub(crate) fn dp(&self, rho: f64) -> f64 {
        match self {
            Self::Isentropic(l) => l.dp(rho),
            Self::VanDerWaals(l) => l.dp(rho),
            Self::MonotoneTable(l) => l.dp(rho),
        }
    }

    /// `lim_{s→0} P(s)/s`. Positive exactly when `∫_0 P(z)/z² dz` diverges.
    pub fn slope_at_zero(&self) -> f64 {
        match self {
            Self::Isentropic(l) if l.gamma == 1.0 => l.a,
            Self::Isentropic(_) => 0.0,
            Self::VanDerWaals(l) => l.rt / l.b,
            Self::MonotoneTable(l) => l.slopes[0],
        }
    }

    /// Whether `P' >= 0` everywhere.
    pub fn is_monotone(&self) -> bool {
        match self {
            Self::VanDerWaals(l) => l.slope_bound >= 0.0,
            _ => true,
        }
    }

    /// Points where the law changes its analytic form.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Isentropic(_) => Vec::new(),
            Self::VanDerWaals(l) => vec![l.join, l.ramp_end()],
            Self::MonotoneTable(l) => l.rho.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vdw() -> VanDerWaals {
        // R T* = 0.1
        VanDerWaals::new(1.0, 0.1, 1.0, 1.0, 0.05).unwrap()
    }

    #[test]
    fn isentropic_values() {
        let law = PressureLaw::isentropic(1.0, 2.0).unwrap();
        assert_eq!(law.pressure(3.0).unwrap(), 9.0);
        assert_eq!(law.dpressure(3.0).unwrap(), 6.0);
        assert_eq!(law.pressure(0.0).unwrap(), 0.0);
        assert!(matches!(law.pressure(-1.0), Err(ThermoError::NegativeDensity(_))));
        assert!(PressureLaw::isentropic(1.0, 0.9).is_err());
        assert!(PressureLaw::isentropic(0.0, 2.0).is_err());
    }

    #[test]
    fn isentropic_is_strictly_increasing() {
        let law = PressureLaw::isentropic(0.7, 1.4).unwrap();
        let mut prev = law.pressure(0.0).unwrap();
        for i in 1..1000 {
            let p = law.pressure(i as f64 * 0.01).unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn vdw_values_inside_spinodal() {
        let law = PressureLaw::VanDerWaals(vdw());
        let p = law.pressure(0.5).unwrap();
        let dp = law.dpressure(0.5).unwrap();
        assert!((p - (-0.15)).abs() < 1e-15);
        assert!((dp - (-0.6)).abs() < 1e-14);
        assert!(!law.is_monotone());
    }

    #[test]
    fn vdw_extension_is_c1() {
        let l = vdw();
        for s in [l.join_density(), l.ramp_end()] {
            let e = 1e-9;
            assert!((l.p(s - e) - l.p(s + e)).abs() < 1e-7);
            assert!((l.dp(s - e) - l.dp(s + e)).abs() < 1e-6);
            // Exactly at the knot both formulas agree.
            assert!((l.p(s) - l.p(s + 1e-15)).abs() < 1e-10);
        }
        assert_eq!(l.dp(l.ramp_end() + 0.3), 1.0);
    }

    #[test]
    fn vdw_extension_is_increasing() {
        let l = vdw();
        let mut prev = l.p(l.join_density());
        for i in 1..=2000 {
            let s = l.join_density() + i as f64 * 1e-3;
            let p = l.p(s);
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn vdw_slope_bound_holds_on_samples() {
        let l = vdw();
        let bound = l.slope_lower_bound();
        let mut min = f64::INFINITY;
        for i in 1..=10_000 {
            min = min.min(l.dp(i as f64 * 2.0e-4));
        }
        assert!(min >= bound - 1e-9);
        assert!((min - bound).abs() < 1e-6, "bound should be attained: {min} vs {bound}");
    }

    #[test]
    fn spinodal_roots() {
        let l = vdw();
        let (lo, hi) = l.spinodal().unwrap();
        assert!(l.dp(lo).abs() < 1e-10 && l.dp(hi).abs() < 1e-10);
        assert!(l.dp(0.5 * (lo + hi)) < 0.0);
        assert!(lo > 0.05 && lo < 0.06 && hi > 0.7 && hi < 0.75);
        let hot = VanDerWaals::new(1.0, 0.5, 1.0, 1.0, 0.05).unwrap();
        assert!(hot.spinodal().is_none());
    }

    #[test]
    fn antiderivative_matches_integrand() {
        let l = vdw();
        for s in [0.01, 0.3, 0.94, 0.96, 0.99, 1.2, 3.0] {
            let e = 1e-6;
            let d = (l.antiderivative(s + e) - l.antiderivative(s - e)) / (2.0 * e);
            let want = l.p(s) / (s * s);
            assert!((d - want).abs() <= 1e-6 * (1.0 + want.abs()), "s={s}: {d} vs {want}");
        }
    }

    #[test]
    fn table_validation_and_interpolation() {
        assert!(PressureLaw::table(vec![0.0, 1.0], vec![0.0, -1.0]).is_err());
        assert!(PressureLaw::table(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PressureLaw::table(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        let law = PressureLaw::table(
            vec![0.0, 0.5, 1.0, 2.0, 3.0],
            vec![0.0, 0.1, 0.1, 1.5, 4.0],
        )
        .unwrap();
        assert_eq!(law.pressure(1.0).unwrap(), 0.1);
        assert_eq!(law.pressure(0.0).unwrap(), 0.0);
        // Never undershoots between knots.
        let mut prev = 0.0;
        for i in 0..=5000 {
            let p = law.pressure(i as f64 * 1e-3).unwrap();
            assert!(p >= prev - 1e-15, "at {}", i as f64 * 1e-3);
            assert!(law.dpressure(i as f64 * 1e-3).unwrap() >= -1e-12);
            prev = p;
        }
        // Flat segment stays flat.
        assert!((law.pressure(0.75).unwrap() - 0.1).abs() < 1e-15);
    }
}
