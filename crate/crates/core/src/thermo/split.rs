//! `P = P1 - P2` with `P1` nondecreasing and `P2 >= 0` compactly supported.
//!
//! `P2` is tabulated on cells of width `Δ = θ/(4R)`, so a mollifier spanning
//! `R` cells on each side has half-width `θ/4`. Over the spinodal region `P2`
//! rises with slope `σ_i >= max(0, -P')` on every cell, taken as the
//! mollified running maximum of that bound. After the rise it descends with
//! slope at most `½ min P'` per cell until it returns to zero.

use super::law::VanDerWaals;
use super::ThermoError;

/// Cells per mollifier half-width.
pub const MOLLIFIER_CELLS: usize = 16;

const MAX_CELLS: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPressure {
    law: VanDerWaals,
    delta: f64,
    knots: Vec<f64>,
    rho_bar_split: f64,
}

fn bump_weights(r: usize) -> Vec<f64> {
    let w: Vec<f64> = (-(r as i64)..=r as i64)
        .map(|j| {
            let x = j as f64 / (r as f64 + 1.0);
            (1.0 - x * x).powi(3)
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Running max (or min) over `±r`, then mollified. Out-of-range entries
/// read as `fill`.
fn envelope_mollify(values: &[f64], r: usize, fill: f64, upper: bool) -> Vec<f64> {
    let n = values.len() as i64;
    let ri = r as i64;
    let at = |i: i64| if i < 0 || i >= n { fill } else { values[i as usize] };
    let env: Vec<f64> = (-ri..n + ri)
        .map(|i| {
            let window = (i - ri..=i + ri).map(at);
            if upper {
                window.fold(f64::NEG_INFINITY, f64::max)
            } else {
                window.fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    // env[k] corresponds to index k - ri.
    let w = bump_weights(r);
    (0..n)
        .map(|i| {
            (-ri..=ri)
                .map(|j| w[(j + ri) as usize] * env[(i + j + ri) as usize])
                .sum()
        })
        .collect()
}

impl SplitPressure {
    pub fn new(law: &VanDerWaals) -> Result<Self, ThermoError> {
        let join = law.join_density();
        let dp_join = law.min_slope(join, join);
        if dp_join < 0.0 {
            return Err(ThermoError::NonMonotoneExtension {
                rho: join,
                slope: dp_join,
            });
        }
        let r = MOLLIFIER_CELLS;
        let delta = law.theta() / (4.0 * r as f64);
        let cell_min = |i: usize| law.min_slope(i as f64 * delta, (i + 1) as f64 * delta);

        // P' >= 0 on the extension, so scanning up to the join suffices.
        let scan = (join / delta).ceil() as usize + 1;
        let last_negative = (0..scan).rev().find(|&i| cell_min(i) < 0.0);
        let Some(last_negative) = last_negative else {
            return Ok(Self {
                law: *law,
                delta,
                knots: vec![0.0],
                rho_bar_split: 0.0,
            });
        };

        let rise_cells = last_negative + 2 * r + 1;
        let need: Vec<f64> = (0..rise_cells).map(|i| (-cell_min(i)).max(0.0)).collect();
        let rise = envelope_mollify(&need, r, 0.0, true);

        let mut knots = Vec::with_capacity(rise_cells * 2);
        knots.push(0.0);
        let mut level = 0.0;
        for (&s, &lo) in rise.iter().zip(&need) {
            // Weights sum to one only up to roundoff.
            level += s.max(lo) * delta;
            knots.push(level);
        }

        // Descent in blocks; limits depend only on P', so extend lazily.
        let start = rise_cells;
        let mut block = (4 * rise_cells).max(8 * r);
        loop {
            if start + block > MAX_CELLS {
                return Err(ThermoError::Parameter {
                    name: "theta",
                    value: law.theta(),
                    reason: "splitting descent did not close",
                });
            }
            let limit: Vec<f64> = (start..start + block + r)
                .map(|i| 0.5 * cell_min(i).max(0.0))
                .collect();
            let smooth = envelope_mollify(&limit, r, 0.0, false);
            let mut trial = knots.clone();
            let mut current = level;
            let mut closed = false;
            for (k, &g) in smooth.iter().take(block).enumerate() {
                let ramp = ((k as f64 + 0.5) / (2.0 * r as f64)).min(1.0);
                let taper = ramp * ramp * (3.0 - 2.0 * ramp);
                let slope = (g * taper).min(limit[k]).max(0.0);
                let next = current - slope * delta;
                if next <= 0.0 {
                    trial.push(0.0);
                    closed = true;
                    break;
                }
                trial.push(next);
                current = next;
            }
            if closed {
                let rho_bar_split = (trial.len() - 1) as f64 * delta;
                return Ok(Self {
                    law: *law,
                    delta,
                    knots: trial,
                    rho_bar_split,
                });
            }
            block *= 2;
        }
    }

    pub fn law(&self) -> &VanDerWaals {
        &self.law
    }

    /// Density beyond which `P2 ≡ 0`.
    pub fn rho_bar_split(&self) -> f64 {
        self.rho_bar_split
    }

    /// Tabulation step of `P2`.
    pub fn cell_width(&self) -> f64 {
        self.delta
    }

    pub fn p2(&self, rho: f64) -> f64 {
        if !(rho < self.rho_bar_split) || rho <= 0.0 {
            return 0.0;
        }
        let x = rho / self.delta;
        let k = (x.floor() as usize).min(self.knots.len() - 2);
        let t = x - k as f64;
        self.knots[k] + t * (self.knots[k + 1] - self.knots[k])
    }

    pub fn p1(&self, rho: f64) -> f64 {
        self.law.p(rho) + self.p2(rho)
    }

    /// `ρ, P, P1, P2` rows on `count` uniform samples of `[0, rho_max]`.
    pub fn to_csv(&self, rho_max: f64, count: usize) -> String {
        let mut out = String::from("rho,P,P1,P2\n");
        for i in 0..count {
            let rho = rho_max * i as f64 / (count.max(2) - 1) as f64;
            out.push_str(&format!(
                "{:?},{:?},{:?},{:?}\n",
                rho,
                self.law.p(rho),
                self.p1(rho),
                self.p2(rho)
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(split: &SplitPressure) -> Vec<f64> {
        let top = 2.0 * split.law().b().max(split.rho_bar_split());
        (0..10_000).map(|i| top * i as f64 / 9_999.0).collect()
    }

    #[test]
    fn monotone_law_has_trivial_split() {
        let law = VanDerWaals::new(1.0, 0.5, 1.0, 1.0, 0.05).unwrap();
        let split = SplitPressure::new(&law).unwrap();
        assert_eq!(split.rho_bar_split(), 0.0);
        for rho in [0.0, 0.3, 0.97, 2.0] {
            assert_eq!(split.p2(rho), 0.0);
            assert_eq!(split.p1(rho), law.p(rho));
        }
    }

    #[test]
    fn spinodal_split_invariants() {
        let law = VanDerWaals::new(1.0, 0.1, 1.0, 1.0, 0.05).unwrap();
        let split = SplitPressure::new(&law).unwrap();
        let (_, right) = law.spinodal().unwrap();
        assert!(split.rho_bar_split() > right);
        let xs = samples(&split);
        let mut prev = f64::NEG_INFINITY;
        for &x in &xs {
            let p1 = split.p1(x);
            let p2 = split.p2(x);
            assert!(p1 - prev >= -1e-9, "P1 decreases at {x}");
            assert!(p2 >= 0.0);
            if x >= split.rho_bar_split() {
                assert_eq!(p2, 0.0);
            }
            assert!((p1 - p2 - law.p(x)).abs() <= 1e-9);
            prev = p1;
        }
        // Nontrivial: P2 peaks well above zero.
        let peak = xs.iter().map(|&x| split.p2(x)).fold(0.0, f64::max);
        assert!(peak > 0.01);
    }

    #[test]
    fn rejects_decreasing_extension() {
        // Very wide θ puts the join inside the spinodal.
        let law = VanDerWaals::new(1.0, 0.1, 1.0, 1.0, 0.4).unwrap();
        assert!(matches!(
            SplitPressure::new(&law),
            Err(ThermoError::NonMonotoneExtension { .. })
        ));
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let law = VanDerWaals::new(1.0, 0.1, 1.0, 1.0, 0.05).unwrap();
        let csv = SplitPressure::new(&law).unwrap().to_csv(1.5, 11);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rho,P,P1,P2");
        assert_eq!(lines.len(), 12);
    }
}
