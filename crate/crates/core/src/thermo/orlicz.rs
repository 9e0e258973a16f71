use super::ThermoError;
use crate::grid::ScalarField;

/// `Ψ(x) = |x|^p` for `|x| <= δ`, `|x|^q δ^{p-q}` beyond (continuous at δ).
pub fn orlicz_psi(x: f64, p: f64, q: f64, delta: f64) -> f64 {
    let a = x.abs();
    if a <= delta {
        a.powf(p)
    } else {
        a.powf(q) * delta.powf(p - q)
    }
}

/// Luxemburg norm `inf { t > 0 : ∫Ψ(f/t) <= 1 }`, found by bisection to a
/// relative bracket width of 1e-10.
pub fn orlicz_norm(f: &ScalarField, p: f64, q: f64, delta: f64) -> Result<f64, ThermoError> {
    if !(p.is_finite() && p > 1.0) {
        return Err(ThermoError::Parameter {
            name: "p",
            value: p,
            reason: "must satisfy p > 1",
        });
    }
    if !(q.is_finite() && q >= p) {
        return Err(ThermoError::Parameter {
            name: "q",
            value: q,
            reason: "must satisfy q >= p",
        });
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(ThermoError::Parameter {
            name: "delta",
            value: delta,
            reason: "must be positive",
        });
    }
    if !f.is_finite() {
        return Err(ThermoError::NonFinite);
    }
    if f.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let w = f.grid().cell_volume();
    let modular = |t: f64| f.values().iter().map(|&v| orlicz_psi(v / t, p, q, delta)).sum::<f64>() * w;

    // Modular is strictly decreasing in t; bracket the crossing of 1.
    let mut hi = f.max_abs().max(f64::MIN_POSITIVE);
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
