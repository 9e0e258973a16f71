//! Cut-off functions `T_k(z) = k T(z/k)` and the truncated entropy `L_k`.
//!
//! `T` is the identity on `[0, 1]`, the constant 2 beyond 3, and on `[1, 3]`
//! the quartic `1 + 2u - 2u³ + u⁴` with `u = (z - 1)/2`. The quartic matches
//! value, slope and curvature at both knots, its second derivative
//! `3u(u - 1)` is nonpositive, and its slope `(1 - u)²(1 + 2u)` is
//! nonnegative, so `T` is C², concave and nondecreasing.

/// The fixed profile `T`.
pub fn t_profile(z: f64) -> f64 {
    if z <= 1.0 {
        z
    } else if z >= 3.0 {
        2.0
    } else {
        let u = 0.5 * (z - 1.0);
        1.0 + u * (2.0 + u * u * (u - 2.0))
    }
}

fn t_profile_slope(z: f64) -> f64 {
    if z <= 1.0 {
        1.0
    } else if z >= 3.0 {
        0.0
    } else {
        let u = 0.5 * (z - 1.0);
        (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u)
    }
}

/// `T_k(z)`; exact identity for `z <= k` and exactly `2k` for `z >= 3k`.
pub fn cutoff_t(z: f64, k: f64) -> f64 {
    if z <= k {
        z
    } else if z >= 3.0 * k {
        2.0 * k
    } else {
        k * t_profile(z / k)
    }
}

/// `T_k'(z)`.
pub fn cutoff_t_slope(z: f64, k: f64) -> f64 {
    if z <= k {
        1.0
    } else if z >= 3.0 * k {
        0.0
    } else {
        t_profile_slope(z / k)
    }
}

/// `L_k(ρ) = ρ ln ρ` up to `k`, continued by its tangent line at `k`.
pub fn cutoff_l(rho: f64, k: f64) -> f64 {
    if rho <= 0.0 {
        0.0
    } else if rho <= k {
        rho * rho.ln()
    } else {
        k * k.ln() + (k.ln() + 1.0) * (rho - k)
    }
}

/// `L_k'(ρ)`.
pub fn cutoff_l_slope(rho: f64, k: f64) -> f64 {
    rho.min(k).ln() + 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn t_knot_conditions() {
        // Value, slope and curvature from the quartic side match the
        // neighbouring pieces at both knots.
        let e = 1e-4;
        let d1 = |z: f64| (t_profile(z + e) - t_profile(z - e)) / (2.0 * e);
        let d2 = |z: f64| (t_profile(z + e) - 2.0 * t_profile(z) + t_profile(z - e)) / (e * e);
        assert_eq!(t_profile(1.0), 1.0);
        assert_eq!(t_profile(3.0), 2.0);
        let u = 0.5 * (3.0 - 1.0);
        assert_eq!(1.0 + u * (2.0 + u * u * (u - 2.0)), 2.0);
        assert!((d1(1.0) - 1.0).abs() < 1e-8 && (d1(3.0)).abs() < 1e-8);
        assert!(d2(1.0).abs() < 1e-3 && d2(3.0).abs() < 1e-3);
        assert!((t_profile_slope(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn t_k_exact_branches() {
        for k in [1.0, 2.5, 10.0] {
            for i in 0..=100 {
                let z = k * i as f64 / 100.0;
                assert_eq!(cutoff_t(z, k), z);
            }
            for i in 0..=100 {
                let z = 3.0 * k + i as f64;
                assert_eq!(cutoff_t(z, k), 2.0 * k);
            }
        }
    }

    #[test]
    fn t_k_concave_and_monotone() {
        let k = 2.0;
        let h = 1e-3;
        let v: Vec<f64> = (0..10_000).map(|i| cutoff_t(i as f64 * h, k)).collect();
        for w in v.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-12);
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn slopes_match_differences() {
        let k = 1.7;
        for z in [0.5, 2.0, 3.3, 4.9, 6.0] {
            let e = 1e-6;
            let fd = (cutoff_t(z + e, k) - cutoff_t(z - e, k)) / (2.0 * e);
            assert!((fd - cutoff_t_slope(z, k)).abs() < 1e-8);
            let fd = (cutoff_l(z + e, k) - cutoff_l(z - e, k)) / (2.0 * e);
            assert!((fd - cutoff_l_slope(z, k)).abs() < 1e-7);
        }
    }

    #[test]
    fn l_k_below_and_above() {
        let k = 3.0;
        for i in 1..=300 {
            let r = i as f64 * 0.01;
            assert_eq!(cutoff_l(r, k), r * r.ln());
        }
        // Tangent of a convex function lies below it.
        for i in 0..100 {
            let r = k + 0.1 * i as f64;
            let l = cutoff_l(r, k);
            assert!(l <= r * r.ln() + 1e-12);
            assert!(l >= 0.0);
        }
    }

    proptest! {
        #[test]
        fn t_k_approaches_identity(z in 0.0f64..50.0, k in 1.0f64..100.0) {
            if z <= k {
                prop_assert_eq!(cutoff_t(z, k), z);
            }
            prop_assert!(cutoff_t(z, k) <= z);
            prop_assert!(cutoff_t(z, k) <= 2.0 * k);
        }
    }
}
