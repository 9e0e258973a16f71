//! Property tests for the conservation and structural invariants.

use nsk_core::grid::{Grid, ScalarField, VectorField};
use nsk_core::kernel::{Kernel, KernelSpec};
use nsk_core::oracle;
use nsk_core::solver::{PhysParams, Solver, State};
use nsk_core::thermo::{j_gamma, orlicz_norm, orlicz_psi, PressureLaw, SplitPressure};
use proptest::prelude::*;

fn grid(dim: usize) -> Grid {
    Grid::new(dim, if dim == 1 { 32 } else { 16 }, 1.0).unwrap()
}

fn state_strategy(dim: usize) -> impl Strategy<Value = State> {
    let g = grid(dim);
    (
        prop::collection::vec(0.5f64..1.5, g.cells()),
        prop::collection::vec(-0.3f64..0.3, g.cells() * dim),
    )
        .prop_map(move |(rho, m)| {
            State::new(0.0, ScalarField::new(g, rho).unwrap(), VectorField::new(g, m).unwrap()).unwrap()
        })
}

fn solver(grid: Grid, kappa: f64) -> Solver {
    let params = PhysParams::new(
        0.05,
        0.01,
        kappa,
        PressureLaw::isentropic(1.0, 1.4).unwrap(),
        &KernelSpec::Gaussian { sigma: 0.05 },
        grid,
    )
    .unwrap();
    Solver::new(params, 1e-10).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn step_conserves_mass_and_momentum(state in state_strategy(1), kappa in 0.0f64..2.0) {
        let s = solver(*state.grid(), kappa);
        let dt = s.cfl_dt(&state, 0.5);
        let out = s.step(&state, dt).unwrap();
        let (m0, m1) = (state.mass(), out.state.mass());
        prop_assert!((m1 - m0 - out.vacuum_mass).abs() <= 1e-13 * m0);
        for (a, b) in state.momentum().iter().zip(out.state.momentum()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!(out.dissipation >= 0.0);
    }

    #[test]
    fn step_conserves_in_2d(state in state_strategy(2)) {
        let s = solver(*state.grid(), 0.7);
        let dt = s.cfl_dt(&state, 0.5);
        let out = s.step(&state, dt).unwrap();
        prop_assert!((out.state.mass() - state.mass()).abs() <= 1e-13 * state.mass());
        for (a, b) in state.momentum().iter().zip(out.state.momentum()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn mirror_commutes_with_step(state in state_strategy(1)) {
        let s = solver(*state.grid(), 1.0);
        let dt = s.cfl_dt(&state, 0.5);
        let a = s.step(&state, dt).unwrap().state.mirrored();
        let b = s.step(&state.mirrored(), dt).unwrap().state;
        prop_assert!(oracle::max_rel_error(a.rho.values(), b.rho.values()) <= 1e-12);
        prop_assert!(oracle::max_rel_error(a.m.values(), b.m.values()) <= 1e-12);
    }

    #[test]
    fn vacuum_projection_floors_density(
        rho in prop::collection::vec(0.0f64..1.0, 32),
        holes in prop::collection::vec(0usize..32, 1..6),
    ) {
        let g = grid(1);
        let mut rho = rho;
        for h in holes {
            rho[h] = 0.0;
        }
        let m: Vec<f64> = rho.iter().map(|&r| if r > 0.0 { 0.1 * r } else { 0.0 }).collect();
        let state = State::new(0.0, ScalarField::new(g, rho).unwrap(), VectorField::new(g, m).unwrap()).unwrap();
        let eps = 1e-3;
        let params = PhysParams::new(
            0.01, 0.0, 0.0, PressureLaw::isentropic(1.0, 1.4).unwrap(), &KernelSpec::Tent { radius: 0.1 }, g,
        ).unwrap();
        let s = Solver::new(params, eps).unwrap();
        let dt = s.cfl_dt(&state, 0.5);
        let out = s.step(&state, dt).unwrap();
        prop_assert!(out.vacuum_mass >= 0.0);
        for (i, &r) in out.state.rho.values().iter().enumerate() {
            prop_assert!(r >= eps);
            if r == eps {
                prop_assert_eq!(out.state.m.values()[i], 0.0);
            }
        }
    }

    #[test]
    fn interaction_energy_matches_double_sum(
        vals in prop::collection::vec(0.0f64..3.0, 16),
        kappa in 0.1f64..5.0,
    ) {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let k = Kernel::build(&KernelSpec::Tent { radius: 0.3 }, g).unwrap();
        let rho = ScalarField::new(g, vals).unwrap();
        let fast = k.interaction_energy(&rho, kappa).unwrap();
        let slow = oracle::interaction_double_sum(k.samples(), &rho, kappa);
        prop_assert!(fast >= -1e-15);
        prop_assert!((fast - slow).abs() <= 1e-10 * slow.abs().max(1e-14));
    }

    #[test]
    fn capillarity_integrates_to_zero(vals in prop::collection::vec(-2.0f64..2.0, 64)) {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let k = Kernel::build(&KernelSpec::Gaussian { sigma: 0.04 }, g).unwrap();
        let rho = ScalarField::new(g, vals).unwrap();
        let d = k.capillarity(&rho).unwrap();
        prop_assert!(d.integrate().abs() <= 1e-13);
    }

    #[test]
    fn j_gamma_is_nonnegative(rho in 0.0f64..10.0, rho_bar in 0.1f64..5.0, gamma in 1.0f64..4.0) {
        let scale = rho.powf(gamma) + rho_bar.powf(gamma);
        prop_assert!(j_gamma(rho, rho_bar, gamma) >= -1e-12 * scale);
    }

    #[test]
    fn orlicz_norm_normalizes(vals in prop::collection::vec(-10.0f64..10.0, 32), q in 2.0f64..5.0) {
        prop_assume!(vals.iter().any(|v| v.abs() > 1e-6));
        let g = Grid::new(1, 32, 1.0).unwrap();
        let f = ScalarField::new(g, vals).unwrap();
        let n = orlicz_norm(&f, 2.0, q, 1.0).unwrap();
        let modular = f.map(|v| orlicz_psi(v / n, 2.0, q, 1.0)).integrate();
        prop_assert!((modular - 1.0).abs() <= 1e-8);
        // Homogeneity of the Luxemburg norm.
        let doubled = orlicz_norm(&f.map(|v| 2.0 * v), 2.0, q, 1.0).unwrap();
        prop_assert!((doubled - 2.0 * n).abs() <= 1e-9 * n);
    }

    #[test]
    fn split_pressure_properties(t_star in 0.05f64..0.25, a in 0.8f64..1.5) {
        let law = match PressureLaw::van_der_waals(1.0, t_star, a, 1.0, 0.05).unwrap() {
            PressureLaw::VanDerWaals(l) => l,
            _ => unreachable!(),
        };
        let Ok(sp) = SplitPressure::new(&law) else {
            return Ok(());
        };
        let top = 1.5 * sp.rho_bar_split();
        let mut prev = sp.p1(0.0);
        for i in 1..=2000 {
            let r = top * i as f64 / 2000.0;
            let p1 = sp.p1(r);
            prop_assert!(p1 - prev >= -1e-9);
            prop_assert!(sp.p2(r) >= 0.0);
            if r >= sp.rho_bar_split() {
                prop_assert_eq!(sp.p2(r), 0.0);
            }
            prev = p1;
        }
    }
}
