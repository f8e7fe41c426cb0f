use proptest::prelude::*;

use forest_rotation::chain::{solve_chain, ChainConfig, ChainSolver, Classification};
use forest_rotation::current_age::current_harvest_age;
use forest_rotation::oracle::{maximize_schedule, OracleConfig};
use forest_rotation::sweep::{compute_sweep, Quantity, SweepGrid, SweepOptions};
use forest_rotation::{EconParams, GrowthModel};

fn model(boreal: bool) -> GrowthModel {
    if boreal {
        GrowthModel::boreal()
    } else {
        GrowthModel::coastal()
    }
}

fn beta(stored: bool) -> f64 {
    if stored {
        1.0
    } else {
        0.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interior_solutions_agree_with_oracle(boreal: bool, stored: bool, pc in 0.0f64..150.0, rho in 0.0f64..0.03) {
        let m = model(boreal);
        let p = EconParams { p_c: pc, rho, beta: beta(stored), ..Default::default() };
        let cfg = ChainConfig::default();
        let r = solve_chain(&m, &p, &cfg).unwrap();
        if r.classification == Classification::Interior {
            let d = &r.diagnostics;
            let t1 = r.first_rotation().unwrap();
            prop_assert!((t1 - d.oracle_t1).abs() <= cfg.oracle.resolution().max(0.5), "{t1} vs {}", d.oracle_t1);
            prop_assert!(r.npv <= d.oracle_npv * (1.0 + 1e-9));
            prop_assert!(r.max_residual() <= cfg.tol_resid);
            prop_assert!(t1 <= cfg.t_cap);
        }
        if r.classification == Classification::NoHarvest {
            prop_assert!(r.diagnostics.oracle_t1 > cfg.t_cap);
        }
    }

    #[test]
    fn rotations_invariant_to_numeraire(boreal: bool, stored: bool, pc in 0.0f64..100.0, rho in 0.0f64..0.02, li in 0usize..3) {
        let lambda = [0.1, 2.0, 10.0][li];
        let m = model(boreal);
        let p = EconParams { p_c: pc, rho, beta: beta(stored), ..Default::default() };
        let cfg = ChainConfig::default();
        let base = solve_chain(&m, &p, &cfg).unwrap();
        prop_assume!(base.classification == Classification::Interior);
        let scaled = solve_chain(&m, &p.scaled_prices(lambda), &cfg).unwrap();
        prop_assert_eq!(scaled.classification, Classification::Interior);
        prop_assert!((scaled.first_rotation().unwrap() - base.first_rotation().unwrap()).abs() <= cfg.tol_t);
        prop_assert!((scaled.npv - lambda * base.npv).abs() <= 1e-8 * lambda * base.npv.abs());
    }

    #[test]
    fn constant_price_schedules_are_stationary(boreal: bool, pc in 0.0f64..150.0, b in 0.0f64..=1.0) {
        let cfg = ChainConfig::default();
        let p = EconParams { p_c: pc, beta: b, ..Default::default() };
        let r = solve_chain(&model(boreal), &p, &cfg).unwrap();
        let l = r.schedule.unwrap().lengths;
        for t in &l {
            prop_assert!((t - l[0]).abs() <= 10.0 * cfg.tol_t, "{:?}", l);
        }
    }

    #[test]
    fn release_at_harvest_lengthens_constant_price_rotations(boreal: bool, pc in 1.0f64..150.0) {
        let cfg = ChainConfig::default();
        let released = EconParams { p_c: pc, ..Default::default() };
        let stored = EconParams { beta: 1.0, ..released };
        let a = solve_chain(&model(boreal), &released, &cfg).unwrap();
        let b = solve_chain(&model(boreal), &stored, &cfg).unwrap();
        prop_assume!(a.classification == Classification::Interior && b.classification == Classification::Interior);
        prop_assert!(a.first_rotation().unwrap() >= b.first_rotation().unwrap() - cfg.tol_t);
    }

    #[test]
    fn oracle_grid_origin_does_not_move_optimum(boreal: bool, stored: bool, pc in 0.0f64..120.0, rho in 0.0f64..0.02) {
        let m = model(boreal);
        let p = EconParams { p_c: pc, rho, beta: beta(stored), ..Default::default() };
        let base = OracleConfig::default();
        let a = maximize_schedule(&m, &p, 5, &base).unwrap();
        prop_assume!(!a.boundary_contact && a.schedule.first() < 200.0);
        let b = maximize_schedule(&m, &p, 5, &OracleConfig { grid_offset: 0.5, ..base }).unwrap();
        prop_assert!((a.schedule.first() - b.schedule.first()).abs() < 2.0 * base.resolution(),
            "{} vs {}", a.schedule.first(), b.schedule.first());
    }

    #[test]
    fn constant_price_current_age_is_first_rotation(boreal: bool, stored: bool, pc in 0.0f64..120.0) {
        let m = model(boreal);
        let p = EconParams { p_c: pc, beta: beta(stored), ..Default::default() };
        let cfg = ChainConfig::default();
        let t1 = solve_chain(&m, &p, &cfg).unwrap().first_rotation().unwrap();
        let age = current_harvest_age(&m, &p, &cfg).unwrap();
        prop_assert!((age.tau.unwrap() - t1).abs() <= 0.05);
    }
}

#[test]
fn found_current_ages_are_fixed_points() {
    let cfg = ChainConfig::default();
    for (m, p) in [
        (GrowthModel::coastal(), EconParams { p_c: 50.0, rho: 0.02, ..Default::default() }),
        (GrowthModel::boreal(), EconParams { p_c: 30.0, rho: 0.01, beta: 1.0, ..Default::default() }),
        (GrowthModel::coastal(), EconParams { p_c: 100.0, rho: 0.005, beta: 1.0, ..Default::default() }),
    ] {
        let age = current_harvest_age(&m, &p, &cfg).unwrap();
        let Some(tau) = age.tau else { continue };
        let solver = ChainSolver::new(&m, &p, &cfg).unwrap();
        let r = solver.solve_at_price(p.p_c * (-p.rho * tau).exp()).unwrap();
        assert!((r.first_rotation().unwrap() - tau).abs() <= 0.05, "{} {:?}", m.name, p);
        assert!(age.fixed_points.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(age.fixed_points[0], tau);
    }
}

#[test]
fn interior_cells_meet_residual_tolerance() {
    let cfg = ChainConfig::default();
    let grid = SweepGrid {
        pc_axis: vec![0.0, 25.0, 75.0, 125.0],
        rho_axis: vec![0.0, 0.01, 0.02, 0.03],
        betas: vec![0.0, 1.0],
        models: vec!["coastal".into(), "boreal".into()],
        quantity: Quantity::FirstRotation,
    };
    let cells = compute_sweep(&grid, &EconParams::default(), &cfg, &SweepOptions::default()).unwrap();
    assert_eq!(cells.len(), grid.cell_count());
    for c in &cells {
        if c.classification == Classification::Interior {
            assert!(c.residual_max.unwrap() <= cfg.tol_resid, "{c:?}");
            assert!(c.value.unwrap() <= cfg.t_cap);
        }
    }
}
