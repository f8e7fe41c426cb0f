//! Compares the optimal first rotation with permanent storage of harvested
//! carbon against full release at harvest over a (pc, rho) grid, and lists
//! cells where full release gives the shorter rotation.

use forest_rotation::chain::{ChainConfig, ChainSolver, Classification};
use forest_rotation::{EconParams, GrowthModel};

fn main() -> forest_rotation::Result<()> {
    let config = ChainConfig::default();
    let tol = config.tol_t;
    let mut compared = 0;
    let mut violations = Vec::new();
    for model in [GrowthModel::coastal(), GrowthModel::boreal()] {
        for rho in (0..=6).map(|i| i as f64 * 5.0 / 1000.0) {
            let released = ChainSolver::new(&model, &EconParams { rho, beta: 0.0, ..Default::default() }, &config)?;
            let stored = ChainSolver::new(&model, &EconParams { rho, beta: 1.0, ..Default::default() }, &config)?;
            for pc in (1..=15).map(|i| i as f64 * 10.0) {
                let a = released.solve_at_price(pc)?;
                let b = stored.solve_at_price(pc)?;
                if a.classification != Classification::Interior || b.classification != Classification::Interior {
                    continue;
                }
                compared += 1;
                let (ta, tb) = (a.first_rotation().unwrap(), b.first_rotation().unwrap());
                if ta < tb - tol {
                    violations.push((model.name.clone(), rho, pc, ta, tb));
                }
            }
        }
    }
    println!("{compared} interior pairs compared");
    for (m, rho, pc, ta, tb) in &violations {
        println!("  {m} rho={rho} pc={pc}: T1 released {ta:.3} < stored {tb:.3}");
    }
    println!("{} violations", violations.len());
    Ok(())
}
