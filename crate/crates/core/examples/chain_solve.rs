//! Solves the chained first-order conditions for a scenario given on the
//! command line: `cargo run --example chain_solve -- boreal 60 0.015 1`
//! (model, initial carbon price, its growth rate, permanence share).

use forest_rotation::chain::{solve_chain, terminal_sensitivity, ChainConfig, Classification};
use forest_rotation::{EconParams, GrowthModel};

fn main() -> forest_rotation::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let model = GrowthModel::builtin(args.first().map_or("coastal", String::as_str))?;
    let num = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let params = EconParams {
        p_c: num(1, 30.0),
        rho: num(2, 0.01),
        beta: num(3, 0.0),
        ..Default::default()
    };
    let config = ChainConfig::default();
    let report = solve_chain(&model, &params, &config)?;

    println!("{} {:?}", model.name, params);
    println!("classification {}", report.classification);
    if let Some(s) = &report.schedule {
        for (i, t) in s.lengths.iter().enumerate() {
            println!("  T{} = {t:.4}", i + 1);
        }
    }
    println!("npv {:.3}, max residual {:.2e}", report.npv, report.max_residual());
    for s in &report.diagnostics.starts {
        println!(
            "  start {:<10} converged {:<5} after {:>2} iterations, T1 {:.4}",
            s.label, s.converged, s.iterations, s.first_rotation
        );
    }
    if report.classification == Classification::Interior {
        let d = terminal_sensitivity(&model, &params, &config, &[20.0, 100.0, 200.0])?;
        println!("T1 moves by at most {d:.4} y when the last rotation is fixed to 20, 100 or 200 y");
    }
    Ok(())
}
