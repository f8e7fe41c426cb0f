//! Sweeps a coarse (pc, rho) grid for both models and permanence extremes
//! and writes the CSV to the path given as first argument (default
//! `sweep.csv`).

use std::path::PathBuf;

use forest_rotation::chain::ChainConfig;
use forest_rotation::sweep::{run_sweep, Quantity, SweepGrid, SweepOptions};
use forest_rotation::EconParams;

fn main() -> forest_rotation::Result<()> {
    let output = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweep.csv".into()));
    let grid = SweepGrid {
        pc_axis: (0..=10).map(|i| i as f64 * 15.0).collect(),
        rho_axis: (0..=6).map(|i| i as f64 * 5.0 / 1000.0).collect(),
        quantity: Quantity::FirstRotation,
        ..Default::default()
    };
    let summary = run_sweep(&grid, &EconParams::default(), &ChainConfig::default(), &output, &SweepOptions::default())?;
    println!("{summary}");
    println!("wrote {}", output.display());
    Ok(())
}
