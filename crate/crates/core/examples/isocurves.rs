//! Contours of the optimal first rotation in the (pc, rho) plane for the
//! coastal forest with carbon released at harvest.

use forest_rotation::chain::ChainConfig;
use forest_rotation::contour::{emit_isocurves, write_isocurves};
use forest_rotation::sweep::{compute_sweep, Quantity, SweepGrid, SweepOptions};
use forest_rotation::EconParams;

fn main() -> forest_rotation::Result<()> {
    let grid = SweepGrid {
        pc_axis: (0..=15).map(|i| i as f64 * 10.0).collect(),
        rho_axis: (0..=6).map(|i| i as f64 * 5.0 / 1000.0).collect(),
        betas: vec![0.0],
        models: vec!["coastal".into()],
        quantity: Quantity::FirstRotation,
    };
    let cells = compute_sweep(&grid, &EconParams::default(), &ChainConfig::default(), &SweepOptions::default())?;
    let lines = emit_isocurves(&cells, &[50.0, 60.0, 80.0], None)?;
    for line in &lines {
        let (first, last) = (line.points[0], line.points[line.points.len() - 1]);
        println!(
            "level {}: {} vertices from ({:.1}, {:.4}) to ({:.1}, {:.4})",
            line.level,
            line.points.len(),
            first.0,
            first.1,
            last.0,
            last.1
        );
    }
    write_isocurves(&lines, std::io::stdout().lock())
}
