//! Scaling both prices leaves the optimal rotations unchanged, so results
//! for one timber price carry over to any other after rescaling the
//! carbon price.

use forest_rotation::chain::{solve_chain, ChainConfig};
use forest_rotation::{EconParams, GrowthModel};

fn main() -> forest_rotation::Result<()> {
    let model = GrowthModel::boreal();
    let base = EconParams { p_c: 40.0, rho: 0.01, beta: 1.0, ..Default::default() };
    let config = ChainConfig::default();
    let reference = solve_chain(&model, &base, &config)?;
    println!("lambda   p_f     p_c    T1          npv/lambda");
    for lambda in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let p = base.scaled_prices(lambda);
        let r = solve_chain(&model, &p, &config)?;
        println!(
            "{lambda:<6}  {:<6}  {:<5}  {:.6}  {:.6}",
            p.p_f,
            p.p_c,
            r.first_rotation().unwrap_or(f64::NAN),
            r.npv / lambda
        );
    }
    println!("reference npv {:.6}", reference.npv);
    Ok(())
}
