//! Age of the stands due for harvest today when the carbon price keeps
//! rising, compared with the optimal first rotation of bare land.

use forest_rotation::chain::{solve_chain, ChainConfig};
use forest_rotation::current_age::current_harvest_age;
use forest_rotation::{EconParams, GrowthModel};

fn main() -> forest_rotation::Result<()> {
    let model = GrowthModel::coastal();
    let config = ChainConfig::default();
    println!("rho     bare-land T1   current harvest age");
    for rho in [0.0, 0.005, 0.01, 0.015, 0.02] {
        let params = EconParams { p_c: 50.0, rho, ..Default::default() };
        let t1 = solve_chain(&model, &params, &config)?.first_rotation();
        let age = current_harvest_age(&model, &params, &config)?;
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.2}"));
        println!("{rho:<6}  {:>12}   {:>8} ({})", fmt(t1), fmt(age.tau), age.status.as_str());
        if age.fixed_points.len() > 1 {
            println!("        other fixed points {:?}", &age.fixed_points[1..]);
        }
    }
    Ok(())
}
