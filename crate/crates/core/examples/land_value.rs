//! Values a hand-written rotation schedule and splits each rotation's cash
//! value into carbon and timber parts.

use forest_rotation::valuation::{land_value_of_schedule, rotation_cash_parts};
use forest_rotation::{EconParams, GrowthModel, RotationSchedule};

fn main() -> forest_rotation::Result<()> {
    let model = GrowthModel::coastal();
    let params = EconParams {
        p_c: 40.0,
        rho: 0.01,
        beta: 0.5,
        c_regen: 300.0,
        ..Default::default()
    };
    let schedule = RotationSchedule::new(vec![50.0, 55.0, 60.0, 60.0, 60.0], 0.0)?;

    let mut start = 0.0;
    println!("rotation  start  length  carbon     timber");
    for (i, &len) in schedule.lengths.iter().enumerate() {
        let parts = rotation_cash_parts(&model, &params, start, len)?;
        println!("{:>8}  {start:>5}  {len:>6}  {:>9.2}  {:>9.2}", i + 1, parts.carbon, parts.timber);
        start += len;
    }
    let lv = land_value_of_schedule(&model, &params, &schedule)?;
    println!("land value {:.2} USD/ha over {} rotations", lv.npv, lv.n_rotations_used);
    println!("value beyond the horizon is at most {:.3e} USD/ha", lv.truncation_bound);
    Ok(())
}
