//! Stem volume, growth rate and the characteristic ages of the built-in
//! growth curves.

use forest_rotation::{faustmann_age, EconParams, GrowthModel};

fn main() -> forest_rotation::Result<()> {
    for m in [GrowthModel::coastal(), GrowthModel::boreal()] {
        println!("{} (k={}, a={}, b={}, carbon per m3 {})", m.name, m.k, m.a, m.b, m.alpha);
        println!("  age   volume   growth");
        for t in [20.0, 40.0, 60.0, 80.0, 100.0, 150.0, 200.0, 300.0] {
            println!("  {t:>3}  {:>7.2}  {:>7.3}", m.stem_volume(t)?, m.stem_volume_rate(t)?);
        }
        println!("  fastest growth  {:.2} y", m.max_growth_rate_age());
        println!("  max mean growth {:.2} y", m.msy_age());
        println!("  peak volume     {:.2} y", m.peak_volume_age());
        println!("  Faustmann age   {:.2} y at r=5%", faustmann_age(&m, &EconParams::default())?);
    }
    Ok(())
}
