//! Direct maximization of the schedule NPV by coordinate search, compared
//! with the chain solver, plus the no-harvest profile for one scenario.

use forest_rotation::chain::{solve_chain, ChainConfig};
use forest_rotation::oracle::{detect_no_harvest, maximize_schedule, OracleConfig};
use forest_rotation::validate::{default_sample, oracle_agreement};
use forest_rotation::{EconParams, GrowthModel};

fn main() -> forest_rotation::Result<()> {
    let model = GrowthModel::coastal();
    let params = EconParams { p_c: 50.0, rho: 0.01, beta: 1.0, ..Default::default() };
    let oracle = maximize_schedule(&model, &params, 5, &OracleConfig::default())?;
    let chain = solve_chain(&model, &params, &ChainConfig::default())?;
    let show = |l: &[f64]| l.iter().map(|t| format!("{t:7.3}")).collect::<Vec<_>>().join(" ");
    println!("oracle  {}  npv {:.4} ({} cycles)", show(&oracle.schedule.lengths), oracle.npv, oracle.cycles);
    if let Some(s) = &chain.schedule {
        println!("chain   {}  npv {:.4} (last rotation fixed)", show(&s.lengths), chain.npv);
    }

    let high = EconParams { p_c: 150.0, rho: 0.03, ..Default::default() };
    let evidence = detect_no_harvest(&GrowthModel::boreal(), &high, 5, 200.0, &OracleConfig::default())?;
    println!("\nboreal, released carbon, pc=150, rho=3%: no harvest before 200 y = {}", evidence.no_harvest);
    for (t, v) in evidence.profile.iter().filter(|(t, _)| (*t as usize).is_multiple_of(50)) {
        println!("  first rotation {t:>5}: best npv {v:.2}");
    }

    println!();
    println!("{}", oracle_agreement(&default_sample(), &ChainConfig::default())?);
    Ok(())
}
