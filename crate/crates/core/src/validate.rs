//! Built-in agreement check between the chain solver and the oracle.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainConfig, ChainSolver, Classification};
use crate::error::Result;
use crate::growth::GrowthModel;
use crate::pricing::EconParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub model: String,
    pub beta: f64,
    pub rho: f64,
    pub pc: f64,
    pub classification: Classification,
    pub chain_t1: Option<f64>,
    pub oracle_t1: f64,
    /// Chain NPV minus oracle NPV.
    pub npv_excess: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model    beta  rho    pc     class        chain_T1   oracle_T1  npv_excess  ok")?;
        for r in &self.rows {
            let t1 = r.chain_t1.map_or("-".to_string(), |t| format!("{t:.3}"));
            writeln!(
                f,
                "{:<8} {:<5} {:<6} {:<6} {:<12} {:<10} {:<10.3} {:<11.2e} {}",
                r.model,
                r.beta,
                r.rho,
                r.pc,
                r.classification,
                t1,
                r.oracle_t1,
                r.npv_excess,
                if r.passed { "yes" } else { "NO" }
            )?;
        }
        let failed = self.rows.iter().filter(|r| !r.passed).count();
        write!(f, "{} scenarios, {} failed", self.rows.len(), failed)
    }
}

/// Default sample: both built-in models, both permanence extremes, three
/// growth rates and three initial carbon prices.
pub fn default_sample() -> Vec<(GrowthModel, EconParams)> {
    let mut out = Vec::new();
    for model in [GrowthModel::coastal(), GrowthModel::boreal()] {
        for beta in [0.0, 1.0] {
            for rho in [0.0, 0.01, 0.03] {
                for p_c in [0.0, 50.0, 150.0] {
                    out.push((model.clone(), EconParams { p_c, rho, beta, ..Default::default() }));
                }
            }
        }
    }
    out
}

/// Solves every scenario and checks interior first rotations against the
/// oracle and the chain NPV against the oracle NPV.
pub fn oracle_agreement(sample: &[(GrowthModel, EconParams)], config: &ChainConfig) -> Result<AgreementReport> {
    let tolerance = config.oracle_config().resolution().max(0.5);
    let rows = sample
        .par_iter()
        .map(|(model, params)| {
            let report = ChainSolver::new(model, params, config)?.solve()?;
            let d = &report.diagnostics;
            let npv_excess = report.npv - d.oracle_npv;
            let passed = match report.classification {
                Classification::Interior => {
                    let t1 = report.first_rotation().unwrap_or(f64::NAN);
                    (t1 - d.oracle_t1).abs() <= tolerance && npv_excess <= 1e-8 * d.oracle_npv.abs().max(1.0)
                }
                Classification::NoHarvest => d.oracle_t1 > config.t_cap,
                Classification::NoSolution => d.oracle_npv <= 0.0 || d.oracle_t1 > config.t_cap,
            };
            Ok(AgreementRow {
                model: model.name.clone(),
                beta: params.beta,
                rho: params.rho,
                pc: params.p_c,
                classification: report.classification,
                chain_t1: report.first_rotation(),
                oracle_t1: d.oracle_t1,
                npv_excess,
                passed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AgreementReport { rows })
}
