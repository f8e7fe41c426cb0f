//! Age of the stands currently at the end of their optimal rotation.
//!
//! A stand of age `τ` planted `τ` years ago faced the carbon price
//! `p_c·e^(−ρτ)` at planting. It is due now when its optimal first rotation
//! at that price equals `τ`.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainConfig, ChainSolver, Classification};
use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::pricing::EconParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurrentAgeConfig {
    /// Spacing of the initial scan over ages, years.
    pub scan_step: f64,
    /// Bracket width at which bisection stops, years.
    pub tol_tau: f64,
    /// Largest `|T₁* − τ|` accepted at a fixed point, years.
    pub tol_fixed_point: f64,
}

impl Default for CurrentAgeConfig {
    fn default() -> Self {
        Self {
            scan_step: 1.0,
            tol_tau: 0.01,
            tol_fixed_point: 0.05,
        }
    }
}

impl CurrentAgeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scan_step > 0.0 && self.tol_tau > 0.0 && self.tol_fixed_point > 0.0) {
            return Err(RotationError::Config("current-age steps and tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeStatus {
    Found,
    NoneExists,
}

impl AgeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AgeStatus::Found => "found",
            AgeStatus::NoneExists => "none_exists",
        }
    }
}

/// One evaluation of the optimal first rotation at a deflated price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub tau: f64,
    /// Carbon price at planting, `p_c·e^(−ρτ)`.
    pub planting_price: f64,
    pub first_rotation: Option<f64>,
    pub classification: Classification,
}

impl TracePoint {
    /// `T₁* − τ`; no-harvest counts as `+∞`, a missing solution as NaN.
    pub fn gap(&self) -> f64 {
        match (self.classification, self.first_rotation) {
            (Classification::NoHarvest, _) => f64::INFINITY,
            (Classification::Interior, Some(t)) => t - self.tau,
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentAgeResult {
    pub tau: Option<f64>,
    pub status: AgeStatus,
    /// Scan points followed by bisection points, in evaluation order.
    pub bracket_trace: Vec<TracePoint>,
    /// Every accepted fixed point, ascending.
    pub fixed_points: Vec<f64>,
    /// Brackets whose sign change is a jump in the optimal rotation rather
    /// than a crossing.
    pub jumps: Vec<(f64, f64)>,
}

/// Memoized first-rotation solves keyed by the planting price.
struct Deflated<'a> {
    solver: &'a ChainSolver,
    cache: Mutex<HashMap<u64, (Option<f64>, Classification)>>,
}

impl Deflated<'_> {
    fn planting_price(&self, tau: f64) -> f64 {
        let p = self.solver.params();
        p.p_c * (-p.rho * tau).exp()
    }

    fn eval(&self, tau: f64) -> Result<TracePoint> {
        let price = self.planting_price(tau);
        let key = price.to_bits();
        let cached = self.cache.lock().expect("cache lock").get(&key).copied();
        let (first_rotation, classification) = match cached {
            Some(v) => v,
            None => {
                let report = self.solver.solve_at_price(price)?;
                let v = (report.first_rotation(), report.classification);
                self.cache.lock().expect("cache lock").insert(key, v);
                v
            }
        };
        Ok(TracePoint {
            tau,
            planting_price: price,
            first_rotation,
            classification,
        })
    }
}

/// Scans ages in `[0, t_cap]` for sign changes of `T₁*(p_c·e^(−ρτ)) − τ`
/// and bisects each bracket.
pub fn current_harvest_age_with(solver: &ChainSolver, config: &CurrentAgeConfig) -> Result<CurrentAgeResult> {
    config.validate()?;
    let t_cap = solver.config().t_cap;
    let deflated = Deflated {
        solver,
        cache: Mutex::new(HashMap::new()),
    };
    let count = (t_cap / config.scan_step).floor() as usize;
    let mut taus: Vec<f64> = (0..=count).map(|i| i as f64 * config.scan_step).collect();
    if taus.last().is_some_and(|&t| t < t_cap - 1e-9) {
        taus.push(t_cap);
    }
    // Constant planting price needs a single solve.
    let constant = solver.params().p_c == 0.0 || solver.params().rho == 0.0;
    if constant {
        deflated.eval(0.0)?;
    }
    let scan: Vec<TracePoint> = taus.par_iter().map(|&t| deflated.eval(t)).collect::<Result<_>>()?;

    let mut trace = scan.clone();
    let mut fixed_points = Vec::new();
    let mut jumps = Vec::new();
    for w in scan.windows(2) {
        let (ga, gb) = (w[0].gap(), w[1].gap());
        if ga == 0.0 {
            fixed_points.push(w[0].tau);
            continue;
        }
        if ga.is_nan() || gb.is_nan() || gb == 0.0 || ga.signum() == gb.signum() {
            continue;
        }
        let (mut lo, mut hi) = (w[0].tau, w[1].tau);
        let lo_sign = ga.signum();
        let mut broken = false;
        while hi - lo > config.tol_tau {
            let mid = 0.5 * (lo + hi);
            let p = deflated.eval(mid)?;
            trace.push(p);
            let g = p.gap();
            if g.is_nan() {
                broken = true;
                break;
            }
            if g == 0.0 {
                lo = mid;
                hi = mid;
            } else if g.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if broken {
            jumps.push((lo, hi));
            continue;
        }
        let tau = 0.5 * (lo + hi);
        let p = deflated.eval(tau)?;
        trace.push(p);
        if p.gap().abs() <= config.tol_fixed_point {
            fixed_points.push(tau);
        } else {
            jumps.push((lo, hi));
        }
    }
    if let Some(last) = scan.last() {
        if last.gap() == 0.0 {
            fixed_points.push(last.tau);
        }
    }
    fixed_points.sort_by(f64::total_cmp);
    fixed_points.dedup_by(|a, b| (*a - *b).abs() <= config.tol_tau);
    let tau = fixed_points.first().copied();
    Ok(CurrentAgeResult {
        tau,
        status: if tau.is_some() { AgeStatus::Found } else { AgeStatus::NoneExists },
        bracket_trace: trace,
        fixed_points,
        jumps,
    })
}

/// Currently optimal harvest age with the default scan settings.
pub fn current_harvest_age(model: &GrowthModel, params: &EconParams, chain_config: &ChainConfig) -> Result<CurrentAgeResult> {
    let solver = ChainSolver::new(model, params, chain_config)?;
    current_harvest_age_with(&solver, &CurrentAgeConfig::default())
}
