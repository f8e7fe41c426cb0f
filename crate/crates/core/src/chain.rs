//! Truncated chain of first-order conditions.
//!
//! `n` chained conditions link rotations `1..=n+1`; the last length is fixed
//! to a terminal value and the first `n` are solved by damped Newton with a
//! finite-difference Jacobian. Starts come from the oracle, the stationary
//! constant-price rotation and the Faustmann age. Among converged roots the
//! one with the largest schedule NPV is kept.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RotationError};
use crate::foc::{evaluate_pair, faustmann_age, stationary_rotation_with, FocPair};
use crate::growth::GrowthModel;
use crate::oracle::{maximize_with, OracleConfig, OracleResult};
use crate::pricing::EconParams;
use crate::valuation::{RotationSchedule, Valuator};

/// Lower bound on any rotation length during the Newton iteration.
const MIN_LENGTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    /// Number of chained conditions; the schedule holds `n_equations + 1` rotations.
    pub n_equations: usize,
    /// Fixed length of the last rotation. `None` uses the stationary
    /// constant-price rotation at the initial carbon price.
    pub terminal_t: Option<f64>,
    /// First rotations longer than this are classified as no-harvest.
    pub t_cap: f64,
    /// Hard ceiling on every rotation length.
    pub t_search_max: f64,
    /// Newton step tolerance on rotation lengths, years.
    pub tol_t: f64,
    /// Tolerance on normalized residuals.
    pub tol_resid: f64,
    pub max_iterations: usize,
    pub oracle: OracleConfig,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            n_equations: 4,
            terminal_t: None,
            t_cap: 200.0,
            t_search_max: 400.0,
            tol_t: 1e-4,
            tol_resid: 1e-8,
            max_iterations: 100,
            oracle: OracleConfig::default(),
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_equations < 1 {
            return Err(RotationError::Config("n_equations must be >= 1".into()));
        }
        if !(self.tol_t > 0.0 && self.tol_resid > 0.0) {
            return Err(RotationError::Config("tolerances must be positive".into()));
        }
        if !(self.t_cap > 0.0 && self.t_cap <= self.t_search_max) {
            return Err(RotationError::Config("t_cap must lie in (0, t_search_max]".into()));
        }
        if let Some(t) = self.terminal_t {
            if !(t > 0.0 && t <= self.t_search_max) {
                return Err(RotationError::Config("terminal_t must lie in (0, t_search_max]".into()));
            }
        }
        self.oracle_config().validate()
    }

    /// Oracle settings with the search ceiling tied to `t_search_max`.
    pub fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            t_max: self.t_search_max,
            ..self.oracle
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Interior,
    NoHarvest,
    NoSolution,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Interior => "interior",
            Classification::NoHarvest => "no_harvest",
            Classification::NoSolution => "no_solution",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub label: String,
    pub converged: bool,
    pub iterations: usize,
    pub first_rotation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub starts: Vec<StartOutcome>,
    /// Starts tried after the first.
    pub restarts: usize,
    /// Equations actually solved (fewer than configured when a later
    /// rotation sits at the search ceiling).
    pub active_equations: usize,
    pub terminal_t: f64,
    pub oracle_t1: f64,
    pub oracle_npv: f64,
    pub oracle_boundary_contact: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schedule: Option<RotationSchedule>,
    pub classification: Classification,
    pub npv: f64,
    /// Normalized residual of each solved equation.
    pub residuals: Vec<f64>,
    pub oracle_agreement: bool,
    pub diagnostics: SolveDiagnostics,
}

impl SolveReport {
    pub fn first_rotation(&self) -> Option<f64> {
        self.schedule.as_ref().map(|s| s.first())
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

struct Chain<'a> {
    valuator: &'a Valuator,
    terminal: f64,
    upper: f64,
}

impl Chain<'_> {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(x.len());
        let mut start = 0.0;
        for k in 0..x.len() {
            let t_b = x.get(k + 1).copied().unwrap_or(self.terminal);
            let v = evaluate_pair(self.valuator, &FocPair { t_start: start, t_a: x[k], t_b })?;
            out.push((v.residual, v.scale + 1.0));
            start += x[k];
        }
        Ok(out)
    }

    fn normalized(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(x)?.into_iter().map(|(r, s)| r / s).collect())
    }

    fn lengths(&self, x: &[f64]) -> Vec<f64> {
        let mut l = x.to_vec();
        l.push(self.terminal);
        l
    }

    fn clamp(&self, t: f64) -> f64 {
        t.clamp(MIN_LENGTH, self.upper)
    }

    /// Damped Newton from `x0`; returns the final iterate, iteration count and convergence flag.
    fn newton(&self, x0: &[f64], config: &ChainConfig) -> Result<(Vec<f64>, usize, bool)> {
        let n = x0.len();
        let mut x: Vec<f64> = x0.iter().map(|&t| self.clamp(t)).collect();
        let mut last_step = f64::INFINITY;
        for iter in 0..config.max_iterations {
            let eval = self.evaluate(&x)?;
            let scales: Vec<f64> = eval.iter().map(|e| e.1).collect();
            let f: Vec<f64> = eval.iter().map(|e| e.0 / e.1).collect();
            let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if fmax <= config.tol_resid && (last_step <= config.tol_t || fmax <= 1e-3 * config.tol_resid) {
                return Ok((x, iter, true));
            }
            // Central-difference Jacobian of the row-scaled system.
            let mut jac = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let h = 1e-6 * x[j].max(1.0);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fp = self.evaluate(&xp)?;
                let fm = self.evaluate(&xm)?;
                for i in 0..n {
                    jac[(i, j)] = (fp[i].0 - fm[i].0) / (2.0 * h) / scales[i];
                }
            }
            let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
            let Some(step) = jac.lu().solve(&rhs) else {
                return Ok((x, iter, false));
            };
            let norm0: f64 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(&t, &d)| self.clamp(t + lambda * d)).collect();
                let ft = self.evaluate(&trial)?;
                let norm: f64 = ft.iter().zip(&scales).map(|(e, s)| (e.0 / s).powi(2)).sum::<f64>().sqrt();
                if norm.is_finite() && norm < (1.0 - 1e-4 * lambda) * norm0 {
                    accepted = Some(trial);
                    break;
                }
                lambda *= 0.5;
            }
            match accepted {
                Some(trial) => {
                    last_step = trial.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    x = trial;
                }
                None => {
                    return Ok((x, iter, fmax <= config.tol_resid));
                }
            }
        }
        let f = self.normalized(&x)?;
        let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok((x, config.max_iterations, fmax <= config.tol_resid))
    }
}

/// Reusable solver for one model and rate pair. Solving at several initial
/// carbon prices shares the integral tables.
#[derive(Debug, Clone)]
pub struct ChainSolver {
    valuator: Valuator,
    flat: Valuator,
    config: ChainConfig,
}

impl ChainSolver {
    pub fn new(model: &GrowthModel, params: &EconParams, config: &ChainConfig) -> Result<Self> {
        config.validate()?;
        let horizon = config.t_search_max + config.oracle.coarse_step;
        let valuator = Valuator::new(model, params, horizon)?;
        let flat = Valuator::new(model, &EconParams { rho: 0.0, ..*params }, horizon)?;
        Ok(Self {
            valuator,
            flat,
            config: *config,
        })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn params(&self) -> &EconParams {
        self.valuator.params()
    }

    pub fn model(&self) -> &GrowthModel {
        self.valuator.model()
    }

    /// Solves the scenario with the initial carbon price replaced by `p_c`.
    pub fn solve_at_price(&self, p_c: f64) -> Result<SolveReport> {
        let params = self.params().with_carbon_price(p_c);
        let solver = Self {
            valuator: self.valuator.with_params(&params)?,
            flat: self.flat.with_params(&EconParams { rho: 0.0, ..params })?,
            config: self.config,
        };
        solver.solve()
    }

    /// Same scenario with another terminal rotation length.
    pub fn with_terminal(&self, terminal_t: Option<f64>) -> Result<Self> {
        let config = ChainConfig { terminal_t, ..self.config };
        config.validate()?;
        Ok(Self { config, ..self.clone() })
    }

    fn default_terminal(&self) -> Result<f64> {
        let stationary = stationary_rotation_with(&self.flat, self.config.t_search_max)?;
        match stationary {
            Some(t) => Ok(t),
            None => faustmann_age(self.model(), self.params()),
        }
    }

    pub fn solve(&self) -> Result<SolveReport> {
        let config = &self.config;
        let n = config.n_equations;
        let oracle_config = config.oracle_config();
        let oracle: OracleResult = maximize_with(&self.valuator, n + 1, &oracle_config)?;
        let oracle_t1 = oracle.schedule.first();
        let mut diagnostics = SolveDiagnostics {
            starts: Vec::new(),
            restarts: 0,
            active_equations: n,
            terminal_t: 0.0,
            oracle_t1,
            oracle_npv: oracle.npv,
            oracle_boundary_contact: oracle.boundary_contact,
            note: None,
        };

        // A later rotation at the ceiling means it is never harvested within the
        // search range; the chain stops there with that rotation as terminal.
        let near_ceiling = config.t_search_max - oracle_config.coarse_step;
        let ceiling_at = oracle.schedule.lengths[1..]
            .iter()
            .position(|&t| t >= near_ceiling)
            .map(|i| i + 1);
        let (m, terminal) = match ceiling_at {
            Some(k) if k <= n => {
                diagnostics.note = Some(format!("rotation {} at search ceiling; chain truncated", k + 1));
                (k, config.t_search_max)
            }
            _ => (n, config.terminal_t.map_or_else(|| self.default_terminal(), Ok)?),
        };
        diagnostics.active_equations = m;
        diagnostics.terminal_t = terminal;

        if oracle_t1 > config.t_cap {
            let chain = Chain {
                valuator: &self.valuator,
                terminal,
                upper: config.t_search_max,
            };
            let residuals = chain.normalized(&oracle.schedule.lengths[..m])?;
            return Ok(SolveReport {
                schedule: Some(oracle.schedule.clone()),
                classification: Classification::NoHarvest,
                npv: oracle.npv,
                residuals,
                oracle_agreement: true,
                diagnostics,
            });
        }

        let stationary = stationary_rotation_with(&self.flat, config.t_search_max)?;
        let faustmann = faustmann_age(self.model(), self.params())?;
        let mut m = m;
        let mut terminal = terminal;
        let mut carried: Option<Vec<f64>> = None;
        let (chain, best) = loop {
            let chain = Chain {
                valuator: &self.valuator,
                terminal,
                upper: config.t_search_max,
            };
            let mut starts: Vec<(String, Vec<f64>)> = vec![("oracle".into(), oracle.schedule.lengths[..m].to_vec())];
            if let Some(x) = carried.take() {
                starts.push(("truncated".into(), x));
            }
            if let Some(t) = stationary {
                starts.push(("stationary".into(), vec![t; m]));
            }
            starts.push(("faustmann".into(), vec![faustmann; m]));

            let mut roots: Vec<(Vec<f64>, f64)> = Vec::new();
            let mut pinned: Option<(usize, Vec<f64>)> = None;
            for (label, x0) in &starts {
                let (x, iterations, converged) = chain.newton(x0, config)?;
                diagnostics.starts.push(StartOutcome {
                    label: label.clone(),
                    converged,
                    iterations,
                    first_rotation: x[0],
                });
                if !converged {
                    if pinned.is_none() {
                        if let Some(k) = x.iter().skip(1).position(|&t| t >= config.t_search_max - 1e-6) {
                            pinned = Some((k + 1, x[..k + 1].to_vec()));
                        }
                    }
                    continue;
                }
                if roots.iter().any(|(r, _)| r.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-4)) {
                    continue;
                }
                let npv = self.valuator.npv(&chain.lengths(&x), 0.0)?;
                roots.push((x, npv));
            }
            let best = roots
                .into_iter()
                .filter(|(_, npv)| *npv > 0.0)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match (best, pinned) {
                (Some(root), _) => break (chain, Some(root)),
                // A later rotation is pushed to the ceiling: no root exists
                // below it, so the chain stops there as in the oracle case.
                (None, Some((k, x))) => {
                    diagnostics.note = Some(format!("rotation {} pushed to search ceiling; chain truncated", k + 1));
                    m = k;
                    terminal = config.t_search_max;
                    diagnostics.active_equations = m;
                    diagnostics.terminal_t = terminal;
                    carried = Some(x);
                }
                (None, None) => break (chain, None),
            }
        };
        diagnostics.restarts = diagnostics.starts.len().saturating_sub(1);

        let Some((x, npv)) = best else {
            diagnostics.note = Some("no converged root with positive NPV".into());
            return Ok(SolveReport {
                schedule: None,
                classification: Classification::NoSolution,
                npv: 0.0,
                residuals: Vec::new(),
                oracle_agreement: false,
                diagnostics,
            });
        };
        let residuals = chain.normalized(&x)?;
        let t1 = x[0];
        let classification = if t1 <= config.t_cap {
            Classification::Interior
        } else {
            Classification::NoHarvest
        };
        let oracle_agreement = (t1 - oracle_t1).abs() <= oracle.resolution.max(0.5);
        Ok(SolveReport {
            schedule: Some(RotationSchedule::new(chain.lengths(&x), 0.0)?),
            classification,
            npv,
            residuals,
            oracle_agreement,
            diagnostics,
        })
    }
}

/// Solves the truncated chain for one scenario.
pub fn solve_chain(model: &GrowthModel, params: &EconParams, config: &ChainConfig) -> Result<SolveReport> {
    ChainSolver::new(model, params, config)?.solve()
}

/// Largest change of the first rotation when the terminal length is replaced
/// by each of `terminal_values`.
pub fn terminal_sensitivity(
    model: &GrowthModel,
    params: &EconParams,
    config: &ChainConfig,
    terminal_values: &[f64],
) -> Result<f64> {
    let solver = ChainSolver::new(model, params, config)?;
    let interior_t1 = |report: &SolveReport| -> Result<f64> {
        match (report.classification, report.first_rotation()) {
            (Classification::Interior, Some(t)) => Ok(t),
            (c, _) => Err(RotationError::Numeric(format!("terminal sensitivity needs interior solutions, got {c}"))),
        }
    };
    let base = interior_t1(&solver.solve()?)?;
    let mut worst = 0.0f64;
    for &t in terminal_values {
        let t1 = interior_t1(&solver.with_terminal(Some(t))?.solve()?)?;
        worst = worst.max((t1 - base).abs());
    }
    Ok(worst)
}
