//! Parameter sweeps over the initial carbon price and its growth rate.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainConfig, ChainSolver, Classification, SolveReport};
use crate::current_age::{current_harvest_age_with, AgeStatus, CurrentAgeConfig};
use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::pricing::EconParams;

pub const CSV_HEADER: [&str; 9] = [
    "model",
    "beta",
    "rho",
    "pc",
    "quantity",
    "value",
    "classification",
    "residual_max",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    FirstRotation,
    LandValue,
    CurrentAge,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::FirstRotation => "first_rotation",
            Quantity::LandValue => "land_value",
            Quantity::CurrentAge => "current_age",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = RotationError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first_rotation" => Ok(Quantity::FirstRotation),
            "land_value" => Ok(Quantity::LandValue),
            "current_age" => Ok(Quantity::CurrentAge),
            other => Err(RotationError::Config(format!("unknown quantity {other:?}"))),
        }
    }
}

fn parse_classification(s: &str) -> Result<Classification> {
    match s {
        "interior" => Ok(Classification::Interior),
        "no_harvest" => Ok(Classification::NoHarvest),
        "no_solution" => Ok(Classification::NoSolution),
        other => Err(RotationError::Config(format!("unknown classification {other:?}"))),
    }
}

/// `count` evenly spaced values `i·step_num/denom`, exact at every decimal
/// the step can represent.
fn axis(count: usize, step_num: f64, denom: f64) -> Vec<f64> {
    (0..count).map(|i| i as f64 * step_num / denom).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepGrid {
    pub pc_axis: Vec<f64>,
    pub rho_axis: Vec<f64>,
    pub betas: Vec<f64>,
    pub models: Vec<String>,
    pub quantity: Quantity,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            pc_axis: axis(31, 5.0, 1.0),
            rho_axis: axis(16, 2.0, 1000.0),
            betas: vec![0.0, 1.0],
            models: vec!["coastal".into(), "boreal".into()],
            quantity: Quantity::FirstRotation,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self, econ: &EconParams) -> Result<()> {
        let increasing = |name: &str, xs: &[f64]| -> Result<()> {
            if xs.is_empty() {
                return Err(RotationError::Config(format!("{name} must not be empty")));
            }
            if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(RotationError::Config(format!("{name} must be finite and strictly increasing")));
            }
            Ok(())
        };
        increasing("pc_axis", &self.pc_axis)?;
        increasing("rho_axis", &self.rho_axis)?;
        increasing("betas", &self.betas)?;
        if self.pc_axis[0] < 0.0 || self.rho_axis[0] < 0.0 {
            return Err(RotationError::Config("carbon prices and growth rates must be nonnegative".into()));
        }
        if self.rho_axis.iter().any(|&rho| rho >= econ.r) {
            return Err(RotationError::Config(format!("every rho must be below the discount rate {}", econ.r)));
        }
        if self.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(RotationError::Config("betas must lie in [0, 1]".into()));
        }
        if self.models.is_empty() {
            return Err(RotationError::Config("models must not be empty".into()));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.models.len() * self.betas.len() * self.rho_axis.len() * self.pc_axis.len()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Fill the `runtime_ms` column. Off by default so reruns are byte-identical.
    pub timing: bool,
    /// Model definitions looked up by name before the built-in ones.
    pub custom_models: Vec<GrowthModel>,
    pub current_age: CurrentAgeConfig,
}

impl SweepOptions {
    fn resolve(&self, name: &str) -> Result<GrowthModel> {
        match self.custom_models.iter().find(|m| m.name == name) {
            Some(m) => Ok(m.clone()),
            None => GrowthModel::builtin(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub model: String,
    pub beta: f64,
    pub rho: f64,
    pub pc: f64,
    pub quantity: Quantity,
    pub value: Option<f64>,
    pub classification: Classification,
    pub residual_max: Option<f64>,
    pub runtime_ms: Option<f64>,
    /// Failure message for cells that errored; not written to the CSV.
    #[serde(skip)]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cells: usize,
    pub counts: BTreeMap<String, usize>,
    /// `(model, beta, rho, pc, message)` for cells whose solve failed.
    pub failures: Vec<(String, f64, f64, f64, String)>,
}

impl SweepSummary {
    pub fn from_cells(cells: &[SweepCell]) -> Self {
        let mut counts = BTreeMap::new();
        for c in [Classification::Interior, Classification::NoHarvest, Classification::NoSolution] {
            counts.insert(c.to_string(), 0);
        }
        let mut failures = Vec::new();
        for cell in cells {
            *counts.entry(cell.classification.to_string()).or_insert(0) += 1;
            if let Some(msg) = &cell.diagnostic {
                failures.push((cell.model.clone(), cell.beta, cell.rho, cell.pc, msg.clone()));
            }
        }
        Self {
            cells: cells.len(),
            counts,
            failures,
        }
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cells:", self.cells)?;
        for (k, v) in &self.counts {
            write!(f, " {k}={v}")?;
        }
        for (model, beta, rho, pc, msg) in &self.failures {
            write!(f, "\n  failed {model} beta={beta} rho={rho} pc={pc}: {msg}")?;
        }
        Ok(())
    }
}

fn cell_from_report(quantity: Quantity, report: &SolveReport) -> (Option<f64>, Classification, Option<f64>) {
    let value = match (report.classification, quantity) {
        (Classification::NoSolution, _) => None,
        (_, Quantity::LandValue) => Some(report.npv),
        _ => report.first_rotation(),
    };
    let residual = (report.classification != Classification::NoSolution).then(|| report.max_residual());
    (value, report.classification, residual)
}

fn evaluate_cell(solver: &ChainSolver, pc: f64, quantity: Quantity, options: &SweepOptions) -> Result<(Option<f64>, Classification, Option<f64>)> {
    match quantity {
        Quantity::FirstRotation | Quantity::LandValue => Ok(cell_from_report(quantity, &solver.solve_at_price(pc)?)),
        Quantity::CurrentAge => {
            let params = solver.params().with_carbon_price(pc);
            let scoped = ChainSolver::new(solver.model(), &params, solver.config())?;
            let age = current_harvest_age_with(&scoped, &options.current_age)?;
            match (age.status, age.tau) {
                (AgeStatus::Found, Some(tau)) => {
                    let residual = age
                        .bracket_trace
                        .iter()
                        .rev()
                        .find(|p| (p.tau - tau).abs() < 1e-12)
                        .map(|p| p.gap().abs());
                    Ok((Some(tau), Classification::Interior, residual))
                }
                _ => {
                    let at_zero = age.bracket_trace.first().map(|p| p.classification);
                    let class = if at_zero == Some(Classification::NoHarvest) {
                        Classification::NoHarvest
                    } else {
                        Classification::NoSolution
                    };
                    Ok((None, class, None))
                }
            }
        }
    }
}

/// Evaluates every cell of the grid. The result is sorted by
/// `(model, beta, rho, pc)` and does not depend on the worker count.
pub fn compute_sweep(grid: &SweepGrid, econ: &EconParams, chain: &ChainConfig, options: &SweepOptions) -> Result<Vec<SweepCell>> {
    grid.validate(econ)?;
    chain.validate()?;
    let mut groups = Vec::new();
    for name in &grid.models {
        let model = options.resolve(name)?;
        for &beta in &grid.betas {
            for &rho in &grid.rho_axis {
                groups.push((name.clone(), model.clone(), beta, rho));
            }
        }
    }
    let work = || -> Vec<SweepCell> {
        let solvers: Vec<Result<ChainSolver>> = groups
            .par_iter()
            .map(|(_, model, beta, rho)| {
                let params = EconParams { beta: *beta, rho: *rho, ..*econ };
                ChainSolver::new(model, &params, chain)
            })
            .collect();
        let tasks: Vec<(usize, f64)> = (0..groups.len())
            .flat_map(|g| grid.pc_axis.iter().map(move |&pc| (g, pc)))
            .collect();
        tasks
            .par_iter()
            .map(|&(g, pc)| {
                let (name, _, beta, rho) = &groups[g];
                let started = Instant::now();
                let outcome = match &solvers[g] {
                    Ok(solver) => evaluate_cell(solver, pc, grid.quantity, options),
                    Err(e) => Err(RotationError::Config(e.to_string())),
                };
                let elapsed = started.elapsed().as_secs_f64() * 1e3;
                let (value, classification, residual_max, diagnostic) = match outcome {
                    Ok((v, c, r)) => (v, c, r, None),
                    Err(e) => (None, Classification::NoSolution, None, Some(e.to_string())),
                };
                SweepCell {
                    model: name.clone(),
                    beta: *beta,
                    rho: *rho,
                    pc,
                    quantity: grid.quantity,
                    value,
                    classification,
                    residual_max,
                    runtime_ms: options.timing.then_some(elapsed),
                    diagnostic,
                }
            })
            .collect()
    };
    let mut cells = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| RotationError::Config(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    cells.sort_by(|a, b| {
        a.model
            .cmp(&b.model)
            .then(a.beta.total_cmp(&b.beta))
            .then(a.rho.total_cmp(&b.rho))
            .then(a.pc.total_cmp(&b.pc))
    });
    Ok(cells)
}

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_cells<W: io::Write>(cells: &[SweepCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for c in cells {
        w.write_record([
            c.model.clone(),
            format_number(c.beta),
            format_number(c.rho),
            format_number(c.pc),
            c.quantity.to_string(),
            fmt_opt(c.value),
            c.classification.to_string(),
            fmt_opt(c.residual_max),
            fmt_opt(c.runtime_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cells<R: io::Read>(input: R) -> Result<Vec<SweepCell>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(RotationError::Config(format!("unexpected sweep header {header:?}")));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| RotationError::Config(format!("bad number {s:?} in sweep CSV")))
    };
    let opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s).map(Some)
        }
    };
    let mut cells = Vec::new();
    for record in reader.records() {
        let r = record?;
        cells.push(SweepCell {
            model: r[0].to_owned(),
            beta: num(&r[1])?,
            rho: num(&r[2])?,
            pc: num(&r[3])?,
            quantity: r[4].parse()?,
            value: opt(&r[5])?,
            classification: parse_classification(&r[6])?,
            residual_max: opt(&r[7])?,
            runtime_ms: opt(&r[8])?,
            diagnostic: None,
        });
    }
    Ok(cells)
}

/// Runs the sweep and writes the CSV to `output_path`.
pub fn run_sweep(
    grid: &SweepGrid,
    econ: &EconParams,
    chain: &ChainConfig,
    output_path: &Path,
    options: &SweepOptions,
) -> Result<SweepSummary> {
    let cells = compute_sweep(grid, econ, chain, options)?;
    let file = std::fs::File::create(output_path)?;
    write_cells(&cells, io::BufWriter::new(file))?;
    Ok(SweepSummary::from_cells(&cells))
}
