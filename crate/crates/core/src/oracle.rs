//! Direct maximization of the truncated NPV by derivative-free cyclic
//! coordinate search.
//!
//! This module never touches the first-order conditions; it only evaluates
//! the objective. It serves as ground truth for the chain solver and as the
//! global-optimality and no-harvest detector.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::pricing::EconParams;
use crate::valuation::{RotationSchedule, Valuator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Grid step of the exhaustive scan, years.
    pub coarse_step: f64,
    /// Step shrink factor per refinement pass.
    pub refine_factor: f64,
    /// Number of refinement passes after the coarse scan.
    pub passes: u32,
    /// Search ceiling for every rotation, years.
    pub t_max: f64,
    /// Origin of the coarse grid, in `[0, coarse_step)`.
    pub grid_offset: f64,
    /// Cycle cap per pass.
    pub max_cycles: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            coarse_step: 1.0,
            refine_factor: 10.0,
            passes: 3,
            t_max: 400.0,
            grid_offset: 0.0,
            max_cycles: 200,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.coarse_step > 0.0 && self.coarse_step.is_finite()) {
            return Err(RotationError::Config("oracle coarse_step must be positive".into()));
        }
        if self.passes < 1 {
            return Err(RotationError::Config("oracle needs at least one refinement pass".into()));
        }
        if self.refine_factor.is_nan() || self.refine_factor < 2.0 {
            return Err(RotationError::Config("oracle refine_factor must be >= 2".into()));
        }
        if self.t_max.is_nan() || self.t_max <= self.coarse_step {
            return Err(RotationError::Config("oracle t_max must exceed coarse_step".into()));
        }
        if !(0.0..self.coarse_step).contains(&self.grid_offset) {
            return Err(RotationError::Config("oracle grid_offset must lie in [0, coarse_step)".into()));
        }
        Ok(())
    }

    /// Grid resolution after the last refinement pass.
    pub fn resolution(&self) -> f64 {
        self.coarse_step / self.refine_factor.powi(self.passes as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub schedule: RotationSchedule,
    pub npv: f64,
    /// Some rotation sits within one resolution step of `t_max`.
    pub boundary_contact: bool,
    pub resolution: f64,
    pub cycles: usize,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    length: f64,
    integral: f64,
}

struct Search<'a> {
    valuator: &'a Valuator,
    config: OracleConfig,
    grid: Vec<Point>,
}

impl<'a> Search<'a> {
    fn new(valuator: &'a Valuator, config: OracleConfig) -> Result<Self> {
        config.validate()?;
        let mut grid = Vec::new();
        let mut i = 0usize;
        loop {
            let t = config.grid_offset + config.coarse_step * i as f64;
            if t > config.t_max + 1e-9 {
                break;
            }
            if t > 0.0 {
                grid.push(Point {
                    length: t,
                    integral: valuator.integral(t)?,
                });
            }
            i += 1;
        }
        Ok(Self { valuator, config, grid })
    }

    fn point(&self, t: f64) -> Result<Point> {
        Ok(Point {
            length: t,
            integral: self.valuator.integral(t)?,
        })
    }

    fn npv(&self, points: &[Point]) -> f64 {
        let mut start = 0.0;
        let mut total = 0.0;
        for p in points {
            total += self.valuator.cash_from_integral(start, p.length, p.integral);
            start += p.length;
        }
        total
    }

    fn best_equal(&self, n: usize) -> Vec<Point> {
        let mut best = (self.grid[0], f64::NEG_INFINITY);
        for &p in &self.grid {
            let value = self.npv(&vec![p; n]);
            if value > best.1 {
                best = (p, value);
            }
        }
        vec![best.0; n]
    }

    /// Scans coordinate `k` over `candidates`, returning the best point (smallest length on ties).
    fn scan<I: Iterator<Item = Result<Point>>>(&self, x: &mut [Point], k: usize, candidates: I) -> Result<(Point, f64)> {
        let mut best: Option<(Point, f64)> = None;
        for cand in candidates {
            let cand = cand?;
            x[k] = cand;
            let value = self.npv(x);
            let better = match best {
                None => true,
                Some((bp, bv)) => value > bv || (value == bv && cand.length < bp.length),
            };
            if better {
                best = Some((cand, value));
            }
        }
        let best = best.expect("candidate set is never empty");
        x[k] = best.0;
        Ok(best)
    }

    /// Cyclic coordinate ascent over the coordinates `from..x.len()`.
    fn ascend(&self, x: &mut [Point], from: usize, coarse_only: bool) -> Result<usize> {
        let mut cycles = 0;
        // Coarse exhaustive scans.
        loop {
            cycles += 1;
            let mut changed = false;
            for k in from..x.len() {
                let before = x[k].length;
                let grid = self.grid.iter().copied().map(Ok);
                let (p, _) = self.scan(x, k, grid)?;
                changed |= p.length != before;
            }
            if !changed || cycles >= self.config.max_cycles {
                break;
            }
        }
        if coarse_only {
            return Ok(cycles);
        }
        let factor = self.config.refine_factor;
        let half_width = factor.round() as i64;
        let mut step = self.config.coarse_step;
        for _ in 0..self.config.passes {
            step /= factor;
            let mut pass_cycles = 0;
            loop {
                pass_cycles += 1;
                let mut changed = false;
                for k in from..x.len() {
                    let centre = x[k].length;
                    let candidates = (-half_width..=half_width)
                        .map(|j| centre + j as f64 * step)
                        .filter(|&t| t > 0.0 && t <= self.config.t_max + 1e-9)
                        .map(|t| if t == centre { Ok(x[k]) } else { self.point(t) });
                    let candidates: Vec<Result<Point>> = candidates.collect();
                    let (p, _) = self.scan(x, k, candidates.into_iter())?;
                    changed |= (p.length - centre).abs() >= 0.5 * step;
                }
                if !changed || pass_cycles >= self.config.max_cycles {
                    break;
                }
            }
            cycles += pass_cycles;
        }
        Ok(cycles)
    }
}

pub(crate) fn maximize_with(valuator: &Valuator, n_rotations: usize, config: &OracleConfig) -> Result<OracleResult> {
    if n_rotations == 0 {
        return Err(RotationError::Config("oracle needs at least one rotation".into()));
    }
    let search = Search::new(valuator, *config)?;
    let mut x = search.best_equal(n_rotations);
    let cycles = search.ascend(&mut x, 0, false)?;
    let npv = search.npv(&x);
    let resolution = config.resolution();
    let lengths: Vec<f64> = x.iter().map(|p| p.length).collect();
    let boundary_contact = lengths.iter().any(|&t| t >= config.t_max - resolution);
    Ok(OracleResult {
        schedule: RotationSchedule::new(lengths, 0.0)?,
        npv,
        boundary_contact,
        resolution,
        cycles,
    })
}

/// Best `n_rotations`-rotation schedule from bare land at time zero.
pub fn maximize_schedule(model: &GrowthModel, params: &EconParams, n_rotations: usize, config: &OracleConfig) -> Result<OracleResult> {
    let valuator = Valuator::new(model, params, config.t_max + config.coarse_step)?;
    maximize_with(&valuator, n_rotations, config)
}

/// Profile of the objective over the first rotation length, with the
/// remaining rotations re-optimized on the coarse grid for every value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoHarvestEvidence {
    pub no_harvest: bool,
    /// Profile never decreases up to the cap (within a relative slack of 1e-9).
    pub monotone: bool,
    /// Some first rotation beyond the cap beats every candidate up to the cap.
    pub boundary_dominant: bool,
    /// `(first rotation length, best NPV)` pairs over the whole search range.
    pub profile: Vec<(f64, f64)>,
}

pub(crate) fn no_harvest_with(valuator: &Valuator, n_rotations: usize, t_cap: f64, config: &OracleConfig) -> Result<NoHarvestEvidence> {
    let search = Search::new(valuator, *config)?;
    let mut x = search.best_equal(n_rotations.max(1));
    let mut profile = Vec::new();
    for &first in &search.grid {
        x[0] = first;
        if x.len() > 1 {
            search.ascend(&mut x, 1, true)?;
        }
        profile.push((first.length, search.npv(&x)));
    }
    let scale = profile.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let slack = 1e-9 * scale;
    let split = profile.partition_point(|&(t, _)| t <= t_cap + 1e-9);
    let (inside, beyond) = profile.split_at(split);
    let monotone = inside.windows(2).all(|w| w[1].1 >= w[0].1 - slack);
    let best_inside = inside.iter().fold(f64::NEG_INFINITY, |m, &(_, v)| m.max(v));
    let best_beyond = beyond.iter().fold(f64::NEG_INFINITY, |m, &(_, v)| m.max(v));
    let boundary_dominant = best_beyond > best_inside + slack;
    Ok(NoHarvestEvidence {
        no_harvest: boundary_dominant,
        monotone,
        boundary_dominant,
        profile,
    })
}

/// True when harvesting is deferred past `t_cap` in the optimum.
pub fn detect_no_harvest(
    model: &GrowthModel,
    params: &EconParams,
    n_rotations: usize,
    t_cap: f64,
    config: &OracleConfig,
) -> Result<NoHarvestEvidence> {
    if !(t_cap > config.coarse_step && t_cap <= config.t_max) {
        return Err(RotationError::Config("t_cap must lie in (coarse_step, t_max]".into()));
    }
    let valuator = Valuator::new(model, params, config.t_max + config.coarse_step)?;
    no_harvest_with(&valuator, n_rotations, t_cap, config)
}
