//! Rotation cash flows, truncated schedule NPV and bare-land value.
//!
//! All values are discounted to scenario time zero. The continuation value
//! after the last rotation of a schedule is zero.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::SolveReport;
use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::pricing::{discounted_growth_integral, EconParams, GrowthIntegralTable};

/// Finite sequence of rotation lengths starting at `start_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSchedule {
    pub lengths: Vec<f64>,
    pub start_time: f64,
}

impl RotationSchedule {
    pub fn new(lengths: Vec<f64>, start_time: f64) -> Result<Self> {
        let schedule = Self { lengths, start_time };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(RotationError::Domain("schedule needs at least one rotation".into()));
        }
        if let Some(bad) = self.lengths.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(RotationError::Domain(format!("rotation lengths must be positive, got {bad}")));
        }
        if !(self.start_time.is_finite() && self.start_time >= 0.0) {
            return Err(RotationError::Domain("start time must be >= 0".into()));
        }
        Ok(())
    }

    pub fn first(&self) -> f64 {
        self.lengths[0]
    }

    /// Scenario time at which the last rotation ends.
    pub fn horizon(&self) -> f64 {
        self.start_time + self.lengths.iter().sum::<f64>()
    }
}

/// Bare-land value of a solved schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandValue {
    pub npv: f64,
    pub n_rotations_used: usize,
    /// Upper bound on the value of everything after the schedule's horizon.
    pub truncation_bound: f64,
}

/// Value of one rotation split into its carbon and timber/cost parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CashParts {
    /// Growth credits minus the harvest levy.
    pub carbon: f64,
    /// Timber revenue minus regeneration cost.
    pub timber: f64,
}

impl CashParts {
    pub fn total(&self) -> f64 {
        self.carbon + self.timber
    }
}

fn cash_parts(model: &GrowthModel, params: &EconParams, t_start: f64, length: f64, integral: f64) -> CashParts {
    let nr = params.net_rate();
    let end = t_start + length;
    let v = model.volume(length);
    let credits = model.alpha * params.p_c * (nr * t_start).exp() * integral;
    let levy = model.alpha * (1.0 - params.beta) * params.p_c * (nr * end).exp() * v;
    let discount = (-params.r * end).exp();
    CashParts {
        carbon: credits - levy,
        timber: discount * (params.p_f * v - params.c_regen),
    }
}

fn check_rotation(t_start: f64, length: f64) -> Result<()> {
    if !(length.is_finite() && length > 0.0) {
        return Err(RotationError::Domain(format!("rotation length must be positive, got {length}")));
    }
    if !(t_start.is_finite() && t_start >= 0.0) {
        return Err(RotationError::Domain(format!("start time must be >= 0, got {t_start}")));
    }
    Ok(())
}

/// Carbon and timber parts of one rotation starting at `t_start`.
pub fn rotation_cash_parts(model: &GrowthModel, params: &EconParams, t_start: f64, length: f64) -> Result<CashParts> {
    check_rotation(t_start, length)?;
    let integral = discounted_growth_integral(model, params.net_rate(), length)?;
    Ok(cash_parts(model, params, t_start, length, integral))
}

/// Discounted value of a single rotation of length `length` beginning at `t_start`.
pub fn rotation_cash_value(model: &GrowthModel, params: &EconParams, t_start: f64, length: f64) -> Result<f64> {
    rotation_cash_parts(model, params, t_start, length).map(|p| p.total())
}

/// Truncated NPV of a finite schedule.
pub fn schedule_npv(model: &GrowthModel, params: &EconParams, schedule: &RotationSchedule) -> Result<f64> {
    schedule.validate()?;
    let mut start = schedule.start_time;
    let mut total = 0.0;
    for &length in &schedule.lengths {
        total += rotation_cash_value(model, params, start, length)?;
        start += length;
    }
    Ok(total)
}

/// Bound on the discounted value earnable after `horizon`.
///
/// Credits accrue at most at `alpha·p_c·e^(ρt)·max v′` and timber at most at
/// `p_f·max v′` per year; levies and costs only subtract.
pub fn truncation_bound(model: &GrowthModel, params: &EconParams, horizon: f64) -> f64 {
    let rate = (model.alpha * params.p_c + params.p_f) * model.max_growth_rate();
    let decay = params.r - params.rho;
    (-decay * horizon).exp() * rate / decay
}

/// Land value of an explicit schedule (from the chain solver or the oracle).
pub fn land_value_of_schedule(model: &GrowthModel, params: &EconParams, schedule: &RotationSchedule) -> Result<LandValue> {
    let npv = schedule_npv(model, params, schedule)?;
    Ok(LandValue {
        npv,
        n_rotations_used: schedule.lengths.len(),
        truncation_bound: truncation_bound(model, params, schedule.horizon()),
    })
}

/// Land value of a solver result.
pub fn land_value(model: &GrowthModel, params: &EconParams, report: &SolveReport) -> Result<LandValue> {
    let schedule = report.schedule.as_ref().ok_or_else(|| {
        RotationError::Numeric(format!(
            "no schedule to value (classification {})",
            report.classification
        ))
    })?;
    land_value_of_schedule(model, params, schedule)
}

/// Reusable evaluator that caches the discounted growth integral for one
/// `(model, ρ − r)` pair. Used by the solvers on hot paths.
#[derive(Debug, Clone)]
pub struct Valuator {
    model: GrowthModel,
    params: EconParams,
    horizon: f64,
    table: Arc<GrowthIntegralTable>,
}

impl Valuator {
    pub fn new(model: &GrowthModel, params: &EconParams, horizon: f64) -> Result<Self> {
        model.validate()?;
        params.validate()?;
        Ok(Self {
            model: model.clone(),
            params: *params,
            horizon,
            table: Arc::new(GrowthIntegralTable::new(model, params.net_rate(), horizon)?),
        })
    }

    /// Same model and rates with another `(p_f, p_c, β, C)`; the table is reused.
    pub fn with_params(&self, params: &EconParams) -> Result<Self> {
        params.validate()?;
        if params.net_rate() != self.table.net_rate() {
            return Valuator::new(&self.model, params, self.horizon);
        }
        Ok(Self {
            model: self.model.clone(),
            params: *params,
            horizon: self.horizon,
            table: Arc::clone(&self.table),
        })
    }

    pub fn model(&self) -> &GrowthModel {
        &self.model
    }

    pub fn params(&self) -> &EconParams {
        &self.params
    }

    pub fn integral(&self, length: f64) -> Result<f64> {
        self.table.eval(length)
    }

    pub fn cash_value(&self, t_start: f64, length: f64) -> Result<f64> {
        check_rotation(t_start, length)?;
        let integral = self.table.eval(length)?;
        Ok(cash_parts(&self.model, &self.params, t_start, length, integral).total())
    }

    #[inline]
    pub(crate) fn cash_from_integral(&self, t_start: f64, length: f64, integral: f64) -> f64 {
        cash_parts(&self.model, &self.params, t_start, length, integral).total()
    }

    /// NPV of rotations `lengths` starting at `start_time`, without building a schedule.
    pub fn npv(&self, lengths: &[f64], start_time: f64) -> Result<f64> {
        let mut start = start_time;
        let mut total = 0.0;
        for &length in lengths {
            total += self.cash_value(start, length)?;
            start += length;
        }
        Ok(total)
    }
}
