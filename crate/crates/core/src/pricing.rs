//! Pricing scenarios and the discounted growth integral
//! `∫₀ᵀ e^(net_rate·τ) v′(τ) dτ` shared by every valuation and FOC expression.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::quadrature::{integrate, Tolerance};

/// One pricing scenario. Carbon price follows `p_c · e^(ρ t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EconParams {
    /// Timber price, USD/m³.
    pub p_f: f64,
    /// Carbon price at scenario time zero, USD/tC.
    pub p_c: f64,
    /// Carbon price growth rate, 1/year.
    pub rho: f64,
    /// Discount rate, 1/year.
    pub r: f64,
    /// Share of harvested carbon stored permanently.
    pub beta: f64,
    /// Regeneration cost paid at each harvest, USD/ha.
    pub c_regen: f64,
}

impl Default for EconParams {
    fn default() -> Self {
        Self {
            p_f: 50.0,
            p_c: 0.0,
            rho: 0.0,
            r: 0.05,
            beta: 0.0,
            c_regen: 0.0,
        }
    }
}

impl EconParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [self.p_f, self.p_c, self.rho, self.r, self.beta, self.c_regen];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(RotationError::InvalidParams("all parameters must be finite".into()));
        }
        if self.p_f < 0.0 || self.p_c < 0.0 || self.c_regen < 0.0 {
            return Err(RotationError::InvalidParams(
                "prices and regeneration cost must be nonnegative".into(),
            ));
        }
        if self.rho < 0.0 {
            return Err(RotationError::InvalidParams("rho must be nonnegative".into()));
        }
        if self.r <= 0.0 {
            return Err(RotationError::InvalidParams("discount rate must be positive".into()));
        }
        if self.r <= self.rho {
            return Err(RotationError::InvalidParams(format!(
                "discount rate r={} must exceed carbon price growth rho={} for a finite present value",
                self.r, self.rho
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(RotationError::InvalidParams("beta must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// `ρ − r`, the rate at which carbon-denominated value decays.
    pub fn net_rate(&self) -> f64 {
        self.rho - self.r
    }

    /// Carbon price at scenario time `t`.
    pub fn carbon_price_at(&self, t: f64) -> f64 {
        self.p_c * (self.rho * t).exp()
    }

    /// Same scenario restated with a different initial carbon price.
    pub fn with_carbon_price(&self, p_c: f64) -> Self {
        Self { p_c, ..*self }
    }

    /// Both prices multiplied by `lambda`.
    pub fn scaled_prices(&self, lambda: f64) -> Self {
        Self {
            p_f: self.p_f * lambda,
            p_c: self.p_c * lambda,
            ..*self
        }
    }
}

/// Carbon price at time `t` for the scenario.
pub fn carbon_price_at(params: &EconParams, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(RotationError::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok(params.carbon_price_at(t))
}

/// `∫₀ᵀ e^(net_rate·τ) v′(τ) dτ` by adaptive quadrature.
pub fn discounted_growth_integral(model: &GrowthModel, net_rate: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(RotationError::Domain(format!("rotation length must be >= 0, got {t}")));
    }
    segment_integral(model, net_rate, 0.0, t)
}

fn segment_integral(model: &GrowthModel, net_rate: f64, lower: f64, upper: f64) -> Result<f64> {
    integrate(
        |s| (net_rate * s).exp() * model.volume_rate(s),
        lower,
        upper,
        Tolerance::default(),
    )
}

/// Cumulative table of the discounted growth integral at fixed knots.
///
/// Values between knots add one short adaptive segment to the cumulative sum,
/// so the result is the same quadrature split at the knots.
#[derive(Debug, Clone)]
pub struct GrowthIntegralTable {
    model: GrowthModel,
    net_rate: f64,
    spacing: f64,
    cumulative: Vec<f64>,
}

impl GrowthIntegralTable {
    pub fn new(model: &GrowthModel, net_rate: f64, horizon: f64) -> Result<Self> {
        let spacing = 1.0;
        let count = (horizon.max(1.0) / spacing).ceil() as usize;
        let mut cumulative = Vec::with_capacity(count + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..count {
            let lo = i as f64 * spacing;
            acc += segment_integral(model, net_rate, lo, lo + spacing)?;
            cumulative.push(acc);
        }
        Ok(Self {
            model: model.clone(),
            net_rate,
            spacing,
            cumulative,
        })
    }

    pub fn net_rate(&self) -> f64 {
        self.net_rate
    }

    pub fn model(&self) -> &GrowthModel {
        &self.model
    }

    /// Integral from zero to `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(RotationError::Domain(format!("rotation length must be >= 0, got {t}")));
        }
        let last = self.cumulative.len() - 1;
        let idx = ((t / self.spacing).floor() as usize).min(last);
        let knot = idx as f64 * self.spacing;
        let base = self.cumulative[idx];
        if t == knot {
            return Ok(base);
        }
        Ok(base + segment_integral(&self.model, self.net_rate, knot, t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    // Dense fixed-grid oracle, independent of the adaptive routine.
    fn simpson(model: &GrowthModel, net_rate: f64, lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        let f = |s: f64| (net_rate * s).exp() * model.volume_rate(s);
        let mut sum = f(lo) + f(hi);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(lo + i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn carbon_price_examples() {
        let p = EconParams { p_c: 50.0, ..Default::default() };
        assert_eq!(carbon_price_at(&p, 37.0).unwrap(), 50.0);
        let p = EconParams { p_c: 50.0, rho: 0.02, ..Default::default() };
        assert_eq!(carbon_price_at(&p, 0.0).unwrap(), 50.0);
        let doubling = std::f64::consts::LN_2 / 0.02;
        assert!(rel(carbon_price_at(&p, doubling).unwrap(), 100.0) < 1e-12);
        assert!(rel(carbon_price_at(&p, 34.657).unwrap(), 100.0) < 1e-5);
        assert!(carbon_price_at(&p, -1.0).is_err());
    }

    #[test]
    fn integral_empty_interval() {
        let m = GrowthModel::coastal();
        for nr in [-0.05, 0.0, 0.3] {
            assert_eq!(discounted_growth_integral(&m, nr, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn undiscounted_integral_is_volume() {
        let m = GrowthModel::coastal();
        let v = discounted_growth_integral(&m, 0.0, 80.0).unwrap();
        assert!(rel(v, m.stem_volume(80.0).unwrap()) < 1e-8);
    }

    #[test]
    fn matches_dense_simpson() {
        let m = GrowthModel::coastal();
        let v = discounted_growth_integral(&m, -0.03, 100.0).unwrap();
        let oracle = simpson(&m, -0.03, 0.0, 100.0, 1_000_000);
        assert!(rel(v, oracle) < 1e-8, "{v} vs {oracle}");
        // 40-digit reference.
        assert!(rel(v, 193.483_303_227_960_75) < 1e-10);
    }

    #[test]
    fn table_agrees_with_direct_quadrature() {
        let m = GrowthModel::boreal();
        let table = GrowthIntegralTable::new(&m, -0.04, 400.0).unwrap();
        for t in [0.0, 0.3, 1.0, 41.71, 99.99, 250.0, 400.0, 450.5] {
            let direct = discounted_growth_integral(&m, -0.04, t).unwrap();
            let tab = table.eval(t).unwrap();
            assert!((tab - direct).abs() <= 1e-11 * direct.abs().max(1.0), "t={t}");
        }
    }

    #[test]
    fn monotone_before_peak() {
        let m = GrowthModel::coastal();
        let mut prev = 0.0;
        for i in 1..=122 {
            let v = discounted_growth_integral(&m, -0.05, i as f64).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn params_validation() {
        assert!(EconParams::default().validate().is_ok());
        let bad = EconParams { rho: 0.05, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = EconParams { beta: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = EconParams { p_c: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn additivity(t1 in 1.0f64..150.0, extra in 1.0f64..150.0, nr in -0.05f64..0.0) {
            let m = GrowthModel::coastal();
            let t2 = t1 + extra;
            // Shifted integrand e^(nr τ) v′(T₁+τ) over [0, T₂−T₁], summed by the dense oracle.
            let shifted = {
                let panels = 20_000;
                let h = extra / panels as f64;
                let f = |s: f64| (nr * s).exp() * m.volume_rate(t1 + s);
                let mut sum = f(0.0) + f(extra);
                for i in 1..panels {
                    sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
                }
                sum * h / 3.0
            };
            let lhs = discounted_growth_integral(&m, nr, t1).unwrap() + (nr * t1).exp() * shifted;
            let rhs = discounted_growth_integral(&m, nr, t2).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
        }

        #[test]
        fn price_is_multiplicative(t1 in 0.0f64..200.0, t2 in 0.0f64..200.0, rho in 0.0f64..0.04) {
            let p = EconParams { p_c: 37.0, rho, ..Default::default() };
            let lhs = p.carbon_price_at(t1 + t2);
            let rhs = p.carbon_price_at(t1) * (rho * t2).exp();
            prop_assert!(rel(lhs, rhs) < 1e-12);
        }
    }
}
