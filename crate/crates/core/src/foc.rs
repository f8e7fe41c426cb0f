//! First-order condition linking the lengths of two consecutive optimal
//! rotations, and its constant-price and timber-only reductions.
//!
//! A pair starting at scenario time `s` is evaluated as the time-zero
//! condition with the carbon price inflated to `p_c·e^(ρs)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::pricing::EconParams;
use crate::valuation::Valuator;

/// Two consecutive rotations: rotation `i` begins at `t_start` and lasts
/// `t_a`; rotation `i+1` lasts `t_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocPair {
    pub t_start: f64,
    pub t_a: f64,
    pub t_b: f64,
}

impl FocPair {
    pub fn new(t_start: f64, t_a: f64, t_b: f64) -> Result<Self> {
        let pair = Self { t_start, t_a, t_b };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_start >= 0.0) {
            return Err(RotationError::Domain(format!("t_start must be >= 0, got {}", self.t_start)));
        }
        if !(self.t_a.is_finite() && self.t_a > 0.0 && self.t_b.is_finite() && self.t_b > 0.0) {
            return Err(RotationError::Domain(format!(
                "rotation lengths must be positive, got ({}, {})",
                self.t_a, self.t_b
            )));
        }
        Ok(())
    }
}

/// Residual together with the sum of magnitudes of the products it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocValue {
    pub residual: f64,
    pub scale: f64,
}

impl FocValue {
    /// Residual relative to its own term scale (plus one, so an all-zero
    /// condition reads as exactly zero).
    pub fn normalized(&self) -> f64 {
        self.residual / (self.scale + 1.0)
    }
}

pub(crate) fn evaluate_pair(valuator: &Valuator, pair: &FocPair) -> Result<FocValue> {
    pair.validate()?;
    let m = valuator.model();
    let p = valuator.params();
    let (ta, tb) = (pair.t_a, pair.t_b);
    let price = p.carbon_price_at(pair.t_start);
    let grow_a = (p.rho * ta).exp();
    let ab = m.alpha * p.beta * price;
    let a1b = m.alpha * (1.0 - p.beta) * price;
    let (v_a, dv_a, dv_b) = (m.volume(ta), m.volume_rate(ta), m.volume_rate(tb));
    let integral_b = valuator.integral(tb)?;
    let disc_b = (-p.r * tb).exp();
    // Carbon price at the end of rotation i+1 discounted across it: e^(-r T_b) e^(ρ(T_a+T_b)).
    let carbon_b = (p.net_rate() * tb + p.rho * ta).exp();

    let pieces = [
        grow_a * ab * dv_a,
        p.p_f * dv_a,
        grow_a * a1b * (p.r - p.rho) * v_a,
        -p.r * p.p_f * v_a,
        grow_a * price * m.alpha * p.net_rate() * integral_b,
        -carbon_b * ab * dv_b,
        -disc_b * p.p_f * dv_b,
        p.r * p.c_regen,
    ];
    Ok(FocValue {
        residual: pieces.iter().sum(),
        scale: pieces.iter().map(|x| x.abs()).sum(),
    })
}

/// Left-hand side of the chained first-order condition for `pair`.
pub fn foc_residual(model: &GrowthModel, params: &EconParams, pair: &FocPair) -> Result<f64> {
    foc_value(model, params, pair).map(|v| v.residual)
}

/// Residual and term scale for `pair`.
pub fn foc_value(model: &GrowthModel, params: &EconParams, pair: &FocPair) -> Result<FocValue> {
    pair.validate()?;
    let valuator = Valuator::new(model, params, pair.t_b)?;
    evaluate_pair(&valuator, pair)
}

/// Faustmann condition: `p_f v′ − r p_f v − e^(−rT) p_f v′ + r C`.
pub fn faustmann_residual(model: &GrowthModel, params: &EconParams, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(RotationError::Domain(format!("rotation length must be positive, got {t}")));
    }
    let (v, dv) = (model.volume(t), model.volume_rate(t));
    let pf = params.p_f;
    Ok(pf * dv - params.r * pf * v - (-params.r * t).exp() * pf * dv + params.r * params.c_regen)
}

/// Constant-carbon-price condition with equal consecutive rotations.
pub fn constant_price_residual(model: &GrowthModel, params: &EconParams, t: f64) -> Result<f64> {
    if params.rho != 0.0 {
        return Err(RotationError::InvalidParams(format!(
            "constant-price condition needs rho = 0, got {}",
            params.rho
        )));
    }
    let valuator = Valuator::new(model, params, t)?;
    constant_price_value(&valuator, t).map(|v| v.residual)
}

pub(crate) fn constant_price_value(valuator: &Valuator, t: f64) -> Result<FocValue> {
    if !(t.is_finite() && t > 0.0) {
        return Err(RotationError::Domain(format!("rotation length must be positive, got {t}")));
    }
    let m = valuator.model();
    let p = valuator.params();
    debug_assert_eq!(p.rho, 0.0);
    let (v, dv) = (m.volume(t), m.volume_rate(t));
    let pc = p.p_c;
    let r = p.r;
    let keep = 1.0 - (-r * t).exp();
    let pieces = [
        (m.alpha * p.beta * pc + p.p_f) * dv * keep,
        m.alpha * (1.0 - p.beta) * r * pc * v,
        -r * p.p_f * v,
        -r * m.alpha * pc * valuator.integral(t)?,
        r * p.c_regen,
    ];
    Ok(FocValue {
        residual: pieces.iter().sum(),
        scale: pieces.iter().map(|x| x.abs()).sum(),
    })
}

fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Faustmann rotation age for the scenario's timber price, discount rate and
/// regeneration cost (carbon ignored). With `p_f = 0` the cost-free
/// condition `(1 − e^(−rT)) v′ = r v` is used.
pub fn faustmann_age(model: &GrowthModel, params: &EconParams) -> Result<f64> {
    let base = if params.p_f > 0.0 {
        EconParams { p_c: 0.0, ..*params }
    } else {
        EconParams { p_f: 1.0, p_c: 0.0, c_regen: 0.0, ..*params }
    };
    let f = |t: f64| faustmann_residual(model, &base, t);
    let lo = 1e-3;
    let hi = model.peak_volume_age();
    if f(lo)? <= 0.0 || f(hi)? >= 0.0 {
        return Err(RotationError::Numeric(
            "Faustmann condition has no sign change below the volume peak".into(),
        ));
    }
    bisect(f, lo, hi, 1e-12)
}

/// Optimal stationary rotation when the carbon price is held at `p_c`
/// forever (ρ treated as zero). Returns `None` when no root of the
/// constant-price condition exists up to `t_max`.
pub fn stationary_rotation(model: &GrowthModel, params: &EconParams, t_max: f64) -> Result<Option<f64>> {
    let flat = EconParams { rho: 0.0, ..*params };
    if flat.p_c == 0.0 {
        return faustmann_age(model, &flat).map(Some);
    }
    let valuator = Valuator::new(model, &flat, t_max)?;
    stationary_rotation_with(&valuator, t_max)
}

/// `valuator` must carry ρ = 0.
pub(crate) fn stationary_rotation_with(valuator: &Valuator, t_max: f64) -> Result<Option<f64>> {
    let flat = *valuator.params();
    debug_assert_eq!(flat.rho, 0.0);
    if flat.p_c == 0.0 {
        return faustmann_age(valuator.model(), &flat).map(Some);
    }
    let residual = |t: f64| constant_price_value(valuator, t).map(|v| v.residual);
    let land = |t: f64| -> Result<f64> {
        Ok(valuator.cash_value(0.0, t)? / (1.0 - (-flat.r * t).exp()))
    };
    let mut best: Option<(f64, f64)> = None;
    let mut prev_t = 1.0;
    let mut prev = residual(prev_t)?;
    let mut t = prev_t + 1.0;
    while t <= t_max {
        let cur = residual(t)?;
        if prev > 0.0 && cur <= 0.0 {
            let root = bisect(residual, prev_t, t, 1e-11)?;
            let value = land(root)?;
            if best.is_none_or(|(_, v)| value > v) {
                best = Some((root, value));
            }
        }
        prev_t = t;
        prev = cur;
        t += 1.0;
    }
    Ok(best.map(|(root, _)| root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent Faustmann oracle: golden-section maximization of the closed-form
    // land expectation value p_f v(T) e^(-rT) / (1 - e^(-rT)).
    fn faustmann_oracle(model: &GrowthModel, r: f64) -> f64 {
        let lev = |t: f64| model.volume(t) * (-r * t).exp() / (1.0 - (-r * t).exp());
        let (mut a, mut b) = (5.0, 150.0);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if lev(c) > lev(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    fn timber() -> EconParams {
        EconParams::default()
    }

    #[test]
    fn faustmann_ages_match_oracle() {
        let c = faustmann_age(&GrowthModel::coastal(), &timber()).unwrap();
        let b = faustmann_age(&GrowthModel::boreal(), &timber()).unwrap();
        assert!((c - faustmann_oracle(&GrowthModel::coastal(), 0.05)).abs() < 1e-6);
        assert!((b - faustmann_oracle(&GrowthModel::boreal(), 0.05)).abs() < 1e-6);
        assert!((c - 43.236_844_152_952_33).abs() < 1e-9);
        assert!((b - 41.713_758_859_420_42).abs() < 1e-9);
        // Rounded ages: 43 and 42 years.
        assert_eq!(c.round(), 43.0);
        assert_eq!(b.round(), 42.0);
    }

    #[test]
    fn zero_prices_leave_cost_term() {
        let p = EconParams { p_f: 0.0, c_regen: 250.0, ..Default::default() };
        let m = GrowthModel::boreal();
        for (a, b, s) in [(10.0, 20.0, 0.0), (80.0, 300.0, 55.0)] {
            let pair = FocPair::new(s, a, b).unwrap();
            assert!((foc_residual(&m, &p, &pair).unwrap() - 0.05 * 250.0).abs() < 1e-12);
        }
    }

    #[test]
    fn timber_only_residual_vanishes_at_faustmann_age() {
        let m = GrowthModel::coastal();
        let tf = faustmann_oracle(&m, 0.05);
        let pair = FocPair::new(0.0, tf, tf).unwrap();
        let res = foc_residual(&m, &timber(), &pair).unwrap();
        assert!(res.abs() < 1e-6 * 50.0 * m.volume_rate(tf), "{res}");
        for (model, t) in [(GrowthModel::coastal(), tf), (GrowthModel::boreal(), faustmann_oracle(&GrowthModel::boreal(), 0.05))] {
            let res = faustmann_residual(&model, &timber(), t).unwrap();
            assert!(res.abs() < 1e-6 * 50.0 * model.volume_rate(t));
        }
    }

    #[test]
    fn constant_price_residual_vanishes_at_its_stationary_optimum() {
        // Brute-force maximization of the stationary land value under a constant carbon price.
        let m = GrowthModel::coastal();
        let p = EconParams { p_c: 20.0, ..Default::default() };
        let val = Valuator::new(&m, &p, 400.0).unwrap();
        let lev = |t: f64| val.cash_value(0.0, t).unwrap() / (1.0 - (-0.05 * t).exp());
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in 1..=200_000 {
            let t = 20.0 + i as f64 * 1e-3 * 0.5;
            let v = lev(t);
            if v > best.1 {
                best = (t, v);
            }
        }
        let t_vk = best.0;
        let pair = FocPair::new(0.0, t_vk, t_vk).unwrap();
        let res = foc_residual(&m, &p, &pair).unwrap();
        // Oracle resolution 5e-4 years bounds the residual through its slope.
        let slope = (foc_residual(&m, &p, &FocPair::new(0.0, t_vk + 0.01, t_vk + 0.01).unwrap()).unwrap()
            - foc_residual(&m, &p, &FocPair::new(0.0, t_vk - 0.01, t_vk - 0.01).unwrap()).unwrap())
            / 0.02;
        assert!(res.abs() <= slope.abs() * 5e-4 + 1e-6 * 50.0 * m.volume_rate(t_vk));
        let root = stationary_rotation(&m, &p, 400.0).unwrap().unwrap();
        assert!((root - t_vk).abs() < 1e-3, "{root} vs {t_vk}");
    }

    #[test]
    fn timber_roots_are_trivial_without_prices() {
        let p = EconParams { p_f: 0.0, ..Default::default() };
        for t in [5.0, 50.0, 250.0] {
            assert_eq!(faustmann_residual(&GrowthModel::coastal(), &p, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn reductions_agree_on_grid() {
        let cases = [
            (GrowthModel::coastal(), EconParams { p_c: 0.0, rho: 0.02, beta: 0.4, c_regen: 80.0, ..Default::default() }),
            (GrowthModel::boreal(), EconParams { p_c: 0.0, rho: 0.0, c_regen: 0.0, ..Default::default() }),
        ];
        for (m, p) in &cases {
            for t in 20..=200 {
                let t = t as f64;
                let full = foc_value(m, p, &FocPair::new(0.0, t, t).unwrap()).unwrap();
                let reduced = faustmann_residual(m, p, t).unwrap();
                assert!((full.residual - reduced).abs() <= 1e-10 * full.scale.max(1e-300));
            }
        }
        for (m, pc, beta) in [(GrowthModel::coastal(), 30.0, 0.0), (GrowthModel::boreal(), 120.0, 1.0)] {
            let p = EconParams { p_c: pc, beta, c_regen: 15.0, ..Default::default() };
            for t in 20..=200 {
                let t = t as f64;
                let full = foc_value(&m, &p, &FocPair::new(0.0, t, t).unwrap()).unwrap();
                let reduced = constant_price_residual(&m, &p, t).unwrap();
                assert!((full.residual - reduced).abs() <= 1e-10 * full.scale, "t={t}");
            }
        }
    }

    #[test]
    fn constant_price_at_zero_carbon_is_faustmann() {
        let m = GrowthModel::coastal();
        for t in [20.0, 43.0, 90.0, 180.0] {
            let a = constant_price_residual(&m, &timber(), t).unwrap();
            let b = faustmann_residual(&m, &timber(), t).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn constant_price_rejects_growing_price() {
        let p = EconParams { rho: 0.01, ..Default::default() };
        assert!(constant_price_residual(&GrowthModel::coastal(), &p, 40.0).is_err());
    }

    #[test]
    fn carbon_pricing_lengthens_constant_price_rotation() {
        let m = GrowthModel::coastal();
        let p = EconParams { p_c: 20.0, beta: 1.0, ..Default::default() };
        let t_vk = stationary_rotation(&m, &p, 400.0).unwrap().unwrap();
        assert!(t_vk > faustmann_age(&m, &timber()).unwrap());
    }

    #[test]
    fn invalid_pairs() {
        assert!(FocPair::new(-1.0, 10.0, 10.0).is_err());
        assert!(FocPair::new(0.0, 0.0, 10.0).is_err());
        assert!(FocPair::new(0.0, 10.0, f64::NAN).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn start_shift_equals_inflated_price(s in 0.0f64..300.0, ta in 5.0f64..300.0, tb in 5.0f64..300.0,
                                             rho in 0.0f64..0.04, pc in 0.0f64..150.0, beta in 0.0f64..1.0) {
            let m = GrowthModel::boreal();
            let p = EconParams { p_c: pc, rho, beta, c_regen: 10.0, ..Default::default() };
            let shifted = foc_residual(&m, &p, &FocPair::new(s, ta, tb).unwrap()).unwrap();
            let inflated = p.with_carbon_price(pc * (rho * s).exp());
            let direct = foc_residual(&m, &inflated, &FocPair::new(0.0, ta, tb).unwrap()).unwrap();
            prop_assert!((shifted - direct).abs() <= 1e-12 * shifted.abs().max(1.0));
        }
    }
}
