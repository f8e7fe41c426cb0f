//! Stand-volume growth curves of the form `v(t) = k * t^a * e^(b t)`.
//!
//! Two fitted curves ship as built-ins: a coastal forest and a boreal
//! black spruce stand. Any other `(k, a, b, alpha)` set satisfying the
//! shape constraints can be constructed with [`GrowthModel::new`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, RotationError};

/// Parameters of one idealized growth curve plus its carbon content factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthModel {
    pub name: String,
    /// Scale coefficient, m³/ha per year^a.
    pub k: f64,
    /// Age exponent, must exceed one.
    pub a: f64,
    /// Decay rate per year, must be negative.
    pub b: f64,
    /// Carbon per unit stem volume, tC/m³.
    pub alpha: f64,
}

impl GrowthModel {
    pub fn new(name: impl Into<String>, k: f64, a: f64, b: f64, alpha: f64) -> Result<Self> {
        let model = Self {
            name: name.into(),
            k,
            a,
            b,
            alpha,
        };
        model.validate()?;
        Ok(model)
    }

    /// Coastal forest in British Columbia.
    pub fn coastal() -> Self {
        Self {
            name: "coastal".into(),
            k: 0.000573,
            a: 3.7819,
            b: -0.030965,
            alpha: 0.1824,
        }
    }

    /// Boreal black spruce in Alberta.
    pub fn boreal() -> Self {
        Self {
            name: "boreal".into(),
            k: 0.000759,
            a: 2.7655,
            b: -0.009205,
            alpha: 0.2030,
        }
    }

    /// Looks up a built-in model by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "coastal" => Ok(Self::coastal()),
            "boreal" => Ok(Self::boreal()),
            other => Err(RotationError::InvalidModel(format!(
                "unknown built-in forest `{other}` (expected coastal or boreal)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.k, self.a, self.b, self.alpha]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(RotationError::InvalidModel(format!(
                "{}: parameters must be finite",
                self.name
            )));
        }
        if self.k <= 0.0 {
            return Err(RotationError::InvalidModel(format!("{}: k must be positive", self.name)));
        }
        if self.a <= 1.0 {
            return Err(RotationError::InvalidModel(format!("{}: a must exceed 1", self.name)));
        }
        if self.b >= 0.0 {
            return Err(RotationError::InvalidModel(format!("{}: b must be negative", self.name)));
        }
        if self.alpha <= 0.0 {
            return Err(RotationError::InvalidModel(format!(
                "{}: alpha must be positive",
                self.name
            )));
        }
        Ok(())
    }

    /// Stem volume at age `t`, m³/ha.
    pub fn stem_volume(&self, t: f64) -> Result<f64> {
        check_age(t)?;
        Ok(self.volume(t))
    }

    /// Volume growth rate at age `t`, m³/ha/year.
    pub fn stem_volume_rate(&self, t: f64) -> Result<f64> {
        check_age(t)?;
        Ok(self.volume_rate(t))
    }

    /// Age at which standing volume peaks: `-a/b`.
    pub fn peak_volume_age(&self) -> f64 {
        -self.a / self.b
    }

    /// Maximum sustainable yield age, the maximizer of `v(t)/t`: `(1-a)/b`.
    pub fn msy_age(&self) -> f64 {
        (1.0 - self.a) / self.b
    }

    /// Age of fastest volume growth (inflection of `v`): `(a - sqrt(a)) / -b`.
    pub fn max_growth_rate_age(&self) -> f64 {
        (self.a - self.a.sqrt()) / -self.b
    }

    /// Largest growth rate over all ages.
    pub fn max_growth_rate(&self) -> f64 {
        self.volume_rate(self.max_growth_rate_age())
    }

    // Unchecked evaluators used on hot paths where ages are already known to be >= 0.

    #[inline]
    pub(crate) fn volume(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.k * (self.a * t.ln() + self.b * t).exp()
    }

    #[inline]
    pub(crate) fn volume_rate(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.k * ((self.a - 1.0) * t.ln() + self.b * t).exp() * (self.a + self.b * t)
    }
}

fn check_age(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(RotationError::Domain(format!("age must be >= 0, got {t}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn volume_is_zero_at_origin() {
        assert_eq!(GrowthModel::coastal().stem_volume(0.0).unwrap(), 0.0);
        assert_eq!(GrowthModel::boreal().stem_volume_rate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn coastal_volume_at_100() {
        // 40-digit evaluation of the closed form.
        let v = GrowthModel::coastal().stem_volume(100.0).unwrap();
        assert!(rel(v, 948.771_780_161_999_3) < 1e-6, "{v}");
    }

    #[test]
    fn negative_age_is_rejected() {
        let m = GrowthModel::coastal();
        assert!(matches!(m.stem_volume(-1.0), Err(RotationError::Domain(_))));
        assert!(matches!(m.stem_volume_rate(-0.5), Err(RotationError::Domain(_))));
        assert!(m.stem_volume(f64::NAN).is_err());
    }

    #[test]
    fn growth_rate_vanishes_at_peak() {
        for m in [GrowthModel::coastal(), GrowthModel::boreal()] {
            let peak = m.peak_volume_age();
            assert!(m.stem_volume_rate(peak).unwrap().abs() < 1e-10);
            assert!(m.stem_volume_rate(peak - 1.0).unwrap() > 0.0);
            assert!(m.stem_volume_rate(peak + 1.0).unwrap() < 0.0);
        }
    }

    #[test]
    fn boreal_peak_is_global_maximum() {
        let m = GrowthModel::boreal();
        let peak = m.peak_volume_age();
        let vmax = m.stem_volume(peak).unwrap();
        for i in 0..2000 {
            let t = i as f64 * 0.5;
            assert!(m.stem_volume(t).unwrap() <= vmax);
        }
    }

    #[test]
    fn boreal_rate_matches_finite_difference() {
        let m = GrowthModel::boreal();
        let h = 1e-4;
        let fd = (m.stem_volume(100.0 + h).unwrap() - m.stem_volume(100.0 - h).unwrap()) / (2.0 * h);
        assert!(rel(m.stem_volume_rate(100.0).unwrap(), fd) < 1e-6);
    }

    #[test]
    fn characteristic_ages() {
        let c = GrowthModel::coastal();
        let b = GrowthModel::boreal();
        assert!((c.peak_volume_age() - 122.13).abs() < 0.5);
        assert!((b.peak_volume_age() - 300.43).abs() < 0.5);
        assert!((c.msy_age() - 89.84).abs() < 0.5);
        assert!((b.msy_age() - 191.80).abs() < 0.5);
        let toy = GrowthModel::new("toy", 1.0, 2.0, -0.01, 0.2).unwrap();
        assert!((toy.peak_volume_age() - 200.0).abs() < 1e-12);
        assert!((toy.msy_age() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn msy_age_maximizes_mean_annual_increment() {
        for m in [GrowthModel::coastal(), GrowthModel::boreal()] {
            let msy = m.msy_age();
            let mai = |t: f64| m.stem_volume(t).unwrap() / t;
            assert!(mai(msy) > mai(msy - 1.0));
            assert!(mai(msy) > mai(msy + 1.0));
        }
    }

    #[test]
    fn inflection_age_maximizes_rate() {
        let m = GrowthModel::coastal();
        let t = m.max_growth_rate_age();
        let g = m.max_growth_rate();
        assert!(g >= m.volume_rate(t - 0.1) && g >= m.volume_rate(t + 0.1));
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(GrowthModel::new("x", 0.0, 2.0, -0.01, 0.2).is_err());
        assert!(GrowthModel::new("x", 1.0, 1.0, -0.01, 0.2).is_err());
        assert!(GrowthModel::new("x", 1.0, 2.0, 0.0, 0.2).is_err());
        assert!(GrowthModel::new("x", 1.0, 2.0, -0.01, 0.0).is_err());
        assert!(GrowthModel::builtin("tropical").is_err());
    }

    proptest! {
        #[test]
        fn rate_matches_central_difference(log_t in (0.1f64).ln()..(400.0f64).ln(), boreal in any::<bool>()) {
            let m = if boreal { GrowthModel::boreal() } else { GrowthModel::coastal() };
            let t = log_t.exp();
            let h = 1e-5 * t;
            let fd = (m.volume(t + h) - m.volume(t - h)) / (2.0 * h);
            let exact = m.volume_rate(t);
            // Near the peak the rate itself vanishes; compare against the local volume scale.
            let scale = exact.abs().max(m.volume(t) / t * 1e-3);
            prop_assert!((exact - fd).abs() <= 1e-5 * scale, "t={} exact={} fd={}", t, exact, fd);
        }
    }
}
