//! JSON run configuration; command-line flags override its fields.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::ChainConfig;
use crate::current_age::CurrentAgeConfig;
use crate::error::{Result, RotationError};
use crate::growth::GrowthModel;
use crate::oracle::OracleConfig;
use crate::pricing::EconParams;
use crate::sweep::SweepGrid;

/// ```json
/// {
///   "forest": "boreal",
///   "econ": { "p_f": 50, "p_c": 40, "rho": 0.01, "r": 0.05, "beta": 0 },
///   "chain": { "n_equations": 4, "t_cap": 200 },
///   "oracle": { "coarse_step": 1.0, "passes": 3 },
///   "grid": { "pc_axis": [0, 50, 100], "rho_axis": [0, 0.01], "quantity": "first_rotation" }
/// }
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Built-in model name, used when `growth` is absent.
    pub forest: Option<String>,
    /// Custom growth model; also available to sweeps under its name.
    pub growth: Option<GrowthModel>,
    pub econ: EconParams,
    pub chain: ChainConfig,
    /// Overrides `chain.oracle` when present.
    pub oracle: Option<OracleConfig>,
    pub grid: SweepGrid,
    pub current_age: CurrentAgeConfig,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| RotationError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RotationError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Chain settings with the oracle section applied.
    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            oracle: self.oracle.unwrap_or(self.chain.oracle),
            ..self.chain
        }
    }

    /// Model for single-scenario verbs; coastal when nothing is given.
    pub fn model(&self) -> Result<GrowthModel> {
        match (&self.growth, &self.forest) {
            (Some(g), _) => {
                g.validate()?;
                Ok(g.clone())
            }
            (None, Some(name)) => GrowthModel::builtin(name),
            (None, None) => Ok(GrowthModel::coastal()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model()?;
        self.econ.validate()?;
        self.chain_config().validate()?;
        self.current_age.validate()?;
        if self.workers == Some(0) {
            return Err(RotationError::Config("workers must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_sections() {
        let c = RunConfig::from_json_str(
            r#"{"forest": "boreal", "econ": {"p_c": 40, "rho": 0.01}, "chain": {"t_cap": 150},
                "oracle": {"passes": 2}, "grid": {"pc_axis": [0, 10], "quantity": "land_value"}}"#,
        )
        .unwrap();
        assert_eq!(c.model().unwrap().name, "boreal");
        assert_eq!(c.econ.p_c, 40.0);
        assert_eq!(c.econ.p_f, 50.0);
        assert_eq!(c.chain_config().t_cap, 150.0);
        assert_eq!(c.chain_config().oracle.passes, 2);
        assert_eq!(c.grid.pc_axis, vec![0.0, 10.0]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn custom_growth_model() {
        let c = RunConfig::from_json_str(r#"{"growth": {"name": "toy", "k": 1, "a": 2, "b": -0.01, "alpha": 0.2}}"#).unwrap();
        assert_eq!(c.model().unwrap().peak_volume_age(), 200.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_json_str(r#"{"econom": {}}"#).is_err());
        let c = RunConfig::from_json_str(r#"{"econ": {"rho": 0.06}}"#).unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_json_str(r#"{"forest": "tundra"}"#).unwrap();
        assert!(c.validate().is_err());
    }
}
