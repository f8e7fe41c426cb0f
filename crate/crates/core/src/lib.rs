//! Optimal even-aged forest rotations when carbon sequestration is paid for
//! and the carbon price grows exponentially.
//!
//! The crate values rotation schedules, solves the chained first-order
//! conditions for the optimal first rotation, cross-checks them with a direct
//! derivative-free maximizer and sweeps price scenarios into CSV tables.

pub mod chain;
pub mod config;
pub mod contour;
pub mod current_age;
pub mod error;
pub mod foc;
pub mod growth;
pub mod oracle;
pub mod pricing;
pub mod quadrature;
pub mod sweep;
pub mod validate;
pub mod valuation;

pub use chain::{solve_chain, terminal_sensitivity, ChainConfig, ChainSolver, Classification, SolveReport};
pub use config::RunConfig;
pub use contour::{emit_isocurves, Polyline};
pub use current_age::{current_harvest_age, AgeStatus, CurrentAgeConfig, CurrentAgeResult};
pub use error::{Result, RotationError};
pub use foc::{
    constant_price_residual, faustmann_age, faustmann_residual, foc_residual, stationary_rotation, FocPair,
};
pub use growth::GrowthModel;
pub use oracle::{detect_no_harvest, maximize_schedule, OracleConfig, OracleResult};
pub use pricing::{carbon_price_at, discounted_growth_integral, EconParams};
pub use sweep::{run_sweep, Quantity, SweepCell, SweepGrid, SweepOptions, SweepSummary};
pub use validate::{oracle_agreement, AgreementReport};
pub use valuation::{land_value, rotation_cash_value, schedule_npv, LandValue, RotationSchedule, Valuator};
