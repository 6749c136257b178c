//! Feature selection as functional dependence.
//!
//! * [`dependence`]: exact functionality domains, minimal-selection solvers,
//!   structural property checks, proxy sets, and fANOVA on finite grids.
//! * [`taskgen`]: synthetic binary tasks with unique instance-wise
//!   ground-truth selections, built from superposed, eroded hypercubes.
//! * [`oracle`]: the analytic Gaussian-mixture view of a task (subset
//!   posteriors, gradients, sampling) and the regression-side relaxation.
//! * [`methods`]: attribution methods driven by the oracle.
//! * [`eval`]: threshold tuning, scoring, and report aggregation.
//! * [`cli`]: the `gen` / `tune` / `run` front end.

pub mod cli;
pub mod dependence;
pub mod error;
pub mod eval;
pub mod methods;
pub mod oracle;
pub mod seed;
pub mod subset;
pub mod taskgen;

pub use error::{Error, Result};
pub use subset::FeatureSet;
