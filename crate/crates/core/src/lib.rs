//! Boolean operator tendency analysis for multivariate binary data.
//!
//! Explanatory variables are joined into a model template with `and`/`or`
//! slots. Operators are assigned to every slot across many trials, each trial
//! is labelled faithful when the resulting Boolean function reproduces the
//! outcome, and the per-slot operator frequencies among faithful trials
//! reveal which operator the data favour. The resolved function then turns
//! a multivariate problem back into a single 2x2 contingency table.
//!
//! ```
//! use bmcm::{data, expr::enumerate_models, pipeline};
//!
//! let cohort = data::generate_dependent(1000, 7).unwrap();
//! let models = enumerate_models(&["x1", "x2", "x3"], "xO").unwrap();
//! let report = pipeline::run_full(&cohort, &models, &pipeline::AnalysisConfig::default()).unwrap();
//! assert!(report.null.gate_passed);
//! ```

pub mod cli;
pub mod data;
pub mod engine;
pub mod error;
pub mod expr;
pub mod pipeline;
pub mod stats;

pub use data::Dataset;
pub use engine::{SlotDecision, SlotTally, TrialMode};
pub use error::{BmcmError, Result};
pub use expr::{ModelTemplate, Operator, OperatorAssignment};
pub use pipeline::{AnalysisConfig, AnalysisReport};
pub use stats::{Table2x2, TestResult};
