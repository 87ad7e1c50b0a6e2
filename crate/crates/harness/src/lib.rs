//! Scenario runner, stability comparisons, expected tables and reports for
//! the Loday homology engine.

pub mod error;
pub mod golden;
pub mod run;
pub mod scenario;
pub mod stability;

pub use error::{HarnessError, Result};
pub use run::{compute_report, run_scenario, Report, RunOptions, RunOutcome, Verdict};
pub use scenario::Scenario;
pub use stability::{stability_compare, StabilityReport};
