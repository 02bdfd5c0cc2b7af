//! Configuration, sweeps, fits and report files.

pub mod config;
pub mod fit;
pub mod report;
pub mod scenarios;

pub use config::{Scenario, SweepConfig, Tolerances};
pub use fit::{fit_exponential, FitOutcome, FitResult};
pub use report::{Report, Table, Verdict};
pub use scenarios::{compare_scenarios, default_workers, run_scenario};
