//! Named experiments, seeded runs and CSV logging.

pub mod catalog;
pub mod log;
pub mod report;
pub mod run;

pub use catalog::{catalog, find, Budget, ExperimentSpec};
pub use log::{read_log, LogRow};
pub use report::{final_summary, penalty_report, Penalty};
pub use run::{run_experiment, ExperimentResult};
