//! Scenario files, the simulation loop, metrics and export.

pub mod export;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod suite;
pub mod svg;

pub use export::{export_csv, to_csv};
pub use metrics::{compute_metrics, CrossingMetrics};
pub use scenario::{Condition, Scenario};
pub use sim::{run_scenario, simulate, Outcome, SimTrace, TraceRow};
pub use suite::{run_condition_suite, SuiteReport};
pub use svg::render_svg;
