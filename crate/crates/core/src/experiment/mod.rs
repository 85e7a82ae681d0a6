//! Config-driven experiment runs with CSV/JSON artifacts and pass/fail
//! summaries.

mod config;
mod report;
mod run;

pub use config::{
    BakerSection, ExperimentConfig, ExperimentKind, GridSection, PacketSpec, ScheduleSection, StateSection,
    StateSource, Thresholds, WalshSection,
};
pub use report::{
    build_report, emit_report, CheckResult, Comparison, Report, ReportEntry, RunSummary, Status, TOOL_VERSION,
};
pub use run::{run, RunOptions};
