//! Monte-Carlo coverage studies: data-generating mechanisms, replicate
//! execution and per-(method, p) aggregation of bias, interval width and
//! coverage.

mod dgm;
mod report;
mod scenario;

pub use dgm::{sample_dgm, true_roc, Dgm};
pub use report::{export_report, write_report, REPORT_COLUMNS};
pub use scenario::{
    curve_p_grid, run_scenario, summary_p_grid, Scenario, ScenarioRecord, ScenarioReport,
    SimMethod,
};
