//! Example geometries, verification suites, and classification reports.

pub mod examples;
pub mod report;
pub mod verify;

pub use examples::{build_example, grid_points, random_points, Example, ExampleName, ExampleSpec};
pub use report::{run_report, to_json, PointRecord, Report, RunOptions};
pub use verify::{run_all_suites, SuiteResult};
