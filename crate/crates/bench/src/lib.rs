//! Scenario-driven benchmarks for the roadmap revalidation engines.
//!
//! A scenario file describes the environment, robot, roadmap, obstacles and
//! move script. [`run_scenario`] replays it through one or both engines and
//! returns a [`Report`] with one row per move and engine.

pub mod error;
pub mod quality;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{BenchError, Result};
pub use quality::{classification_quality, QualitySummary};
pub use report::{emit_report, Format, Report, Row};
pub use run::{build_bundle, load_bundle, run_prepared, run_scenario, Prepared};
pub use scenario::{EngineChoice, Mode, Scenario};
