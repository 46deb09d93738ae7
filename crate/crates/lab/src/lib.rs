//! Experiment harness for `prophet-core`: instance and report formats,
//! fixed corpora, single experiments, threshold scans and the reproduction
//! suites behind the `prophet` command.

pub mod corpus;
pub mod experiment;
pub mod formats;
pub mod scan;
pub mod suites;

pub use experiment::{run_experiment, Algorithm, ExperimentReport, ExperimentSpec, GeneratorSpec, InstanceSource, OracleMode};
pub use scan::{scan_thresholds, ScanPoints};
pub use suites::{reproduce, CheckRow, SuiteOptions, SuiteReport, Verdict, SUITES};
