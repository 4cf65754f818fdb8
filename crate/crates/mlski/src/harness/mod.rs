//! Benchmark harness: test-function registry, error metrics, experiment
//! runner, and table/plot emission.

pub mod functions;
pub mod runner;
pub mod svg;

pub use functions::{FunctionRegistry, TestFunction};
pub use runner::{
    evaluate_errors, run_experiment, ExperimentConfig, ExperimentOutcome, LevelFailure, Method,
    RunRecord, ShapeMode,
};
