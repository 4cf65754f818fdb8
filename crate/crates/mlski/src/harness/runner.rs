//! Experiment runner: executes one interpolation method over a level range,
//! measures per-level fit times, evaluates errors at a Halton point set, and
//! emits records as CSV/JSON/SVG.

use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, FullGridBuilder};
use crate::error::{Error, Result};
use crate::grids;
use crate::harness::functions::{franke2d_classic, FunctionRegistry, TestFunction};
use crate::kernels::{shape_for_level, GridFamily, KernelFamily, KernelSpec};
use crate::mlski::MultilevelBuilder;
use crate::ski::{self, DataSource, FitOptions};

/// Interpolation method under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rbf,
    Mlrbf,
    Ski,
    Mlski,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rbf => "rbf",
            Method::Mlrbf => "mlrbf",
            Method::Ski => "ski",
            Method::Mlski => "mlski",
        }
    }

    /// Grid family whose separation distances feed the shape rule.
    pub fn grid_family(&self) -> GridFamily {
        match self {
            Method::Rbf | Method::Mlrbf => GridFamily::Full,
            Method::Ski | Method::Mlski => GridFamily::Sparse,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the per-level shape parameter is chosen: a fixed user value, or the
/// separation-distance rule with constant `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeMode {
    Fixed { c: f64 },
    Rule { k: f64 },
}

/// Full description of one experiment; echoed as JSON next to the CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub kernel: KernelFamily,
    pub shape: ShapeMode,
    pub dim: usize,
    pub function: String,
    pub level_min: u32,
    pub level_max: u32,
    /// Number of Halton evaluation points.
    pub eval_count: usize,
    pub compute_condition: bool,
    /// Worker pool size used for the run (`None`: rayon default).
    pub threads: Option<usize>,
    /// Full-grid center cap for the dense baselines.
    pub center_cap: usize,
    /// Swap `franke2d` for its classical variant (first-term exponents
    /// divided by 4).
    pub classic_franke2d: bool,
}

impl ExperimentConfig {
    /// Benchmark default evaluation-point counts per dimension.
    pub fn default_eval_count(dim: usize) -> usize {
        match dim {
            1 => 1_000,
            2 => 25_600,
            3 => 125_000,
            _ => 194_481,
        }
    }
}

/// One table row: a fitted level and its error/diagnostic columns.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub method: Method,
    pub kernel: KernelFamily,
    pub shape: f64,
    pub level: u32,
    pub sgnode: usize,
    pub max_error: f64,
    pub rms_error: f64,
    pub cond_no: Option<f64>,
    pub time_level_sec: f64,
    pub time_cum_sec: f64,
}

/// A level that could not be fitted; completed rows are kept.
#[derive(Debug, Clone)]
pub struct LevelFailure {
    pub level: u32,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<LevelFailure>,
}

/// Maximum and root-mean-square error between two value vectors.
pub fn evaluate_errors(approx: &[f64], exact: &[f64]) -> Result<(f64, f64)> {
    if approx.is_empty() {
        return Err(Error::EmptyInput("no evaluation points"));
    }
    if approx.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            got: approx.len(),
        });
    }
    let mut max = 0.0f64;
    let mut sum_sq = 0.0f64;
    for (a, e) in approx.iter().zip(exact) {
        let d = (a - e).abs();
        max = max.max(d);
        sum_sq += d * d;
    }
    Ok((max, (sum_sq / approx.len() as f64).sqrt()))
}

fn resolve_function(config: &ExperimentConfig, registry: &FunctionRegistry) -> Result<TestFunction> {
    let mut f = registry
        .get(&config.function)
        .cloned()
        .ok_or_else(|| Error::UnknownFunction(config.function.clone()))?;
    if config.classic_franke2d && config.function == "franke2d" {
        f = TestFunction::new("franke2d", 2, franke2d_classic);
    }
    if f.dim() != config.dim {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: config.dim,
        });
    }
    Ok(f)
}

/// Runs one experiment level by level. Levels that fail are reported in the
/// outcome without discarding completed rows; for the multilevel methods a
/// failed level ends the cascade.
pub fn run_experiment(
    config: &ExperimentConfig,
    registry: &FunctionRegistry,
) -> Result<ExperimentOutcome> {
    if config.level_min > config.level_max {
        return Ok(ExperimentOutcome::default());
    }
    let function = resolve_function(config, registry)?;
    let d = config.dim;
    let eval_points = grids::halton_points(config.eval_count, d)?;
    let truth: Vec<f64> = eval_points
        .flat()
        .par_chunks(d)
        .map(|x| function.eval(x))
        .collect();
    let opts = FitOptions {
        compute_condition: config.compute_condition,
    };

    let shape_at = |level: u32| -> Result<f64> {
        match config.shape {
            ShapeMode::Fixed { c } => Ok(c),
            ShapeMode::Rule { k } => shape_for_level(level, d, k, config.method.grid_family()),
        }
    };

    let mut outcome = ExperimentOutcome::default();
    let mut cum_time = 0.0f64;
    let mut approx = vec![0.0f64; eval_points.len()];
    let mut ml_builder = MultilevelBuilder::new(config.level_min, d, opts);
    let mut fg_builder = FullGridBuilder::new(config.level_min, d, config.center_cap, opts);
    let target = function.as_fn();

    for level in config.level_min..=config.level_max {
        let shape = match shape_at(level) {
            Ok(s) => s,
            Err(e) => {
                outcome.failures.push(LevelFailure {
                    level,
                    message: e.to_string(),
                });
                break;
            }
        };
        let spec = match KernelSpec::new(config.kernel, shape) {
            Ok(s) => s,
            Err(e) => {
                outcome.failures.push(LevelFailure {
                    level,
                    message: e.to_string(),
                });
                break;
            }
        };

        let mut record = RunRecord {
            method: config.method,
            kernel: config.kernel,
            shape,
            level,
            sgnode: 0,
            max_error: 0.0,
            rms_error: 0.0,
            cond_no: None,
            time_level_sec: 0.0,
            time_cum_sec: 0.0,
        };

        let level_result: Result<()> = match config.method {
            Method::Mlski => ml_builder.add_level(&target, spec).map(|report| {
                record.sgnode = report.node_count;
                record.cond_no = report.max_condition;
                record.time_level_sec = report.fit_time;
            }),
            Method::Ski => {
                let started = Instant::now();
                ski::ski_fit(level, d, &DataSource::Function(&target), spec, opts).map(|interp| {
                    record.time_level_sec = started.elapsed().as_secs_f64();
                    record.sgnode = interp.data_node_count();
                    record.cond_no = interp.max_condition();
                    let values = ski::ski_eval(&interp, &eval_points)
                        .expect("evaluation dimension fixed by the fit");
                    approx.copy_from_slice(&values);
                })
            }
            Method::Mlrbf => {
                let added = fg_builder
                    .add_level(&target, spec)
                    .map(|interp| (interp.centers().len(), interp.report().condition_2norm));
                added.map(|(sgnode, cond_no)| {
                    record.sgnode = sgnode;
                    record.cond_no = cond_no;
                    record.time_level_sec = *fg_builder.fit_times().last().unwrap();
                })
            }
            Method::Rbf => {
                let started = Instant::now();
                baselines::rbf_fit(level, d, &target, spec, config.center_cap, opts).map(
                    |interp| {
                        record.time_level_sec = started.elapsed().as_secs_f64();
                        record.sgnode = interp.centers().len();
                        record.cond_no = interp.report().condition_2norm;
                        let values = baselines::rbf_eval(&interp, &eval_points)
                            .expect("evaluation dimension fixed by the fit");
                        approx.copy_from_slice(&values);
                    },
                )
            }
        };

        match level_result {
            Ok(()) => {
                // multilevel methods accumulate the newest correction into
                // the running approximation (kept out of the timed section)
                match config.method {
                    Method::Mlski => {
                        let delta = ml_builder.corrections().last().unwrap();
                        let values = ski::ski_eval(delta, &eval_points)
                            .expect("evaluation dimension fixed by the fit");
                        for (a, v) in approx.iter_mut().zip(&values) {
                            *a += v;
                        }
                    }
                    Method::Mlrbf => {
                        let delta = fg_builder.corrections().last().unwrap();
                        let values = baselines::rbf_eval(delta, &eval_points)
                            .expect("evaluation dimension fixed by the fit");
                        for (a, v) in approx.iter_mut().zip(&values) {
                            *a += v;
                        }
                    }
                    _ => {}
                }
                cum_time += record.time_level_sec;
                record.time_cum_sec = cum_time;
                let (max_error, rms_error) = evaluate_errors(&approx, &truth)?;
                record.max_error = max_error;
                record.rms_error = rms_error;
                outcome.records.push(record);
            }
            Err(e) => {
                outcome.failures.push(LevelFailure {
                    level,
                    message: e.to_string(),
                });
                match config.method {
                    // residual cascades cannot continue past a failed level
                    Method::Mlski | Method::Mlrbf => break,
                    Method::Ski | Method::Rbf => continue,
                }
            }
        }
    }

    Ok(outcome)
}

/// CSV schema shared by the CLI and the test harness.
pub const CSV_HEADER: &str =
    "method,kernel,shape,level,sgnode,max_error,rms_error,cond_no,time_level_sec,time_cum_sec";

fn format_cond(cond: Option<f64>) -> String {
    match cond {
        Some(v) if v.is_finite() => format!("{v:.6e}"),
        Some(_) => "inf".to_string(),
        None => String::new(),
    }
}

pub fn csv_rows(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6e},{:.6e},{},{:.6},{:.6}\n",
            r.method,
            r.kernel,
            r.shape,
            r.level,
            r.sgnode,
            r.max_error,
            r.rms_error,
            format_cond(r.cond_no),
            r.time_level_sec,
            r.time_cum_sec,
        ));
    }
    out
}

/// Writes the per-level records as CSV.
pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(csv_rows(records).as_bytes())?;
    Ok(())
}

/// Writes the experiment configuration as pretty JSON (reproducibility
/// echo alongside the CSV).
pub fn write_config_json(path: &Path, config: &ExperimentConfig) -> Result<()> {
    let json = serde_json::to_string_pretty(config)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::Other, e))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Fixed-width text table mirroring the benchmark table layout.
pub fn format_table(records: &[RunRecord]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>5} {:>8} {:>13} {:>13} {:>12} {:>12} {:>12}\n",
        "level", "SGnode", "Max-error", "RMS-error", "Cond. no", "Time (s)", "Cum (s)"
    ));
    for r in records {
        out.push_str(&format!(
            "{:>5} {:>8} {:>13.4e} {:>13.4e} {:>12} {:>12.3} {:>12.3}\n",
            r.level,
            r.sgnode,
            r.max_error,
            r.rms_error,
            format_cond(r.cond_no),
            r.time_level_sec,
            r.time_cum_sec,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            method: Method::Mlski,
            kernel: KernelFamily::Gaussian,
            shape: ShapeMode::Fixed { c: 0.45 },
            dim: 2,
            function: "franke2d".to_string(),
            level_min: 1,
            level_max: 3,
            eval_count: 500,
            compute_condition: false,
            threads: None,
            center_cap: baselines::DEFAULT_CENTER_CAP,
            classic_franke2d: false,
        }
    }

    #[test]
    fn evaluate_errors_examples() {
        let (max, rms) = evaluate_errors(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert_eq!(max, 4.0);
        assert!((rms - 12.5f64.sqrt()).abs() < 1e-15);

        let (max, rms) = evaluate_errors(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((max, rms), (0.0, 0.0));

        assert!(evaluate_errors(&[], &[]).is_err());
    }

    #[test]
    fn rms_never_exceeds_max() {
        let registry = FunctionRegistry::with_builtins();
        let outcome = run_experiment(&small_config(), &registry).unwrap();
        assert!(!outcome.records.is_empty());
        for r in &outcome.records {
            assert!(r.rms_error <= r.max_error + 1e-18);
        }
    }

    #[test]
    fn empty_level_range_gives_empty_records() {
        let mut config = small_config();
        config.level_min = 4;
        config.level_max = 3;
        let registry = FunctionRegistry::with_builtins();
        let outcome = run_experiment(&config, &registry).unwrap();
        assert!(outcome.records.is_empty());
        assert!(outcome.failures.is_empty());
    }

    #[test]
    fn unknown_function_is_a_config_error() {
        let mut config = small_config();
        config.function = "does-not-exist".to_string();
        let registry = FunctionRegistry::with_builtins();
        assert!(matches!(
            run_experiment(&config, &registry),
            Err(Error::UnknownFunction(_))
        ));
    }

    #[test]
    fn reruns_are_reproducible_apart_from_times() {
        let registry = FunctionRegistry::with_builtins();
        let a = run_experiment(&small_config(), &registry).unwrap();
        let b = run_experiment(&small_config(), &registry).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.max_error.to_bits(), y.max_error.to_bits());
            assert_eq!(x.rms_error.to_bits(), y.rms_error.to_bits());
            assert_eq!(x.sgnode, y.sgnode);
        }
    }

    #[test]
    fn csv_row_count_matches_completed_levels() {
        let registry = FunctionRegistry::with_builtins();
        let outcome = run_experiment(&small_config(), &registry).unwrap();
        let csv = csv_rows(&outcome.records);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len() - 1, outcome.records.len());
        assert_eq!(outcome.records.len(), 3);
    }

    #[test]
    fn rbf_cap_failure_keeps_completed_rows() {
        let mut config = small_config();
        config.method = Method::Rbf;
        config.shape = ShapeMode::Fixed { c: 6.0 };
        config.level_max = 4;
        config.center_cap = 100; // levels 1..2 fit (9, 25, 81), level 4 (289) fails
        let registry = FunctionRegistry::with_builtins();
        let outcome = run_experiment(&config, &registry).unwrap();
        assert_eq!(outcome.records.len(), 3);
        assert_eq!(outcome.failures.len(), 1);
        assert_eq!(outcome.failures[0].level, 4);
    }

    #[test]
    fn mlski_rows_carry_sparse_grid_counts() {
        let registry = FunctionRegistry::with_builtins();
        let outcome = run_experiment(&small_config(), &registry).unwrap();
        let counts: Vec<usize> = outcome.records.iter().map(|r| r.sgnode).collect();
        assert_eq!(counts, vec![9, 21, 49]);
    }

    #[test]
    fn config_json_round_trips() {
        let config = small_config();
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.function, config.function);
        assert_eq!(back.method, config.method);
        assert!(matches!(back.shape, ShapeMode::Fixed { c } if c == 0.45));
    }
}
