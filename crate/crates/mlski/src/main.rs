//! Benchmark CLI for the sparse and full-grid kernel interpolation methods.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mlski::baselines::DEFAULT_CENTER_CAP;
use mlski::grids;
use mlski::harness::{self, runner, ExperimentConfig, FunctionRegistry, Method, ShapeMode};
use mlski::kernels::KernelFamily;

#[derive(Parser)]
#[command(
    name = "mlski",
    version,
    about = "Sparse and multilevel kernel interpolation benchmarks on [0,1]^d"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment over a level range and report per-level errors.
    Run(RunArgs),
    /// Export a sparse or full grid point set as CSV (one point per row).
    Grid(GridArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Rbf,
    Mlrbf,
    Ski,
    Mlski,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rbf => Method::Rbf,
            MethodArg::Mlrbf => Method::Mlrbf,
            MethodArg::Ski => Method::Ski,
            MethodArg::Mlski => Method::Mlski,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Wendland32,
    Imq,
}

impl From<KernelArg> for KernelFamily {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Gaussian => KernelFamily::Gaussian,
            KernelArg::Wendland32 => KernelFamily::Wendland32,
            KernelArg::Imq => KernelFamily::InverseMultiquadric,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    method: MethodArg,

    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,

    /// Fixed shape parameter c (overrides the separation-distance rule).
    #[arg(long, conflicts_with = "k")]
    shape: Option<f64>,

    /// Constant K of the separation-distance shape rule (default 3 when no
    /// --shape is given).
    #[arg(long = "K")]
    k: Option<f64>,

    #[arg(long)]
    dim: usize,

    /// Target function name from the registry.
    #[arg(long)]
    function: String,

    /// Coarsest level (multilevel methods start here).
    #[arg(long, default_value_t = 1)]
    level_min: u32,

    /// Finest level.
    #[arg(long)]
    level_max: u32,

    /// Evaluation point set, e.g. `halton:25600`. Defaults per dimension to
    /// halton:1000 (d=1), 25600 (d=2), 125000 (d=3), 194481 (d=4).
    #[arg(long)]
    eval: Option<String>,

    /// Compute the 2-norm condition number of every kernel system.
    #[arg(long = "cond")]
    compute_condition: bool,

    /// CSV output path; the configuration is echoed as JSON alongside it.
    #[arg(long)]
    out: Option<PathBuf>,

    /// SVG plot output path (RMS vs centers and vs cumulative time).
    #[arg(long)]
    plot: Option<PathBuf>,

    /// Worker pool size (default: one thread per core).
    #[arg(long)]
    threads: Option<usize>,

    /// Full-grid center cap for the dense baselines.
    #[arg(long, default_value_t = DEFAULT_CENTER_CAP)]
    center_cap: usize,

    /// Use the classical Franke 2D variant (first-term exponents divided
    /// by 4) instead of the default transcription.
    #[arg(long)]
    classic_franke2d: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    dim: usize,

    #[arg(long)]
    level: u32,

    /// Export the full grid instead of the sparse grid.
    #[arg(long)]
    full: bool,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_eval_count(spec: Option<&str>, dim: usize) -> Result<usize, String> {
    match spec {
        None => Ok(ExperimentConfig::default_eval_count(dim)),
        Some(s) => {
            let rest = s
                .strip_prefix("halton:")
                .ok_or_else(|| format!("unsupported eval spec `{s}`, expected halton:<count>"))?;
            rest.parse::<usize>()
                .map_err(|e| format!("bad halton count `{rest}`: {e}"))
        }
    }
}

fn run(args: RunArgs) -> i32 {
    let eval_count = match parse_eval_count(args.eval.as_deref(), args.dim) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let shape = match (args.shape, args.k) {
        (Some(c), _) => ShapeMode::Fixed { c },
        (None, Some(k)) => ShapeMode::Rule { k },
        (None, None) => ShapeMode::Rule { k: 3.0 },
    };
    let config = ExperimentConfig {
        method: args.method.into(),
        kernel: args.kernel.into(),
        shape,
        dim: args.dim,
        function: args.function.clone(),
        level_min: args.level_min,
        level_max: args.level_max,
        eval_count,
        compute_condition: args.compute_condition,
        threads: args.threads,
        center_cap: args.center_cap,
        classic_franke2d: args.classic_franke2d,
    };

    let registry = FunctionRegistry::with_builtins();
    let run_it = || harness::run_experiment(&config, &registry);
    let outcome = match args.threads {
        Some(t) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: cannot build a {t}-thread pool: {e}");
                    return 1;
                }
            };
            pool.install(run_it)
        }
        None => run_it(),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    println!(
        "# method={} kernel={} shape={} dim={} function={} eval=halton:{}",
        config.method,
        config.kernel,
        match config.shape {
            ShapeMode::Fixed { c } => format!("c={c}"),
            ShapeMode::Rule { k } => format!("K={k}"),
        },
        config.dim,
        config.function,
        config.eval_count
    );
    print!("{}", runner::format_table(&outcome.records));
    for failure in &outcome.failures {
        eprintln!("level {} failed: {}", failure.level, failure.message);
    }

    if let Some(csv_path) = &args.out {
        if let Err(e) = runner::write_csv(csv_path, &outcome.records) {
            eprintln!("error: cannot write {}: {e}", csv_path.display());
            return 1;
        }
        let json_path = csv_path.with_extension("json");
        if let Err(e) = runner::write_config_json(&json_path, &config) {
            eprintln!("error: cannot write {}: {e}", json_path.display());
            return 1;
        }
    }
    if let Some(svg_path) = &args.plot {
        if let Err(e) = harness::svg::write_svg(svg_path, &outcome.records) {
            eprintln!("error: cannot write {}: {e}", svg_path.display());
            return 1;
        }
    }

    if outcome.failures.is_empty() {
        0
    } else if outcome.records.is_empty() {
        1
    } else {
        2
    }
}

fn grid(args: GridArgs) -> i32 {
    let points = if args.full {
        grids::full_grid(args.level, args.dim).map(|g| g.into_points())
    } else {
        grids::sparse_grid(args.level, args.dim).map(|g| g.into_points())
    };
    let points = match points {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut body = String::new();
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{body}"),
    }
    0
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(args),
        Command::Grid(args) => grid(args),
    };
    std::process::exit(code);
}
