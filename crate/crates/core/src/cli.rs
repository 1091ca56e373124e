//! The `lvrlab` command line: `simulate`, `converge` and `depth`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::write_lvr_table;
use crate::arb_engine::{convergence_study, run_experiment, ExecutionPriceConvention};
use crate::book_depth::{estimate_slope, parse_snapshot_path, DEFAULT_WINDOW_BPS, SLOPE_REPORT_HEADER};
use crate::config::{ExperimentConfig, Overrides};
use crate::error::Error;
use crate::price_dynamics::{path_seed, sample_path};
use crate::report::{
    lvr_table_row, sha256_hex, write_convergence, write_fits, write_summary, OutputFile, RunManifest,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lvrlab", version, about = "LVR between two imperfectly liquid venues")]
pub struct Cli {
    /// Worker threads for path simulation (default: all cores)
    #[arg(long, env = "LVRLAB_THREADS", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one Monte-Carlo experiment and write summary.csv + manifest.json
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Repeat an experiment over several step counts
    #[command(allow_negative_numbers = true)]
    Converge(ConvergeArgs),
    /// Estimate marginal-liquidity slopes from order-book snapshots
    Depth(DepthArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML experiment config; built-in defaults when omitted
    #[arg(long, short)]
    pub config: Option<PathBuf>,

    /// Replay the configuration recorded in a previous run's manifest.json
    #[arg(long, conflicts_with = "config")]
    pub from_manifest: Option<PathBuf>,

    /// Output directory
    #[arg(long, short, default_value = "lvrlab-out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub overrides: OverrideArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    PreviousPrice,
    NewPrice,
}

impl From<ConventionArg> for ExecutionPriceConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::PreviousPrice => ExecutionPriceConvention::PreviousPrice,
            ConventionArg::NewPrice => ExecutionPriceConvention::NewPrice,
        }
    }
}

/// Per-field overrides of the config file.
#[derive(Debug, Args, Default)]
pub struct OverrideArgs {
    /// Initial price [default: 1]
    #[arg(long)]
    pub q0: Option<f64>,
    /// Volatility per √time unit [default: 0.2]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Horizon T [default: 1]
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Grid steps N [default: 1000]
    #[arg(long)]
    pub steps_per_path: Option<usize>,
    /// Monte-Carlo paths [default: 1000]
    #[arg(long)]
    pub paths: Option<usize>,
    /// Master seed [default: 42]
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Execution price of each step [default: new-price]
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Pool curve kind: cpmm | tabulated [default: cpmm]
    #[arg(long)]
    pub illiquid_kind: Option<String>,
    /// Pool CPMM root K [default: 1]
    #[arg(long)]
    pub illiquid_k: Option<f64>,
    /// Pool curve table (`Q,x_star`)
    #[arg(long)]
    pub illiquid_csv: Option<PathBuf>,
    /// Pool numéraire reserves at the table's lowest price [default: 0]
    #[arg(long)]
    pub illiquid_y_at_min: Option<f64>,
    /// Liquid venue kind: infinite | fixed_slope | cpmm | tabulated [default: infinite]
    #[arg(long)]
    pub liquid_kind: Option<String>,
    /// Liquid venue CPMM root
    #[arg(long)]
    pub liquid_k: Option<f64>,
    /// Liquid venue fixed |x̃*'|
    #[arg(long)]
    pub liquid_slope: Option<f64>,
    /// Liquid venue table (`Q,x_star`)
    #[arg(long)]
    pub liquid_csv: Option<PathBuf>,
    /// Liquid venue numéraire reserves at the table's lowest price [default: 0]
    #[arg(long)]
    pub liquid_y_at_min: Option<f64>,
    /// Cost model: frictionless | quadratic | cpmm_exact | piecewise [default: quadratic]
    #[arg(long)]
    pub cost_kind: Option<String>,
    /// Piecewise constant marginal cost c
    #[arg(long)]
    pub cost_c: Option<f64>,
    /// Piecewise threshold α
    #[arg(long)]
    pub cost_alpha: Option<f64>,
    /// Piecewise slope of the linear branch
    #[arg(long)]
    pub cost_slope: Option<f64>,
}

impl From<&OverrideArgs> for Overrides {
    fn from(a: &OverrideArgs) -> Self {
        Overrides {
            q0: a.q0,
            sigma: a.sigma,
            horizon: a.horizon,
            steps: a.steps_per_path,
            paths: a.paths,
            master_seed: a.master_seed,
            convention: a.convention.map(Into::into),
            illiquid_kind: a.illiquid_kind.clone(),
            illiquid_k: a.illiquid_k,
            illiquid_csv: a.illiquid_csv.clone(),
            illiquid_y_at_min: a.illiquid_y_at_min,
            liquid_kind: a.liquid_kind.clone(),
            liquid_k: a.liquid_k,
            liquid_slope: a.liquid_slope,
            liquid_csv: a.liquid_csv.clone(),
            liquid_y_at_min: a.liquid_y_at_min,
            cost_kind: a.cost_kind.clone(),
            cost_c: a.cost_c,
            cost_alpha: a.cost_alpha,
            cost_slope: a.cost_slope,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,

    /// Also dump the first N price paths as `t,Q` CSV under traces/
    #[arg(long, default_value_t = 0)]
    pub traces: usize,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub config: ConfigArgs,

    /// Step counts to compare, e.g. 100,1000,10000
    #[arg(long, value_delimiter = ',')]
    pub steps: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    /// Snapshot CSV files (`side,price,size`)
    #[arg(required = true)]
    pub snapshots: Vec<PathBuf>,

    /// Half-width of the regression window around mid, in basis points
    #[arg(long, default_value_t = DEFAULT_WINDOW_BPS)]
    pub window_bps: f64,
}

/// A failure tagged with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: format!("config error: {e}"),
    }
}

fn runtime_err(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: format!("error: {e}"),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Converge(args) => converge(args),
        Command::Depth(args) => depth(args),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}

struct Resolved {
    config: ExperimentConfig,
    manifest: Option<RunManifest>,
}

fn resolve_config(args: &ConfigArgs) -> Result<Resolved, Failure> {
    let (mut config, manifest) = match (&args.config, &args.from_manifest) {
        (Some(path), _) => (ExperimentConfig::load(path).map_err(config_err)?, None),
        (None, Some(path)) => {
            let m = RunManifest::load(path).map_err(config_err)?;
            (m.config.clone(), Some(m))
        }
        (None, None) => (ExperimentConfig::default(), None),
    };
    Overrides::from(&args.overrides)
        .apply(&mut config)
        .map_err(config_err)?;
    Ok(Resolved { config, manifest })
}

fn write_output(out_dir: &Path, name: &str, bytes: &[u8], outputs: &mut Vec<OutputFile>) -> Result<(), Failure> {
    let path = out_dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| runtime_err(format!("{}: {e}", parent.display())))?;
    }
    fs::write(&path, bytes).map_err(|e| runtime_err(format!("{}: {e}", path.display())))?;
    outputs.push(OutputFile {
        file: name.to_string(),
        sha256: sha256_hex(bytes),
    });
    Ok(())
}

fn write_manifest(out_dir: &Path, manifest: &RunManifest) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(manifest).map_err(runtime_err)?;
    let path = out_dir.join("manifest.json");
    fs::write(&path, text + "\n").map_err(|e| runtime_err(format!("{}: {e}", path.display())))
}

fn simulate(args: SimulateArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let Resolved { config, .. } = resolve_config(&args.config)?;
    let sim = config.to_sim_config().map_err(config_err)?;
    let summary = run_experiment(&sim).map_err(runtime_err)?;

    let out_dir = &args.config.out;
    let mut outputs = Vec::new();
    let mut buf = Vec::new();
    write_summary(&summary, &mut buf).map_err(runtime_err)?;
    write_output(out_dir, "summary.csv", &buf, &mut outputs)?;
    print!("{}", String::from_utf8_lossy(&buf));

    if let Some(row) = lvr_table_row(&sim, &summary) {
        let mut buf = Vec::new();
        write_lvr_table(&[row], &mut buf).map_err(runtime_err)?;
        write_output(out_dir, "lvr_table.csv", &buf, &mut outputs)?;
    }
    for i in 0..args.traces.min(sim.paths) {
        let path = sample_path(&sim.gbm, path_seed(sim.master_seed, i as u64)).map_err(runtime_err)?;
        let mut buf = Vec::new();
        path.write_csv(&mut buf).map_err(runtime_err)?;
        write_output(out_dir, &format!("traces/path_{i:05}.csv"), &buf, &mut outputs)?;
    }

    write_manifest(
        out_dir,
        &RunManifest {
            tool: "lvrlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: "simulate".into(),
            master_seed: config.run.master_seed,
            config,
            steps: None,
            traces: args.traces,
            wall_clock_secs: started.elapsed().as_secs_f64(),
            outputs,
        },
    )?;
    Ok(EXIT_OK)
}

fn converge(args: ConvergeArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let Resolved { config, manifest } = resolve_config(&args.config)?;
    let steps = if args.steps.is_empty() {
        manifest.and_then(|m| m.steps).unwrap_or_default()
    } else {
        args.steps.clone()
    };
    if steps.len() < 2 {
        return Err(config_err(Error::invalid("steps", "need at least two step counts")));
    }
    if steps.contains(&0) {
        return Err(config_err(Error::invalid("steps", "step counts must be positive")));
    }
    let sim = config.to_sim_config().map_err(config_err)?;
    let table = convergence_study(&sim, &steps).map_err(runtime_err)?;

    let out_dir = &args.config.out;
    let mut outputs = Vec::new();
    let mut buf = Vec::new();
    write_convergence(&table, &mut buf).map_err(runtime_err)?;
    write_output(out_dir, "convergence.csv", &buf, &mut outputs)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let mut buf = Vec::new();
    write_fits(&table, &mut buf).map_err(runtime_err)?;
    write_output(out_dir, "fits.csv", &buf, &mut outputs)?;
    print!("{}", String::from_utf8_lossy(&buf));

    write_manifest(
        out_dir,
        &RunManifest {
            tool: "lvrlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: "converge".into(),
            master_seed: config.run.master_seed,
            config,
            steps: Some(steps),
            traces: 0,
            wall_clock_secs: started.elapsed().as_secs_f64(),
            outputs,
        },
    )?;
    Ok(EXIT_OK)
}

fn depth(args: DepthArgs) -> Result<i32, Failure> {
    if !(args.window_bps.is_finite() && args.window_bps > 0.0) {
        return Err(config_err(Error::invalid("window_bps", "must be positive")));
    }
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for path in &args.snapshots {
        match parse_snapshot_path(path).and_then(|book| estimate_slope(&book, args.window_bps)) {
            Ok(est) => rows.push(est.report_row()),
            Err(e) => errors.push(format!("{}: {e}", path.display())),
        }
    }
    if !rows.is_empty() {
        println!("{SLOPE_REPORT_HEADER}");
        for r in &rows {
            println!("{r}");
        }
    }
    if !errors.is_empty() {
        eprintln!("errors:");
        for e in &errors {
            eprintln!("  {e}");
        }
    }
    Ok(if rows.is_empty() { EXIT_RUNTIME } else { EXIT_OK })
}
