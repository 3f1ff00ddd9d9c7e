//! `levycov` command-line front end.
//!
//! Every subcommand builds a [`ConfigFile`] from `--config` and overlays the
//! command-line flags on top of it, then writes CSV files into `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};

use levycov::estimator::{bound_curves, evaluate_grid};
use levycov::harness::{
    read_increments, reference_model, run_figure_experiment, run_oracle_start_experiment, run_property_suite,
    write_aggregates, write_bound_curves, write_cf_curves, write_grid_rows, write_increments, write_property_report,
    write_selections, write_summary, write_trace, ConfigFile, CsvOptions, ExperimentRecord, Mode,
};
use levycov::{adaptive_estimate_with, simulate_increments, IncrementSample, SelectionMethod, SimulationConfig};

#[derive(Parser)]
#[command(
    name = "levycov",
    version,
    about = "Covariance estimation for bivariate Lévy processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate increments of the configured model.
    Simulate(Common),
    /// Evaluate the estimator and its bounds over the grid.
    Estimate(DataArgs),
    /// Choose `U` from data and report the selection trace.
    Select(SelectArgs),
    /// Estimate curves over many seeds.
    Figure(Common),
    /// Adaptive estimation at two sample sizes.
    OracleStart(OracleArgs),
    /// Monte Carlo checks of the high-probability bounds.
    Properties(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of consecutive seeds.
    #[arg(long)]
    seeds: Option<usize>,
    /// First seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Log-spaced grid (`true`) or linear grid (`false`).
    #[arg(long, action = ArgAction::Set)]
    grid_log: Option<bool>,
    /// Oracle start level.
    #[arg(long)]
    c: Option<f64>,
    /// Weight exponent.
    #[arg(long)]
    delta: Option<f64>,
    /// Truncation constant.
    #[arg(long)]
    kappa: Option<f64>,
    /// Constant of the stochastic bound.
    #[arg(long = "bigC")]
    big_c: Option<f64>,
    /// Constant of the second Lepskiĭ rule.
    #[arg(long = "A")]
    a: Option<f64>,
    /// Smoothness index of the jump class.
    #[arg(long)]
    r: Option<f64>,
    /// Radius of the jump class.
    #[arg(long = "M")]
    m: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Omit the `# generated_at` line from CSV files.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Clone)]
struct DataArgs {
    #[command(flatten)]
    common: Common,
    /// Increments CSV (`dx1,dx2`); without it a sample is simulated.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "balancing")]
    method: SelectionMethod,
}

#[derive(Args, Clone)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Second sample size (default `5n`).
    #[arg(long)]
    compare_n: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ConfigFile> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            n: self.n,
            seed: self.seed,
            seeds: self.seeds,
            grid_min: self.grid_min,
            grid_max: self.grid_max,
            grid_points: self.grid_points,
            grid_log: self.grid_log,
            c: self.c,
            delta: self.delta,
            kappa: self.kappa,
            big_c: self.big_c,
            a: self.a,
            r: self.r,
            m: self.m,
            ..ConfigFile::default()
        };
        Ok(base.overlay(flags))
    }

    fn csv(&self) -> CsvOptions {
        CsvOptions {
            timestamp: !self.no_timestamp,
        }
    }

    fn out_file(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }
}

impl DataArgs {
    fn sample(&self, config: &ConfigFile) -> Result<IncrementSample> {
        match &self.input {
            Some(path) => Ok(read_increments(path)?),
            None => {
                let sim = SimulationConfig::new(config.n(), config.seed.unwrap_or(0))?;
                Ok(simulate_increments(&config.model()?, &sim)?)
            }
        }
    }
}

fn simulate(args: &Common) -> Result<()> {
    let config = args.config()?;
    let model = config.model()?;
    let seeds = config.seed_list()?;
    let single = seeds.len() == 1;
    for seed in seeds {
        let sample = simulate_increments(&model, &SimulationConfig::new(config.n(), seed)?)?;
        let name = if single {
            "increments.csv".to_string()
        } else {
            format!("increments_seed{seed}.csv")
        };
        let path = args.out_file(&name)?;
        write_increments(&path, &sample, args.csv())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn estimate(args: &DataArgs) -> Result<()> {
    let common = &args.common;
    let config = common.config()?;
    let sample = args.sample(&config)?;
    let model = config.model()?;
    let selector = config.selector(&model)?;
    let grid = config.grid()?;
    let points = evaluate_grid(&sample, grid.points(), &selector.bounds)?;
    let truth = args.input.is_none().then_some(&model);
    let curves = bound_curves(&points, truth, sample.n(), 0, &selector.bounds);
    write_cf_curves(&common.out_file("cf_curves.csv")?, &points, common.csv())?;
    write_bound_curves(&common.out_file("bound_curves.csv")?, &points, &curves, common.csv())?;
    println!(
        "n = {}, {} grid points, written to {}",
        sample.n(),
        points.len(),
        common.out.display()
    );
    Ok(())
}

fn select(args: &SelectArgs) -> Result<()> {
    let common = &args.data.common;
    let config = common.config()?;
    let sample = args.data.sample(&config)?;
    let model = config.model()?;
    let selector = config.selector(&model)?;
    let outcome = adaptive_estimate_with(&sample, &config.grid()?, &selector, args.method)?;
    let s = &outcome.selection;
    write_trace(&common.out_file("trace.csv")?, s, common.csv())?;
    write_summary(&common.out_file("summary.csv")?, s, &outcome.oracle, common.csv())?;
    write_bound_curves(
        &common.out_file("bound_curves.csv")?,
        &outcome.points,
        &outcome.curves,
        common.csv(),
    )?;
    println!(
        "method = {}, U = {}, estimate = {}, U_start = {}{}",
        s.method.as_str(),
        s.u,
        s.estimate,
        outcome.oracle.u_start,
        if outcome.oracle.saturated { " (saturated)" } else { "" }
    );
    Ok(())
}

fn write_record(args: &Common, record: &ExperimentRecord) -> Result<()> {
    write_grid_rows(&args.out_file("grid_rows.csv")?, &record.rows, args.csv())?;
    write_aggregates(&args.out_file("aggregates.csv")?, &record.aggregates, args.csv())?;
    write_selections(&args.out_file("selections.csv")?, &record.selections, args.csv())?;
    Ok(())
}

fn print_summaries(record: &ExperimentRecord, truth: f64) {
    for n in record.sizes() {
        let s = record.summary(n, truth);
        println!(
            "n = {}: median estimate {:.4}, MAD {:.4}, median U_start {:.3}, bound held {:.2}",
            s.n, s.median_estimate, s.mad_estimate, s.median_u_start, s.bound_frequency
        );
    }
}

fn figure(args: &Common) -> Result<()> {
    let spec = args.config()?.spec(Mode::Figure)?;
    let record = run_figure_experiment(&spec)?;
    write_record(args, &record)?;
    print_summaries(&record, spec.model.c12());
    Ok(())
}

fn oracle_start(args: &OracleArgs) -> Result<()> {
    let mut config = args.common.config()?;
    if config.jumps.is_none() {
        config.jumps = Some(reference_model(0.5, 1.5)?.jumps);
    }
    config.compare_n = args.compare_n.or(config.compare_n);
    let spec = config.spec(Mode::OracleStart)?;
    let record = run_oracle_start_experiment(&spec)?;
    write_record(&args.common, &record)?;
    print_summaries(&record, spec.model.c12());
    Ok(())
}

fn properties(args: &Common) -> Result<bool> {
    let spec = args.config()?.spec(Mode::PropertySuite)?;
    let report = run_property_suite(&spec)?;
    write_property_report(&args.out_file("properties.csv")?, &report, args.csv())?;
    for c in &report.checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {}: {}/{} = {:.4} (floor {})",
            c.name,
            c.hits,
            c.total,
            c.frequency(),
            c.floor
        );
    }
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Simulate(a) => simulate(a)?,
        Command::Estimate(a) => estimate(a)?,
        Command::Select(a) => select(a)?,
        Command::Figure(a) => figure(a)?,
        Command::OracleStart(a) => oracle_start(a)?,
        Command::Properties(a) => return properties(a),
    }
    Ok(true)
}

fn ensure_dir(path: &Path) -> Result<()> {
    if path.exists() && !path.is_dir() {
        bail!("{} is not a directory", path.display());
    }
    Ok(())
}

fn out_dir(cli: &Cli) -> &Path {
    match &cli.command {
        Command::Simulate(a) | Command::Figure(a) | Command::Properties(a) => &a.out,
        Command::Estimate(a) => &a.common.out,
        Command::Select(a) => &a.data.common.out,
        Command::OracleStart(a) => &a.common.out,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ensure_dir(out_dir(&cli)).and_then(|()| run(cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
