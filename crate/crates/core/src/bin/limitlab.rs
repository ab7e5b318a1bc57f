use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use limitlab::report::{self, OutputFormat, Report, RunConfig};
use limitlab::{parse_rational, BigRational, Result};

#[derive(Parser)]
#[command(name = "limitlab", version, about = "Limits of discrete probability measures, as reproducible reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a worked example (ex1 .. ex11, ex13 .. ex15)
    Example { id: String },
    /// Exact identity rows and the limits of both sides
    DemoInconsistency,
    /// Exact laws of X_n, Y_n, Z_n by enumerating all 2^n trial strings
    Oracle,
    /// Monte Carlo frequencies of X_n, Y_n, Z_n
    Simulate,
    /// Tightness scan of a measure family
    Tightness,
    /// Limit of rho_n(E_n) against the limit measure at the limit event
    Converge,
    /// Uncertain interval of a digit prefix and its cos^2 image
    Uncertain,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

fn rational(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct Opts {
    /// Failure probability of one trial, as p/q or a decimal
    #[arg(long, global = true, value_parser = rational, default_value = "1/2")]
    q: BigRational,
    /// Poisson rate
    #[arg(long, global = true, value_parser = rational, default_value = "1")]
    c: BigRational,
    /// Scan horizon
    #[arg(long = "N", global = true, default_value_t = 200)]
    horizon: u64,
    /// Number of trials for oracle and simulate
    #[arg(long, global = true, default_value_t = 3)]
    n: u64,
    /// Tightness threshold
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Convergence tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Tail window length for limit estimates
    #[arg(long, global = true, default_value_t = 20)]
    window: usize,
    /// Monte Carlo runs
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Simulation shards
    #[arg(long, global = true, default_value_t = 8)]
    workers: usize,
    /// Poisson truncation point
    #[arg(long, global = true)]
    k_max: Option<u64>,
    /// Largest bound scanned by tightness (default N/2)
    #[arg(long, global = true, value_parser = rational)]
    b_max: Option<BigRational>,
    /// bernoulli_marginal, running_max, record_index, dirac_walk, dirac_recip, binomial_poisson
    #[arg(long, global = true)]
    family: Option<String>,
    /// singleton_shift, identity, ray_growth
    #[arg(long, global = true)]
    rule: Option<String>,
    /// Seed event, e.g. "(-inf,3)", "{5}", "[0,1) u {4}"
    #[arg(long, global = true)]
    event: Option<String>,
    /// Digit prefix such as 0.141
    #[arg(long, global = true)]
    prefix: Option<String>,
    /// Variable for pmf tables: x, y or z
    #[arg(long, global = true)]
    var: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            q: self.q.clone(),
            c: self.c.clone(),
            horizon: self.horizon,
            n: self.n,
            k_max: self.k_max,
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
            tol: self.tol,
            window: self.window,
            eps: self.eps,
            b_max: self.b_max.clone(),
            family: self.family.clone(),
            rule: self.rule.clone(),
            event: self.event.clone(),
            prefix: self.prefix.clone(),
            var: self.var.clone(),
        }
    }
}

fn build(command: &Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Example { id } => report::cmd_example(id, cfg),
        Command::DemoInconsistency => report::cmd_demo_inconsistency(cfg),
        Command::Oracle => report::cmd_oracle(cfg),
        Command::Simulate => report::cmd_simulate(cfg),
        Command::Tightness => report::cmd_tightness(cfg),
        Command::Converge => report::cmd_converge(cfg),
        Command::Uncertain => report::cmd_uncertain(cfg),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let report = build(&cli.command, &cli.opts.config())?;
    let rendered = report.render(cli.opts.format.into())?;
    match &cli.opts.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("limitlab: {e}");
            ExitCode::FAILURE
        }
    }
}
