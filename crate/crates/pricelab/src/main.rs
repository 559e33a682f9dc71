use clap::{Args, Parser, Subcommand};
use pricelab::cli::{self, CliError};
use pricelab::config::PretrainFile;
use pricelab::market::LogitMarketParams;
use pricelab::theory::LinearMarketParams;
use std::path::PathBuf;
use std::process::ExitCode;

/// Repeated-pricing laboratory: theory thresholds, market benchmarks,
/// Q-learning pretraining, experiment execution, and reporting.
#[derive(Parser)]
#[command(name = "pricelab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collusion-threshold tables for the linear-demand duopoly.
    Theory(TheoryArgs),
    /// Solve the logit market's competitive and monopoly benchmark prices.
    Solve(SolveArgs),
    /// Pretrain a pair of Q-learning sellers and persist their tables.
    Pretrain(PretrainArgs),
    /// Execute an experiment config: runs, logs, plots, summary.
    Run(RunArgs),
    /// Summarize finished condition directories; Welch test between two.
    Report(ReportArgs),
}

#[derive(Args)]
struct TheoryArgs {
    /// Demand intercept.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Own-price sensitivity.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Cross-price sensitivity.
    #[arg(long, default_value_t = 0.5)]
    d: f64,
    /// Marginal cost.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Target collusive price (defaults to the monopoly price).
    #[arg(long)]
    p_c: Option<f64>,
    /// Sweep resolution.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Export the sweeps as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Vertical differentiation.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Price sensitivity scale.
    #[arg(long, default_value_t = 0.25)]
    mu: f64,
    /// Outside-option value.
    #[arg(long, default_value_t = 0.0)]
    a0: f64,
    /// Marginal cost.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Seller count.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Write the benchmarks as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PretrainArgs {
    /// Pretraining job TOML.
    #[arg(long)]
    config: PathBuf,
    /// Override the job profile (desk: window 10k/cap 5M; paper: 100k/1e9).
    #[arg(long)]
    profile: Option<String>,
    /// Override the job seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output table file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment condition TOML.
    #[arg(long)]
    config: PathBuf,
    /// Override the number of independent runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs to execute concurrently.
    #[arg(long)]
    parallel: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit nonzero if any run fails to converge.
    #[arg(long)]
    require_convergence: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Condition directories (each holding manifest.json and summary.csv).
    dirs: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result: Result<(), CliError> = match cli.command {
        Command::Theory(args) => LinearMarketParams::new(args.a, args.b, args.d, args.c)
            .map_err(CliError::Theory)
            .and_then(|params| {
                cli::cmd_theory(&mut stdout, &params, args.p_c, args.steps, args.out.as_deref())
            }),
        Command::Solve(args) => LogitMarketParams::new(args.a, args.mu, args.a0, args.c, args.n)
            .map_err(|e| CliError::Usage(e.to_string()))
            .and_then(|params| cli::cmd_solve(&mut stdout, &params, args.out.as_deref()).map(|_| ())),
        Command::Pretrain(args) => PretrainFile::load(&args.config).map_err(CliError::Config).and_then(|job| {
            cli::cmd_pretrain(
                &mut stdout,
                &job,
                args.profile.as_deref(),
                args.seed,
                args.out.as_deref(),
            )
            .map(|_| ())
        }),
        Command::Run(args) => cli::cmd_run(
            &mut stdout,
            &args.config,
            args.runs,
            args.seed,
            args.parallel,
            args.out.as_deref(),
            args.require_convergence,
        )
        .map(|_| ()),
        Command::Report(args) => cli::cmd_report(&mut stdout, &args.dirs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
