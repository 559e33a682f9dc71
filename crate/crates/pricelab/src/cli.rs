//! Command implementations behind the `pricelab` binary: threshold tables,
//! benchmark solving, Q-learning pretraining, experiment execution, and
//! cross-condition reporting. The binary itself is a thin argument parser
//! over these functions.

use crate::config::{build_agents, Benchmarks, ConfigFile, Manifest, PretrainFile};
use crate::engine::persist::{read_summary_csv, write_summary_csv, LOG_SCHEMA_VERSION};
use crate::engine::{
    plot::svg_price_chart, summarize_condition, welch_t_one_sided, RunConfig, RunSummary, RunWriter,
};
use crate::equilibrium::{benchmarks as solve_benchmarks, nash_logit, monopoly_logit, SolverConfig};
use crate::market::LogitMarketParams;
use crate::qlearn::{pretrain, PretrainConfig, PriceGrid, QParams, TableFile};
use crate::theory::{
    monitored_threshold, monopoly_price_linear, nash_price_linear, patience_threshold, payoff_quad,
    LinearMarketParams,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}")]
    Theory(#[from] crate::theory::TheoryError),
    #[error("{0}")]
    Engine(#[from] crate::engine::EngineError),
    #[error("{0}")]
    Q(#[from] crate::qlearn::QError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} runs aborted on agent failure")]
    AgentFailures { failed: usize, total: usize },
    #[error("{0} runs did not converge (strict convergence requested)")]
    NonConvergence(usize),
}

/// Process exit codes: distinct classes for scripting.
pub fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::AgentFailures { .. } => 3,
        CliError::NonConvergence(_) => 4,
        _ => 2,
    }
}

/// Threshold tables for the linear-demand duopoly: a target-price sweep of
/// the perfect-monitoring threshold and a monitoring sweep at a reference
/// target. Monotonicity violations are flagged (there must be none).
pub fn cmd_theory(
    out: &mut dyn Write,
    params: &LinearMarketParams,
    p_c: Option<f64>,
    steps: usize,
    export: Option<&Path>,
) -> Result<(), CliError> {
    let p_star = nash_price_linear(params);
    let p_mono = monopoly_price_linear(params);
    writeln!(out, "linear market: a={} b={} d={} c={}", params.a, params.b, params.d, params.c)?;
    writeln!(out, "competitive price p* = {p_star:.6}")?;
    writeln!(out, "monopoly price   pM = {p_mono:.6}")?;

    let reference = match p_c {
        Some(target) => target,
        None => p_mono,
    };
    let quad = payoff_quad(params, reference)?;
    writeln!(
        out,
        "payoffs at target {reference:.6}: deviation {:.6}, collusive {:.6}, competitive {:.6}, undercut {:.6}",
        quad.pi_dev, quad.pi_c, quad.pi_star, quad.pi_sucker
    )?;

    let mut csv_rows: Vec<String> = vec!["sweep,x,threshold".to_string()];

    writeln!(out)?;
    writeln!(out, "target-price sweep (perfect monitoring)")?;
    writeln!(out, "{:>12} {:>12}", "p_c", "threshold")?;
    let mut prev = f64::NEG_INFINITY;
    let mut monotone_up = true;
    for k in 1..=steps {
        let target = if k == steps {
            p_mono
        } else {
            p_star + (p_mono - p_star) * k as f64 / steps as f64
        };
        let threshold = patience_threshold(params, target)?;
        monotone_up &= threshold > prev;
        prev = threshold;
        writeln!(out, "{target:>12.6} {threshold:>12.6}")?;
        csv_rows.push(format!("target,{target},{threshold}"));
    }

    writeln!(out)?;
    writeln!(out, "monitoring sweep at p_c = {reference:.6}")?;
    writeln!(out, "{:>12} {:>12}", "rho", "threshold")?;
    let mut prev_rho = f64::INFINITY;
    let mut monotone_down = true;
    for k in 1..=steps {
        let rho = k as f64 / steps as f64;
        let threshold = monitored_threshold(params, reference, rho)?;
        monotone_down &= threshold.value < prev_rho;
        prev_rho = threshold.value;
        writeln!(out, "{rho:>12.6} {:>12.6}", threshold.value)?;
        csv_rows.push(format!("rho,{rho},{}", threshold.value));
    }

    writeln!(out)?;
    if monotone_up && monotone_down {
        writeln!(out, "monotonicity check: OK (increasing in p_c, decreasing in rho)")?;
    } else {
        writeln!(out, "monotonicity check: VIOLATED")?;
    }
    if let Some(path) = export {
        std::fs::write(path, csv_rows.join("\n") + "\n")?;
    }
    Ok(())
}

/// Solve and print the competitive and monopoly benchmarks.
pub fn cmd_solve(
    out: &mut dyn Write,
    params: &LogitMarketParams,
    export: Option<&Path>,
) -> Result<Benchmarks, CliError> {
    let cfg = SolverConfig::for_market(params);
    let nash = nash_logit(params, &cfg);
    let mono = monopoly_logit(params, &cfg);
    writeln!(
        out,
        "logit market: a={} mu={} a0={} c={} n={}",
        params.a, params.mu, params.a0, params.c, params.n
    )?;
    writeln!(
        out,
        "competitive price p^C = {:.6}  (converged={}, iterations={}, residual={:.2e})",
        nash.price, nash.converged, nash.iterations, nash.residual
    )?;
    writeln!(out, "monopoly price    p^M = {:.6}  (converged={})", mono.price, mono.converged)?;
    if nash.non_unimodal || mono.non_unimodal {
        writeln!(out, "warning: profit scan saw multiple interior maxima; used finest-grid argmax")?;
    }
    let benchmarks = Benchmarks { p_competitive: nash.price, p_monopoly: mono.price };
    if let Some(path) = export {
        std::fs::write(
            path,
            serde_json::to_string_pretty(&benchmarks)
                .map_err(|e| CliError::Usage(format!("serialize benchmarks: {e}")))?,
        )?;
    }
    Ok(benchmarks)
}

/// Pretrain a pair of Q-learners and persist the tables.
pub fn cmd_pretrain(
    out: &mut dyn Write,
    job: &PretrainFile,
    profile_override: Option<&str>,
    seed_override: Option<u64>,
    out_override: Option<&Path>,
) -> Result<PathBuf, CliError> {
    let profile = profile_override.unwrap_or(&job.profile);
    let seed = seed_override.unwrap_or(job.seed);
    let out_file = out_override.map(Path::to_path_buf).unwrap_or_else(|| job.out_file.clone());

    let (nash, mono) = solve_benchmarks(&job.market);
    writeln!(out, "benchmarks: p^C = {:.6}, p^M = {:.6}", nash.price, mono.price)?;
    let grid = PriceGrid::spanning(nash.price, mono.price, job.qparams.m, job.qparams.xi)?;
    let params = QParams::new(job.qparams.alpha, job.qparams.beta, job.qparams.delta, grid)?;
    let mut cfg = match profile {
        "paper" => PretrainConfig::long(seed, nash.price),
        "desk" => PretrainConfig::desk(seed, nash.price),
        other => return Err(CliError::Usage(format!("unknown profile '{other}' (use desk|paper)"))),
    };
    cfg.init = job.qparams.init;
    writeln!(
        out,
        "pretraining: window={} cap={} seed={} grid m={} [{:.4}, {:.4}]",
        cfg.stability_window,
        cfg.cap,
        seed,
        params.grid.len(),
        params.grid.points()[0],
        params.grid.points()[params.grid.len() - 1]
    )?;
    let started = std::time::Instant::now();
    let outcome = pretrain(&params, &job.market, &cfg)?;
    writeln!(
        out,
        "converged={} after {} periods ({:.1}s)",
        outcome.converged,
        outcome.periods,
        started.elapsed().as_secs_f64()
    )?;
    let selfplay = crate::qlearn::greedy_selfplay(&outcome.tables, &params.grid, outcome.final_actions, 200);
    let tail: Vec<f64> = selfplay.iter().rev().take(100).flat_map(|(a, b)| [*a, *b]).collect();
    let avg = tail.iter().sum::<f64>() / tail.len() as f64;
    writeln!(out, "greedy self-play average price: {avg:.4} (vs p^C {:.4})", nash.price)?;
    let file = TableFile::from_pretrain(&params, &cfg, &outcome);
    file.save(&out_file)?;
    writeln!(out, "saved {} tables to {}", file.tables.len(), out_file.display())?;
    Ok(out_file)
}

#[derive(Debug)]
pub struct ConditionOutcome {
    pub out_dir: PathBuf,
    pub benchmarks: Benchmarks,
    pub summaries: Vec<RunSummary>,
    /// (run index, diagnostic) for aborted runs.
    pub failures: Vec<(usize, String)>,
}

/// Execute every run of one condition, persisting logs, plots, the manifest,
/// and the summary CSV. Runs execute in waves of `parallel` threads; seeds
/// derive from (base seed, run index) so results are identical at any
/// parallelism.
pub fn run_condition(
    out: &mut dyn Write,
    cfg: &ConfigFile,
    out_dir: &Path,
    runs: usize,
    parallel: usize,
) -> Result<ConditionOutcome, CliError> {
    let benchmarks = match cfg.benchmarks {
        Some(b) => b,
        None => {
            let (nash, mono) = solve_benchmarks(&cfg.market);
            Benchmarks { p_competitive: nash.price, p_monopoly: mono.price }
        }
    };
    // Preflight: materialize the full roster once (resolves API keys, loads
    // table files) so bad wiring fails here, before any period executes.
    drop(build_agents(cfg, &benchmarks, 0)?);
    std::fs::create_dir_all(out_dir)?;
    Manifest {
        schema_version: LOG_SCHEMA_VERSION,
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        condition: cfg.name.clone(),
        base_seed: cfg.seed,
        runs,
        max_periods: cfg.max_periods,
        market: cfg.market,
        convergence: cfg.convergence,
        benchmarks,
        agents: cfg.agents.clone(),
    }
    .write(out_dir)?;

    let run_cfg = RunConfig { market: cfg.market, convergence: cfg.convergence, max_periods: cfg.max_periods };
    let labels: Vec<String> = cfg.agents.iter().enumerate().map(|(i, a)| a.label_or(i)).collect();

    let mut results: Vec<Option<Result<RunSummary, String>>> = (0..runs).map(|_| None).collect();
    let mut next = 0usize;
    while next < runs {
        let wave_end = (next + parallel.max(1)).min(runs);
        let wave: Vec<usize> = (next..wave_end).collect();
        let mut wave_results: Vec<(usize, Result<RunSummary, String>)> = Vec::with_capacity(wave.len());
        std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(wave.len());
            for run_index in &wave {
                let run_index = *run_index;
                let labels = labels.clone();
                let run_cfg = &run_cfg;
                let benchmarks = &benchmarks;
                handles.push(scope.spawn(move || {
                    let result = execute_one_run(cfg, run_cfg, benchmarks, &labels, out_dir, run_index);
                    (run_index, result)
                }));
            }
            for handle in handles {
                wave_results.push(handle.join().expect("run thread panicked"));
            }
        });
        for (idx, res) in wave_results {
            results[idx] = Some(res);
        }
        next = wave_end;
    }

    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for (idx, result) in results.into_iter().enumerate() {
        match result.expect("every run executed") {
            Ok(summary) => {
                writeln!(
                    out,
                    "run {idx:02}: converged={} rounds={} avg_price={:.4} elevation={:+.1}%",
                    summary.converged,
                    summary.rounds_to_convergence.map(|r| r.to_string()).unwrap_or_else(|| "-".into()),
                    summary.avg_price,
                    summary.price_elevation * 100.0
                )?;
                summaries.push(summary);
            }
            Err(diag) => {
                writeln!(out, "run {idx:02}: ABORTED: {diag}")?;
                failures.push((idx, diag));
            }
        }
    }

    if !summaries.is_empty() {
        write_summary_csv(&out_dir.join("summary.csv"), &cfg.name, &summaries)?;
        let report = summarize_condition(&summaries, benchmarks.p_competitive)?;
        writeln!(out)?;
        writeln!(
            out,
            "{} | rounds to convergence {} | avg price {} | elevation {}",
            cfg.name,
            report.rounds_cell(),
            report.price_cell(),
            report.elevation_cell()
        )?;
    }
    Ok(ConditionOutcome { out_dir: out_dir.to_path_buf(), benchmarks, summaries, failures })
}

fn execute_one_run(
    cfg: &ConfigFile,
    run_cfg: &RunConfig,
    benchmarks: &Benchmarks,
    labels: &[String],
    out_dir: &Path,
    run_index: usize,
) -> Result<RunSummary, String> {
    let run_dir = out_dir.join(format!("run_{run_index:02}"));
    let mut agents = build_agents(cfg, benchmarks, run_index).map_err(|e| e.to_string())?;
    let mut writer = RunWriter::create(&run_dir).map_err(|e| e.to_string())?;
    let outcome = crate::engine::run(run_cfg, &mut agents, Some(&mut writer)).map_err(|e| e.to_string())?;
    let summary = RunSummary::from_records(&outcome.records, &cfg.convergence, benchmarks.p_competitive);
    let svg = svg_price_chart(
        &outcome.records,
        labels,
        benchmarks.p_competitive,
        benchmarks.p_monopoly,
        &format!("{} run {run_index:02}", cfg.name),
    );
    let plots = out_dir.join("plots");
    std::fs::create_dir_all(&plots).map_err(|e| e.to_string())?;
    std::fs::write(plots.join(format!("run_{run_index:02}.svg")), svg).map_err(|e| e.to_string())?;
    Ok(summary)
}

/// Full `run` command: load config, apply CLI overrides, execute, enforce
/// failure policies.
pub fn cmd_run(
    out: &mut dyn Write,
    config_path: &Path,
    runs_override: Option<usize>,
    seed_override: Option<u64>,
    parallel_override: Option<usize>,
    out_override: Option<&Path>,
    require_convergence: bool,
) -> Result<ConditionOutcome, CliError> {
    let mut cfg = ConfigFile::load(config_path)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let runs = runs_override.unwrap_or(cfg.runs);
    let parallel = parallel_override.unwrap_or(cfg.parallel);
    let out_dir = match (out_override, &cfg.out_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => o.clone(),
        (None, None) => {
            return Err(CliError::Usage("no output directory: set out_dir in the config or pass --out".into()))
        }
    };
    if runs < 1 {
        return Err(CliError::Usage("--runs must be >= 1".into()));
    }
    let outcome = run_condition(out, &cfg, &out_dir, runs, parallel)?;
    if !outcome.failures.is_empty() {
        return Err(CliError::AgentFailures { failed: outcome.failures.len(), total: runs });
    }
    if require_convergence {
        let nonconverged = outcome.summaries.iter().filter(|s| !s.converged).count();
        if nonconverged > 0 {
            return Err(CliError::NonConvergence(nonconverged));
        }
    }
    Ok(outcome)
}

/// Table-style report over one or more condition directories, with a Welch
/// one-sided test between the first two when two or more are given.
pub fn cmd_report(out: &mut dyn Write, dirs: &[PathBuf]) -> Result<(), CliError> {
    if dirs.is_empty() {
        return Err(CliError::Usage("report needs at least one condition directory".into()));
    }
    writeln!(
        out,
        "{:<28} {:>22} {:>16} {:>12}",
        "Condition", "Rounds to Convergence", "Avg. Price", "Elevation"
    )?;
    let mut samples: Vec<(String, Vec<f64>)> = Vec::new();
    for dir in dirs {
        let manifest = Manifest::load(dir)?;
        let rows = read_summary_csv(&dir.join("summary.csv"))?;
        let summaries: Vec<RunSummary> = rows
            .iter()
            .map(|r| RunSummary {
                converged: r.converged,
                rounds_to_convergence: r.rounds,
                avg_price: r.avg_price,
                terminal_lowest_price: r.terminal_lowest,
                price_elevation: r.elevation,
            })
            .collect();
        let report = summarize_condition(&summaries, manifest.benchmarks.p_competitive)?;
        writeln!(
            out,
            "{:<28} {:>22} {:>16} {:>12}",
            manifest.condition,
            report.rounds_cell(),
            report.price_cell(),
            report.elevation_cell()
        )?;
        samples.push((manifest.condition, summaries.iter().map(|s| s.avg_price).collect()));
    }
    if samples.len() >= 2 {
        let (name_a, a) = &samples[0];
        let (name_b, b) = &samples[1];
        match welch_t_one_sided(a, b) {
            Ok(test) => {
                writeln!(out)?;
                writeln!(
                    out,
                    "Welch one-sided test of mean({name_a}) > mean({name_b}): t = {:.4}, dof = {:.2}, p = {:.3e}",
                    test.t, test.dof, test.p_one_sided
                )?;
            }
            Err(e) => writeln!(out, "Welch test unavailable: {e}")?,
        }
    }
    Ok(())
}
