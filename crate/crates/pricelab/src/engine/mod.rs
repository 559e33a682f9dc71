//! Period-loop orchestration: collect simultaneous price decisions, evaluate
//! the market, detect convergence, persist append-only run logs, and reduce
//! runs to summary metrics.

pub mod oneshot;
pub mod persist;
pub mod plot;
pub mod stats;

pub use oneshot::{one_shot_game, OneShotGame, OneShotResult};
pub use persist::{load_jsonl, RunWriter};
pub use stats::{summarize_condition, welch_t_one_sided, ConditionReport, WelchTest};

use crate::agent::{Agent, AgentError, AgentView, InfoAccess, VisiblePeriod};
use crate::market::{market_outcome, LogitMarketParams, MarketError, PriceVector};
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("agent '{agent}' failed in round {round}: {source}")]
    AgentFailure {
        round: usize,
        agent: String,
        #[source]
        source: AgentError,
    },
    #[error("market: {0}")]
    Market(#[from] MarketError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("log format: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("statistics: {0}")]
    Stats(String),
}

/// Prices count as converged when, for `window` consecutive rounds, the gap
/// between any two sellers stays within `band` of that round's lowest price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceRule {
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_band")]
    pub band: f64,
}

fn default_window() -> usize {
    100
}

fn default_band() -> f64 {
    0.05
}

impl Default for ConvergenceRule {
    fn default() -> Self {
        Self { window: 100, band: 0.05 }
    }
}

impl ConvergenceRule {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.window < 1 {
            return Err(EngineError::InvalidSpec("convergence window must be >= 1".into()));
        }
        if !(self.band > 0.0) {
            return Err(EngineError::InvalidSpec("convergence band must be > 0".into()));
        }
        Ok(())
    }

    /// One round qualifies when the widest pairwise gap is at most
    /// `band * lowest price`. The boundary is inclusive; the tiny relative
    /// slack only absorbs binary representation error (1.05 - 1.00 is not
    /// exactly 0.05 in floats).
    pub fn round_qualifies(&self, prices: &[f64]) -> bool {
        let lo = prices.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = prices.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo <= self.band * lo + 1e-12 * lo.abs().max(1.0)
    }
}

/// One completed round: prices in roster order plus realized market figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    /// 1-based round index.
    pub t: usize,
    pub prices: Vec<f64>,
    pub quantities: Vec<f64>,
    pub profits: Vec<f64>,
    /// Per-agent sidecar reference (prompt/response files), when any.
    pub io_refs: Vec<Option<String>>,
    /// Per-agent non-fatal diagnostics.
    pub notes: Vec<Option<String>>,
    /// Wall-clock decision latencies; recorded to a timing sidecar, never
    /// serialized into the run log so logs stay bit-reproducible.
    #[serde(skip)]
    pub latencies_us: Vec<u64>,
}

/// An agent plus the information filter the engine applies to its view.
pub struct AgentSlot {
    pub agent: Box<dyn Agent>,
    pub info: InfoAccess,
}

impl AgentSlot {
    pub fn full(agent: Box<dyn Agent>) -> Self {
        Self { agent, info: InfoAccess::Full }
    }
}

/// Build one agent's filtered view of history through the previous round.
fn visible_history(history: &[PeriodRecord], agent_index: usize, info: InfoAccess) -> Vec<VisiblePeriod> {
    history
        .iter()
        .map(|rec| VisiblePeriod {
            round: rec.t,
            own_price: rec.prices[agent_index],
            own_quantity: rec.quantities[agent_index],
            own_profit: rec.profits[agent_index],
            rival_prices: match info {
                InfoAccess::Full => Some(
                    rec.prices
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != agent_index)
                        .map(|(_, p)| *p)
                        .collect(),
                ),
                InfoAccess::OwnOnly => None,
            },
        })
        .collect()
}

/// Execute one round: every agent decides from history through `round - 1`,
/// the market clears, and agents observe their own outcome.
pub fn step(
    market: &LogitMarketParams,
    agents: &mut [AgentSlot],
    history: &[PeriodRecord],
    round: usize,
) -> Result<PeriodRecord, EngineError> {
    step_raw(market, agents, history, round).map(|raw| raw.record)
}

/// Carrier so `run` can persist prompts/responses before dropping them.
struct StepRaw {
    record: PeriodRecord,
    prompts: Vec<Option<String>>,
    responses: Vec<Option<String>>,
}

fn step_raw(
    market: &LogitMarketParams,
    agents: &mut [AgentSlot],
    history: &[PeriodRecord],
    round: usize,
) -> Result<StepRaw, EngineError> {
    let n = agents.len();
    let mut prices = Vec::with_capacity(n);
    let mut prompts: Vec<Option<String>> = Vec::with_capacity(n);
    let mut responses: Vec<Option<String>> = Vec::with_capacity(n);
    let mut notes: Vec<Option<String>> = Vec::with_capacity(n);
    let mut latencies = Vec::with_capacity(n);
    for (i, slot) in agents.iter_mut().enumerate() {
        let visible = visible_history(history, i, slot.info);
        let view = AgentView { round, n_sellers: n, history: &visible };
        let started = Instant::now();
        let decision = slot.agent.decide(&view).map_err(|source| EngineError::AgentFailure {
            round,
            agent: slot.agent.label().to_string(),
            source,
        })?;
        latencies.push(started.elapsed().as_micros() as u64);
        if !decision.price.is_finite() || decision.price < 0.0 {
            return Err(EngineError::AgentFailure {
                round,
                agent: slot.agent.label().to_string(),
                source: AgentError::Failure(format!("invalid price {}", decision.price)),
            });
        }
        prices.push(decision.price);
        prompts.push(decision.prompt);
        responses.push(decision.response);
        notes.push(decision.note);
    }
    let outcome = market_outcome(market, &PriceVector::new(prices.clone())?)?;
    let record = PeriodRecord {
        t: round,
        prices,
        quantities: outcome.quantities,
        profits: outcome.profits,
        io_refs: vec![None; n],
        notes,
        latencies_us: latencies,
    };
    for (i, slot) in agents.iter_mut().enumerate() {
        let seen = visible_history(std::slice::from_ref(&record), i, slot.info)
            .pop()
            .expect("one record in");
        slot.agent.observe(&seen);
    }
    Ok(StepRaw { record, prompts, responses })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub records: Vec<PeriodRecord>,
    pub converged: bool,
    pub convergence_round: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub market: LogitMarketParams,
    pub convergence: ConvergenceRule,
    pub max_periods: usize,
}

/// Loop rounds until the convergence rule is met or `max_periods` is
/// reached. With a writer, every record is flushed as it happens and an
/// agent failure still leaves the partial log on disk (plus an abort
/// diagnostic).
pub fn run(
    cfg: &RunConfig,
    agents: &mut [AgentSlot],
    mut writer: Option<&mut RunWriter>,
) -> Result<RunOutcome, EngineError> {
    cfg.convergence.validate()?;
    if agents.len() != cfg.market.n {
        return Err(EngineError::InvalidSpec(format!(
            "roster has {} agents, market has {} sellers",
            agents.len(),
            cfg.market.n
        )));
    }
    if cfg.max_periods < 1 {
        return Err(EngineError::InvalidSpec("max_periods must be >= 1".into()));
    }
    let mut records: Vec<PeriodRecord> = Vec::with_capacity(cfg.max_periods.min(4096));
    let mut streak = 0usize;
    for round in 1..=cfg.max_periods {
        let raw = match step_raw(&cfg.market, agents, &records, round) {
            Ok(raw) => raw,
            Err(e) => {
                if let Some(w) = writer.as_deref_mut() {
                    w.write_abort(&e.to_string())?;
                }
                return Err(e);
            }
        };
        let mut record = raw.record;
        if let Some(w) = writer.as_deref_mut() {
            for i in 0..agents.len() {
                if raw.prompts[i].is_some() || raw.responses[i].is_some() {
                    let io_ref = w.write_io(
                        round,
                        i,
                        raw.prompts[i].as_deref(),
                        raw.responses[i].as_deref(),
                    )?;
                    record.io_refs[i] = Some(io_ref);
                }
            }
            w.append(&record)?;
        }
        streak = if cfg.convergence.round_qualifies(&record.prices) { streak + 1 } else { 0 };
        records.push(record);
        if streak >= cfg.convergence.window {
            return Ok(RunOutcome { records, converged: true, convergence_round: Some(round) });
        }
    }
    Ok(RunOutcome { records, converged: false, convergence_round: None })
}

/// Scan a full price history for the first qualifying window. Returns the
/// convergence flag and the 1-based round at which the first qualifying
/// window ends.
pub fn check_convergence(prices_by_round: &[Vec<f64>], rule: &ConvergenceRule) -> (bool, Option<usize>) {
    let mut streak = 0usize;
    for (idx, prices) in prices_by_round.iter().enumerate() {
        streak = if rule.round_qualifies(prices) { streak + 1 } else { 0 };
        if streak >= rule.window {
            return (true, Some(idx + 1));
        }
    }
    (false, None)
}

/// `(avg - p_competitive) / p_competitive`.
pub fn price_elevation(avg_price: f64, p_competitive: f64) -> f64 {
    (avg_price - p_competitive) / p_competitive
}

/// Converged runs: pooled mean over every seller's price in the final
/// (qualifying) window. Non-converged runs: the lowest price in the final
/// recorded round.
pub fn avg_price(records: &[PeriodRecord], rule: &ConvergenceRule, converged: bool) -> f64 {
    if records.is_empty() {
        return f64::NAN;
    }
    if converged {
        let start = records.len().saturating_sub(rule.window);
        let tail = &records[start..];
        let total: f64 = tail.iter().map(|r| r.prices.iter().sum::<f64>()).sum();
        let count: usize = tail.iter().map(|r| r.prices.len()).sum();
        total / count as f64
    } else {
        terminal_lowest_price(records)
    }
}

pub fn terminal_lowest_price(records: &[PeriodRecord]) -> f64 {
    records
        .last()
        .map(|r| r.prices.iter().copied().fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN)
}

/// Per-run reduction of a log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub converged: bool,
    pub rounds_to_convergence: Option<usize>,
    pub avg_price: f64,
    pub terminal_lowest_price: f64,
    pub price_elevation: f64,
}

impl RunSummary {
    pub fn from_records(records: &[PeriodRecord], rule: &ConvergenceRule, p_competitive: f64) -> Self {
        let prices: Vec<Vec<f64>> = records.iter().map(|r| r.prices.clone()).collect();
        let (converged, round) = check_convergence(&prices, rule);
        let avg = avg_price(records, rule, converged);
        Self {
            converged,
            rounds_to_convergence: round,
            avg_price: avg,
            terminal_lowest_price: terminal_lowest_price(records),
            price_elevation: price_elevation(avg, p_competitive),
        }
    }
}
