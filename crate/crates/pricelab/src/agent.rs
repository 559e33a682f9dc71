//! The common surface every pricing agent presents to the period loop.
//!
//! Simultaneous moves are enforced structurally: an agent deciding round `t`
//! only ever receives history through round `t-1`, filtered down to what its
//! information access allows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// What an agent is allowed to see about its rivals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoAccess {
    /// Own outcomes plus every rival's historical prices.
    Full,
    /// Own outcomes only.
    OwnOnly,
}

/// One completed round as seen by one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisiblePeriod {
    /// 1-based round index.
    pub round: usize,
    pub own_price: f64,
    pub own_quantity: f64,
    pub own_profit: f64,
    /// Rival prices in roster order with self removed; `None` under
    /// own-only access.
    pub rival_prices: Option<Vec<f64>>,
}

/// Everything an agent may consult when pricing round `round`.
#[derive(Debug, Clone)]
pub struct AgentView<'a> {
    /// 1-based round being decided.
    pub round: usize,
    pub n_sellers: usize,
    /// Rounds `1..=round-1`, oldest first.
    pub history: &'a [VisiblePeriod],
}

/// A priced decision plus whatever raw material produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub price: f64,
    /// Rendered prompt, for agents that query a language model.
    pub prompt: Option<String>,
    /// Raw backend response, verbatim.
    pub response: Option<String>,
    /// Non-fatal diagnostics (e.g. a round echo mismatch).
    pub note: Option<String>,
}

impl Decision {
    pub fn price(price: f64) -> Self {
        Self { price, prompt: None, response: None, note: None }
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("agent failure: {0}")]
    Failure(String),
    #[error("scripted trajectory exhausted at round {0}")]
    ScriptExhausted(usize),
}

/// A pricing agent. Mutable state is single-owner; the engine serializes all
/// per-period interactions.
pub trait Agent: Send {
    fn label(&self) -> &str;

    /// Choose a price for `view.round` given history through the previous
    /// round.
    fn decide(&mut self, view: &AgentView) -> Result<Decision, AgentError>;

    /// Digest the completed round (the same record the agent will later see
    /// in its history). Learning agents update here; others ignore it.
    fn observe(&mut self, _period: &VisiblePeriod) {}
}
