//! One-shot validation harness: ask a model for prices in the single-period
//! duopoly or the two-product monopoly (demand formula supplied in the
//! prompt) and score the reply against the theoretical optimum.

use super::EngineError;
use crate::equilibrium::{monopoly_logit, nash_logit, SolverConfig};
use crate::llm::{
    build_one_shot_bertrand_prompt, build_one_shot_monopoly_prompt, query_parsed, ChatBackend,
    PriceExtraction,
};
use crate::market::LogitMarketParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneShotGame {
    /// Two sellers, one product each; the reply prices the asker's product.
    Duopoly,
    /// One seller pricing both products for joint profit.
    Monopoly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneShotResult {
    pub game: OneShotGame,
    pub prices: Vec<f64>,
    /// The theoretical optimum the reply is scored against.
    pub optimum: f64,
    /// Relative deviation of each returned price from the optimum.
    pub relative_errors: Vec<f64>,
    /// Every returned price within the tolerance of the optimum.
    pub correct: bool,
    pub raw: String,
}

/// Run one validation game. `tolerance` is relative (0.05 scores "within
/// 5% of the optimum").
pub fn one_shot_game(
    params: &LogitMarketParams,
    game: OneShotGame,
    seller_label: &str,
    backend: &dyn ChatBackend,
    max_retries: u32,
    tolerance: f64,
) -> Result<OneShotResult, EngineError> {
    let prompt = match game {
        OneShotGame::Duopoly => build_one_shot_bertrand_prompt(params, seller_label),
        OneShotGame::Monopoly => build_one_shot_monopoly_prompt(params),
    }
    .map_err(|e| EngineError::InvalidSpec(e.to_string()))?;
    let (parsed, _calls) = query_parsed(backend, &prompt, max_retries)
        .map_err(|e| EngineError::InvalidSpec(format!("one-shot query: {e}")))?;
    let prices = match &parsed.price {
        PriceExtraction::Single(p) => vec![*p],
        PriceExtraction::List(ps) => ps.clone(),
    };
    let cfg = SolverConfig::for_market(params);
    let optimum = match game {
        OneShotGame::Duopoly => nash_logit(params, &cfg).price,
        OneShotGame::Monopoly => monopoly_logit(params, &cfg).price,
    };
    let relative_errors: Vec<f64> = prices.iter().map(|p| (p - optimum).abs() / optimum).collect();
    let correct = !relative_errors.is_empty() && relative_errors.iter().all(|e| *e <= tolerance);
    Ok(OneShotResult { game, prices, optimum, relative_errors, correct, raw: parsed.raw })
}
