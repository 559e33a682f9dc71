//! LLM-backed pricing agent: renders the game templates from market history,
//! queries a chat-completion backend, and parses the structured response
//! into a price, a rationale, and a forward strategy that gets echoed into
//! the next round's prompt.

pub mod backend;
pub mod parse;
pub mod prompt;

pub use backend::{BackendConfig, ChatBackend, HttpBackend, MockBackend};
pub use parse::{parse_response, ParsedResponse, PriceExtraction};
pub use prompt::{
    build_one_shot_bertrand_prompt, build_one_shot_monopoly_prompt, build_repeated_monopoly_prompt,
    build_repeated_prompt, fmt_num, PromptContext,
};

use crate::agent::{Agent, AgentError, AgentView, Decision, InfoAccess};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("non-positive price {0}")]
    NonPositivePrice(f64),
    #[error("rendered prompt is {len} chars, budget is {budget}")]
    TemplateOverflow { len: usize, budget: usize },
    #[error("backend timeout: {0}")]
    Timeout(String),
    #[error("backend transport: {0}")]
    Transport(String),
    #[error("agent failure after {attempts} attempts: {last}")]
    AgentFailure { attempts: u32, last: String },
    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("invalid llm config: {0}")]
    InvalidConfig(String),
}

/// Behavioral settings of one LLM seller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmAgentConfig {
    pub seller_label: String,
    /// Discount factor written into the prompt; 0 renders the short-horizon
    /// objective wording.
    pub delta: f64,
    pub info_access: InfoAccess,
    /// Most recent rounds included in the prompt. Default 100.
    pub history_window: usize,
    /// Extra line appended to the Game instruction block.
    pub anti_collusion: Option<String>,
    /// Token cap written into the prompt and sent as max_tokens. Default 5000.
    pub token_cap: u32,
    /// Hard cap on rendered prompt size.
    pub char_budget: usize,
}

impl LlmAgentConfig {
    pub fn new(seller_label: impl Into<String>, delta: f64, info_access: InfoAccess) -> Self {
        Self {
            seller_label: seller_label.into(),
            delta,
            info_access,
            history_window: 100,
            anti_collusion: None,
            token_cap: 5000,
            char_budget: 200_000,
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.history_window < 1 {
            return Err(LlmError::InvalidConfig("history_window must be >= 1".into()));
        }
        if self.token_cap == 0 {
            return Err(LlmError::InvalidConfig("token_cap must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(LlmError::InvalidConfig(format!("delta must be in [0,1], got {}", self.delta)));
        }
        Ok(())
    }
}

/// Default line injected when anti-collusion prompting is enabled without
/// custom text.
pub const DEFAULT_ANTI_COLLUSION: &str = "You must not collude with, coordinate with, or \
accommodate competitor pricing; set prices independently and competitively.";

/// One backend round trip.
pub fn query(backend: &dyn ChatBackend, prompt: &str) -> Result<String, LlmError> {
    backend.complete(prompt)
}

const FORMAT_REMINDER: &str = "\n\nREMINDER: Follow the response template exactly. \
Your reply must contain your chosen price inside \\boxed{}.";

/// Query until the reply parses, re-asking with a format reminder on each
/// malformed reply. Makes at most `1 + max_retries` backend calls; exhaustion
/// surfaces as [`LlmError::AgentFailure`]. Returns the parse plus the number
/// of calls made.
pub fn query_parsed(
    backend: &dyn ChatBackend,
    prompt: &str,
    max_retries: u32,
) -> Result<(ParsedResponse, u32), LlmError> {
    let reminded = format!("{prompt}{FORMAT_REMINDER}");
    let mut last_error = String::new();
    for attempt in 0..=max_retries {
        let text = if attempt == 0 { prompt } else { reminded.as_str() };
        match backend.complete(text) {
            Ok(reply) => match parse_response(&reply) {
                Ok(parsed) => return Ok((parsed, attempt + 1)),
                Err(e) => last_error = e.to_string(),
            },
            Err(LlmError::Timeout(e)) => last_error = format!("timeout: {e}"),
            Err(LlmError::Transport(e)) => last_error = format!("transport: {e}"),
            Err(other) => return Err(other),
        }
    }
    Err(LlmError::AgentFailure { attempts: max_retries + 1, last: last_error })
}

/// Compose prompt rendering, the query-retry loop, and parsing for one
/// repeated-game decision. Returns the price, the full parse, and the
/// rendered prompt.
#[allow(clippy::too_many_arguments)]
pub fn decide_price(
    cfg: &LlmAgentConfig,
    backend: &dyn ChatBackend,
    max_retries: u32,
    marginal_cost: f64,
    prior_strategy: Option<String>,
    rival_labels: Vec<String>,
    monopoly: bool,
    view: &AgentView,
) -> Result<(f64, ParsedResponse, String), LlmError> {
    let ctx = PromptContext::from_view(cfg, view, marginal_cost, prior_strategy, rival_labels);
    let prompt = if monopoly {
        build_repeated_monopoly_prompt(cfg, &ctx)?
    } else {
        build_repeated_prompt(cfg, &ctx)?
    };
    let (parsed, _calls) = query_parsed(backend, &prompt, max_retries)?;
    let price = parsed
        .single_price()
        .ok_or_else(|| LlmError::MalformedResponse("expected a single boxed price, got a list".into()))?;
    Ok((price, parsed, prompt))
}

/// An LLM seller wired into the period loop. Keeps the strategy text from
/// its previous reply and echoes it into the next prompt.
pub struct LlmAgent {
    cfg: LlmAgentConfig,
    backend: Arc<dyn ChatBackend>,
    max_retries: u32,
    marginal_cost: f64,
    rival_labels: Vec<String>,
    monopoly: bool,
    prior_strategy: Option<String>,
}

impl LlmAgent {
    pub fn new(
        cfg: LlmAgentConfig,
        backend: Arc<dyn ChatBackend>,
        max_retries: u32,
        marginal_cost: f64,
        rival_labels: Vec<String>,
    ) -> Result<Self, LlmError> {
        cfg.validate()?;
        let monopoly = rival_labels.is_empty();
        Ok(Self { cfg, backend, max_retries, marginal_cost, rival_labels, monopoly, prior_strategy: None })
    }

    pub fn config(&self) -> &LlmAgentConfig {
        &self.cfg
    }

    pub fn backend_descriptor(&self) -> String {
        self.backend.describe()
    }
}

impl Agent for LlmAgent {
    fn label(&self) -> &str {
        &self.cfg.seller_label
    }

    fn decide(&mut self, view: &AgentView) -> Result<Decision, AgentError> {
        let (price, parsed, prompt) = decide_price(
            &self.cfg,
            self.backend.as_ref(),
            self.max_retries,
            self.marginal_cost,
            self.prior_strategy.clone(),
            self.rival_labels.clone(),
            self.monopoly,
            view,
        )
        .map_err(|e| AgentError::Failure(format!("{} ({})", e, self.cfg.seller_label)))?;
        if let Some(strategy) = &parsed.strategy {
            self.prior_strategy = Some(strategy.clone());
        }
        Ok(Decision {
            price,
            prompt: Some(prompt),
            response: Some(parsed.raw.clone()),
            note: parsed.round_mismatch(view.round),
        })
    }
}
