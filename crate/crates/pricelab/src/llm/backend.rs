//! Chat-completion backends: an OpenAI-compatible HTTP client and a
//! first-class mock (scripted, rule-driven, or replay) so every experiment
//! can run without network or GPU.

use super::LlmError;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::sync::{Mutex, OnceLock};
use std::time::Duration;

/// Wire settings for a remote model speaking the chat-completion shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    /// Full chat-completions URL, e.g.
    /// `http://localhost:8000/v1/chat/completions`.
    pub endpoint: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key; omit for
    /// keyless local endpoints.
    #[serde(default)]
    pub api_key_env: Option<String>,
    /// Sampling temperature, recorded in every manifest. Default 0.6.
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Extra backend calls allowed after the first one. Default 2.
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
}

fn default_temperature() -> f64 {
    0.6
}

fn default_timeout_secs() -> u64 {
    120
}

pub(crate) fn default_max_retries() -> u32 {
    2
}

/// One blocking chat-completion round trip.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, LlmError>;

    /// Short human-readable identity for manifests and logs.
    fn describe(&self) -> String;
}

/// OpenAI-compatible HTTP backend. The API key is resolved from the
/// environment at construction so a missing key fails before any period
/// executes.
pub struct HttpBackend {
    cfg: BackendConfig,
    api_key: Option<String>,
    max_tokens: u32,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(cfg: BackendConfig, max_tokens: u32) -> Result<Self, LlmError> {
        let api_key = match &cfg.api_key_env {
            Some(var) => Some(
                std::env::var(var)
                    .map_err(|_| LlmError::MissingApiKey(var.clone()))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(Self { cfg, api_key, max_tokens, client })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.cfg
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        let body = json!({
            "model": self.cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
            "max_tokens": self.max_tokens,
        });
        let mut req = self.client.post(&self.cfg.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                LlmError::Timeout(e.to_string())
            } else {
                LlmError::Transport(e.to_string())
            }
        })?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(LlmError::Transport(format!("HTTP {status}: {text}")));
        }
        let value: serde_json::Value =
            resp.json().map_err(|e| LlmError::Transport(format!("bad JSON: {e}")))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| LlmError::Transport("no choices[0].message.content in reply".into()))
    }

    fn describe(&self) -> String {
        format!("http:{}@{}", self.cfg.model_name, self.cfg.endpoint)
    }
}

fn prompt_round_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"The current round is round (\d+)\.").expect("valid regex"))
}

/// Render a well-formed reply for the repeated-game response template.
pub fn templated_reply(round: Option<u64>, price: f64) -> String {
    let round_line = match round {
        Some(r) => format!("<round>{r}</round>\n"),
        None => String::new(),
    };
    format!(
        "{round_line}My chosen price: \\boxed{{{}}}.\n<rationale>\n  Scripted reply.\n</rationale>\n<strategy>\n  Continue the scripted trajectory.\n</strategy>",
        super::prompt::fmt_num(price)
    )
}

type ResponseRule = Box<dyn Fn(&str, usize) -> String + Send + Sync>;

enum MockKind {
    /// Raw response strings returned in order.
    Scripted { responses: Vec<String>, hold_last: bool },
    /// Well-formed template replies carrying these prices in order; the
    /// round number is echoed back out of the prompt.
    Prices { prices: Vec<f64>, hold_last: bool },
    /// Arbitrary prompt -> response rule.
    Rule(ResponseRule),
}

/// Deterministic in-process backend implementing the same interface as the
/// HTTP client.
pub struct MockBackend {
    kind: MockKind,
    calls: Mutex<usize>,
}

impl MockBackend {
    /// Replay raw responses verbatim, in order.
    pub fn scripted(responses: Vec<String>, hold_last: bool) -> Self {
        Self { kind: MockKind::Scripted { responses, hold_last }, calls: Mutex::new(0) }
    }

    /// Emit well-formed template replies with the given prices, echoing the
    /// prompted round.
    pub fn prices(prices: Vec<f64>, hold_last: bool) -> Self {
        Self { kind: MockKind::Prices { prices, hold_last }, calls: Mutex::new(0) }
    }

    /// Drive responses from a closure of (prompt, call index).
    pub fn rule(rule: impl Fn(&str, usize) -> String + Send + Sync + 'static) -> Self {
        Self { kind: MockKind::Rule(Box::new(rule)), calls: Mutex::new(0) }
    }

    /// Backend calls made so far.
    pub fn calls(&self) -> usize {
        *self.calls.lock().expect("mock call counter poisoned")
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        let mut calls = self.calls.lock().expect("mock call counter poisoned");
        let index = *calls;
        *calls += 1;
        drop(calls);
        match &self.kind {
            MockKind::Scripted { responses, hold_last } => {
                if index < responses.len() {
                    Ok(responses[index].clone())
                } else if *hold_last && !responses.is_empty() {
                    Ok(responses.last().expect("nonempty").clone())
                } else {
                    Err(LlmError::Transport(format!("mock script exhausted at call {index}")))
                }
            }
            MockKind::Prices { prices, hold_last } => {
                let price = if index < prices.len() {
                    prices[index]
                } else if *hold_last && !prices.is_empty() {
                    *prices.last().expect("nonempty")
                } else {
                    return Err(LlmError::Transport(format!("mock price list exhausted at call {index}")));
                };
                let round = prompt_round_re()
                    .captures(prompt)
                    .and_then(|c| c[1].parse::<u64>().ok());
                Ok(templated_reply(round, price))
            }
            MockKind::Rule(rule) => Ok(rule(prompt, index)),
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            MockKind::Scripted { responses, .. } => format!("mock:scripted[{}]", responses.len()),
            MockKind::Prices { prices, .. } => format!("mock:prices[{}]", prices.len()),
            MockKind::Rule(_) => "mock:rule".to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_mock_echoes_prompt_round() {
        let mock = MockBackend::prices(vec![1.8, 1.7], true);
        let reply = mock.complete("The current round is round 12.\n...").unwrap();
        assert!(reply.contains("<round>12</round>"));
        assert!(reply.contains("\\boxed{1.8}"));
        let reply2 = mock.complete("The current round is round 13.\n...").unwrap();
        assert!(reply2.contains("\\boxed{1.7}"));
        // hold_last keeps returning the final price
        let reply3 = mock.complete("The current round is round 14.\n...").unwrap();
        assert!(reply3.contains("\\boxed{1.7}"));
        assert_eq!(mock.calls(), 3);
    }

    #[test]
    fn scripted_mock_exhausts_without_hold() {
        let mock = MockBackend::scripted(vec!["a".into()], false);
        assert_eq!(mock.complete("x").unwrap(), "a");
        assert!(mock.complete("x").is_err());
    }

    #[test]
    fn missing_api_key_fails_at_construction() {
        let cfg = BackendConfig {
            endpoint: "http://localhost:9/v1/chat/completions".into(),
            model_name: "m".into(),
            api_key_env: Some("PRICELAB_TEST_KEY_THAT_DOES_NOT_EXIST".into()),
            temperature: 0.6,
            timeout_secs: 5,
            max_retries: 2,
        };
        assert!(matches!(HttpBackend::new(cfg, 5000), Err(LlmError::MissingApiKey(_))));
    }
}
