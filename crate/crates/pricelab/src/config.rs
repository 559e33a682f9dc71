//! Declarative experiment configs: one TOML file describes one condition
//! (market, roster, horizon, convergence rule, seeds, outputs). Unknown keys
//! are rejected; invariants are checked before anything executes.

use crate::agent::InfoAccess;
use crate::engine::ConvergenceRule;
use crate::llm::{BackendConfig, LlmAgentConfig, MockBackend, DEFAULT_ANTI_COLLUSION};
use crate::market::LogitMarketParams;
use crate::qlearn::{ExplorationClock, QInit, QMode};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config: {0}")]
    Invalid(String),
    #[error("q-table file: {0}")]
    Table(#[from] crate::qlearn::QError),
    #[error("backend: {0}")]
    Backend(#[from] crate::llm::LlmError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Numeric benchmark prices anchoring the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Benchmarks {
    pub p_competitive: f64,
    pub p_monopoly: f64,
}

fn default_runs() -> usize {
    1
}

fn default_max_periods() -> usize {
    1000
}

fn default_parallel() -> usize {
    1
}

/// One condition: market, roster, horizon, seeds, outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Condition name used in reports and CSV rows.
    pub name: String,
    /// Base seed; per-run and per-agent seeds derive from it.
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_max_periods")]
    pub max_periods: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_parallel")]
    pub parallel: usize,
    pub market: LogitMarketParams,
    #[serde(default)]
    pub convergence: ConvergenceRule,
    /// Solved on startup when omitted.
    #[serde(default)]
    pub benchmarks: Option<Benchmarks>,
    pub agents: Vec<AgentSpec>,
}

/// Roster entry: one agent family with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    Llm(LlmSpec),
    Qlearn(QlearnSpec),
    GrimTrigger(GrimSpec),
    Scripted(ScriptedSpec),
    Constant(ConstantSpec),
}

impl AgentSpec {
    pub fn label_or(&self, index: usize) -> String {
        let explicit = match self {
            AgentSpec::Llm(s) => &s.label,
            AgentSpec::Qlearn(s) => &s.label,
            AgentSpec::GrimTrigger(s) => &s.label,
            AgentSpec::Scripted(s) => &s.label,
            AgentSpec::Constant(s) => &s.label,
        };
        explicit.clone().unwrap_or_else(|| format!("Seller {}", index + 1))
    }

    pub fn info_access(&self) -> InfoAccess {
        match self {
            AgentSpec::Llm(s) => s.info_access,
            _ => InfoAccess::Full,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            AgentSpec::Llm(s) => !matches!(s.backend, BackendSpec::Http(_)),
            _ => true,
        }
    }
}

fn default_info_access() -> InfoAccess {
    InfoAccess::Full
}

fn default_history_window() -> usize {
    100
}

fn default_token_cap() -> u32 {
    5000
}

fn default_true() -> bool {
    true
}

/// Anti-collusion instruction: `true` injects the stock line, a string
/// overrides it verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AntiCollusion {
    Switch(bool),
    Custom(String),
}

impl AntiCollusion {
    pub fn text(&self) -> Option<String> {
        match self {
            AntiCollusion::Switch(false) => None,
            AntiCollusion::Switch(true) => Some(DEFAULT_ANTI_COLLUSION.to_string()),
            AntiCollusion::Custom(text) => Some(text.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub delta: f64,
    #[serde(default = "default_info_access")]
    pub info_access: InfoAccess,
    #[serde(default = "default_history_window")]
    pub history_window: usize,
    #[serde(default)]
    pub anti_collusion: Option<AntiCollusion>,
    #[serde(default = "default_token_cap")]
    pub token_cap: u32,
    #[serde(default = "crate::llm::backend::default_max_retries")]
    pub max_retries: u32,
    pub backend: BackendSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    /// OpenAI-compatible chat-completion endpoint.
    Http(BackendConfig),
    /// Deterministic well-formed replies carrying these prices.
    MockPrices {
        prices: Vec<f64>,
        #[serde(default = "default_true")]
        hold_last: bool,
    },
    /// Replay raw responses recorded by an earlier run.
    MockReplay { run_dir: PathBuf, agent_index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QlearnSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub mode: QMode,
    pub table_file: PathBuf,
    #[serde(default)]
    pub table_index: usize,
    #[serde(default = "default_clock")]
    pub exploration_clock: ExplorationClock,
}

fn default_clock() -> ExplorationClock {
    ExplorationClock::Restart
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrimSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub p_collusive: f64,
    pub p_competitive: f64,
    #[serde(default = "default_rho")]
    pub rho_detect: f64,
    /// Fix the detection stream; give both agents of a pairing the same seed
    /// to make the signal public.
    #[serde(default)]
    pub signal_seed: Option<u64>,
}

fn default_rho() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub prices: Vec<f64>,
    #[serde(default = "default_true")]
    pub hold_last: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub price: f64,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let cfg: ConfigFile = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_str_validated(text: &str) -> Result<Self, ConfigError> {
        let cfg: ConfigFile = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialized form; parsing it back yields an equal config.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        LogitMarketParams::new(self.market.a, self.market.mu, self.market.a0, self.market.c, self.market.n)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.convergence.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.runs < 1 {
            return Err(ConfigError::Invalid("runs must be >= 1".into()));
        }
        if self.parallel < 1 {
            return Err(ConfigError::Invalid("parallel must be >= 1".into()));
        }
        if self.max_periods < 1 {
            return Err(ConfigError::Invalid("max_periods must be >= 1".into()));
        }
        if self.agents.len() != self.market.n {
            return Err(ConfigError::Invalid(format!(
                "roster has {} agents but market.n = {}",
                self.agents.len(),
                self.market.n
            )));
        }
        if let Some(b) = &self.benchmarks {
            if !(b.p_competitive > 0.0 && b.p_monopoly >= b.p_competitive) {
                return Err(ConfigError::Invalid("benchmarks must satisfy 0 < p_competitive <= p_monopoly".into()));
            }
        }
        for (i, agent) in self.agents.iter().enumerate() {
            agent.validate().map_err(|e| ConfigError::Invalid(format!("agent {i}: {e}")))?;
        }
        Ok(())
    }
}

impl AgentSpec {
    fn validate(&self) -> Result<(), String> {
        match self {
            AgentSpec::Llm(s) => {
                if !(0.0..=1.0).contains(&s.delta) {
                    return Err(format!("delta must be in [0,1], got {}", s.delta));
                }
                if s.history_window < 1 {
                    return Err("history_window must be >= 1".into());
                }
                if s.token_cap == 0 {
                    return Err("token_cap must be > 0".into());
                }
                if let BackendSpec::MockPrices { prices, .. } = &s.backend {
                    if prices.is_empty() {
                        return Err("mock_prices backend needs at least one price".into());
                    }
                    if prices.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                        return Err("mock prices must be finite and positive".into());
                    }
                }
                Ok(())
            }
            AgentSpec::Qlearn(_) => Ok(()),
            AgentSpec::GrimTrigger(s) => {
                crate::rule::GrimTriggerConfig::new(s.p_collusive, s.p_competitive, s.rho_detect)
                    .map(|_| ())
                    .map_err(|e| e.to_string())
            }
            AgentSpec::Scripted(s) => {
                crate::rule::ScriptedAgent::new("x", s.prices.clone(), s.hold_last)
                    .map(|_| ())
                    .map_err(|e| e.to_string())
            }
            AgentSpec::Constant(s) => {
                if !(s.price.is_finite() && s.price > 0.0) {
                    return Err(format!("price must be finite and positive, got {}", s.price));
                }
                Ok(())
            }
        }
    }
}

/// Deterministic seed derivation (splitmix64 over a mixed key) so run and
/// agent seeds are independent of scheduling order.
pub fn derive_seed(base: u64, run_index: u64, agent_index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(run_index.wrapping_add(1)))
        .wrapping_add(0xbf58476d1ce4e5b9u64.wrapping_mul(agent_index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Instantiate the roster for one run.
pub fn build_agents(
    cfg: &ConfigFile,
    benchmarks: &Benchmarks,
    run_index: usize,
) -> Result<Vec<crate::engine::AgentSlot>, ConfigError> {
    use crate::engine::AgentSlot;
    let labels: Vec<String> = cfg.agents.iter().enumerate().map(|(i, a)| a.label_or(i)).collect();
    let mut slots = Vec::with_capacity(cfg.agents.len());
    for (i, spec) in cfg.agents.iter().enumerate() {
        let label = labels[i].clone();
        let seed = derive_seed(cfg.seed, run_index as u64, i as u64);
        let slot = match spec {
            AgentSpec::Llm(s) => {
                let mut agent_cfg = LlmAgentConfig::new(label.clone(), s.delta, s.info_access);
                agent_cfg.history_window = s.history_window;
                agent_cfg.token_cap = s.token_cap;
                agent_cfg.anti_collusion = s.anti_collusion.as_ref().and_then(|a| a.text());
                let backend: std::sync::Arc<dyn crate::llm::ChatBackend> = match &s.backend {
                    BackendSpec::Http(b) => {
                        std::sync::Arc::new(crate::llm::HttpBackend::new(b.clone(), s.token_cap)?)
                    }
                    BackendSpec::MockPrices { prices, hold_last } => {
                        std::sync::Arc::new(MockBackend::prices(prices.clone(), *hold_last))
                    }
                    BackendSpec::MockReplay { run_dir, agent_index } => {
                        std::sync::Arc::new(replay_backend(run_dir, *agent_index)?)
                    }
                };
                let rivals: Vec<String> =
                    labels.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l.clone()).collect();
                let agent =
                    crate::llm::LlmAgent::new(agent_cfg, backend, s.max_retries, cfg.market.c, rivals)?;
                AgentSlot { agent: Box::new(agent), info: s.info_access }
            }
            AgentSpec::Qlearn(s) => {
                let file = crate::qlearn::TableFile::load(&s.table_file)?;
                let table = file
                    .tables
                    .get(s.table_index)
                    .cloned()
                    .ok_or_else(|| {
                        ConfigError::Invalid(format!(
                            "table_index {} out of range; file has {} tables",
                            s.table_index,
                            file.tables.len()
                        ))
                    })?;
                let agent = crate::qlearn::QAgent::new(
                    label.clone(),
                    table,
                    file.params.clone(),
                    s.mode,
                    s.exploration_clock,
                    file.periods,
                    benchmarks.p_competitive,
                    seed,
                );
                AgentSlot::full(Box::new(agent))
            }
            AgentSpec::GrimTrigger(s) => {
                let grim_cfg = crate::rule::GrimTriggerConfig::new(s.p_collusive, s.p_competitive, s.rho_detect)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                let signal_seed = s.signal_seed.unwrap_or(seed);
                AgentSlot::full(Box::new(crate::rule::GrimTriggerAgent::new(label.clone(), grim_cfg, signal_seed)))
            }
            AgentSpec::Scripted(s) => {
                let agent = crate::rule::ScriptedAgent::new(label.clone(), s.prices.clone(), s.hold_last)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                AgentSlot::full(Box::new(agent))
            }
            AgentSpec::Constant(s) => {
                let agent = crate::rule::ScriptedAgent::constant(label.clone(), s.price)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                AgentSlot::full(Box::new(agent))
            }
        };
        slots.push(slot);
    }
    Ok(slots)
}

/// Rebuild a mock backend from the response sidecars of a previous run.
fn replay_backend(run_dir: &Path, agent_index: usize) -> Result<MockBackend, ConfigError> {
    let io_dir = run_dir.join("io");
    let mut rounds: Vec<(usize, PathBuf)> = Vec::new();
    let suffix = format!("_a{agent_index}_response.txt");
    for entry in std::fs::read_dir(&io_dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().to_string();
        if let Some(stem) = name.strip_suffix(&suffix) {
            if let Some(num) = stem.strip_prefix('r') {
                if let Ok(round) = num.parse::<usize>() {
                    rounds.push((round, entry.path()));
                }
            }
        }
    }
    if rounds.is_empty() {
        return Err(ConfigError::Invalid(format!(
            "no recorded responses for agent {agent_index} under {}",
            io_dir.display()
        )));
    }
    rounds.sort_by_key(|(round, _)| *round);
    let mut responses = Vec::with_capacity(rounds.len());
    for (_, path) in rounds {
        responses.push(std::fs::read_to_string(path)?);
    }
    Ok(MockBackend::scripted(responses, false))
}

/// Pretraining job description for the two-stage Q-learning procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainFile {
    pub seed: u64,
    pub out_file: PathBuf,
    /// "desk" (window 10k, cap 5M) or "paper" (window 100k, cap 1e9).
    #[serde(default = "default_profile")]
    pub profile: String,
    pub market: LogitMarketParams,
    #[serde(default)]
    pub qparams: QparamsSpec,
}

fn default_profile() -> String {
    "desk".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QparamsSpec {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Grid size.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Fractional widening of the competitive-to-monopoly corridor.
    #[serde(default = "default_xi")]
    pub xi: f64,
    #[serde(default = "default_init")]
    pub init: QInit,
}

impl Default for QparamsSpec {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            beta: default_beta(),
            delta: default_delta(),
            m: default_m(),
            xi: default_xi(),
            init: default_init(),
        }
    }
}

fn default_alpha() -> f64 {
    0.15
}

fn default_beta() -> f64 {
    0.004
}

fn default_delta() -> f64 {
    0.95
}

fn default_m() -> usize {
    15
}

fn default_xi() -> f64 {
    0.1
}

fn default_init() -> QInit {
    QInit::UniformRival
}

impl PretrainFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let cfg: PretrainFile = toml::from_str(&text)?;
        if cfg.profile != "desk" && cfg.profile != "paper" {
            return Err(ConfigError::Invalid(format!("profile must be desk or paper, got {}", cfg.profile)));
        }
        LogitMarketParams::new(cfg.market.a, cfg.market.mu, cfg.market.a0, cfg.market.c, cfg.market.n)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

/// Condition manifest written next to every batch of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub software_version: String,
    pub condition: String,
    pub base_seed: u64,
    pub runs: usize,
    pub max_periods: usize,
    pub market: LogitMarketParams,
    pub convergence: ConvergenceRule,
    pub benchmarks: Benchmarks,
    pub agents: Vec<AgentSpec>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<(), ConfigError> {
        std::fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| ConfigError::Invalid(format!("manifest serialization: {e}")))?;
        std::fs::write(dir.join("manifest.json"), body)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Invalid(format!("manifest parse: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SCRIPTED: &str = r#"
name = "demo"
seed = 42
runs = 2
max_periods = 50

[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2

[convergence]
window = 10
band = 0.05

[benchmarks]
p_competitive = 1.4729266441
p_monopoly = 1.9249809191

[[agents]]
kind = "scripted"
prices = [1.8]
hold_last = true

[[agents]]
kind = "constant"
price = 1.8
"#;

    #[test]
    fn parses_and_validates() {
        let cfg = ConfigFile::from_str_validated(TWO_SCRIPTED).unwrap();
        assert_eq!(cfg.name, "demo");
        assert_eq!(cfg.agents.len(), 2);
        assert_eq!(cfg.agents[0].label_or(0), "Seller 1");
    }

    #[test]
    fn round_trips_through_canonical_form() {
        let cfg = ConfigFile::from_str_validated(TWO_SCRIPTED).unwrap();
        let canonical = cfg.canonical_toml();
        let reparsed = ConfigFile::from_str_validated(&canonical).unwrap();
        assert_eq!(cfg, reparsed);
        // Canonical form is a fixed point.
        assert_eq!(canonical, reparsed.canonical_toml());
    }

    #[test]
    fn unknown_top_level_key_rejected() {
        let bad = format!("{TWO_SCRIPTED}\nbogus_key = 1\n");
        assert!(ConfigFile::from_str_validated(&bad).is_err());
    }

    #[test]
    fn unknown_agent_key_rejected() {
        let bad = TWO_SCRIPTED.replace("price = 1.8", "price = 1.8\nmystery = true");
        assert!(ConfigFile::from_str_validated(&bad).is_err());
    }

    #[test]
    fn roster_size_must_match_market() {
        let bad = TWO_SCRIPTED.replace("n = 2", "n = 3");
        let err = ConfigFile::from_str_validated(&bad).unwrap_err();
        assert!(err.to_string().contains("roster"));
    }

    #[test]
    fn llm_mock_agent_parses() {
        let text = r#"
name = "llm-demo"
seed = 7
[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2
[[agents]]
kind = "llm"
delta = 0.95
[agents.backend]
kind = "mock_prices"
prices = [1.8, 1.79]
[[agents]]
kind = "llm"
delta = 0.0
info_access = "own_only"
anti_collusion = true
[agents.backend]
kind = "mock_prices"
prices = [1.6]
"#;
        let cfg = ConfigFile::from_str_validated(text).unwrap();
        match &cfg.agents[1] {
            AgentSpec::Llm(s) => {
                assert_eq!(s.info_access, InfoAccess::OwnOnly);
                assert_eq!(s.anti_collusion.as_ref().unwrap().text().unwrap(), DEFAULT_ANTI_COLLUSION);
                assert!(cfg.agents[1].is_deterministic());
            }
            _ => panic!("expected llm"),
        }
    }

    #[test]
    fn custom_anti_collusion_text() {
        let a = AntiCollusion::Custom("Price independently.".into());
        assert_eq!(a.text().unwrap(), "Price independently.");
        assert_eq!(AntiCollusion::Switch(false).text(), None);
    }

    #[test]
    fn http_backend_spec_parses_with_defaults() {
        let text = r#"
name = "http-demo"
seed = 7
[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 1
[[agents]]
kind = "llm"
delta = 0.95
[agents.backend]
kind = "http"
endpoint = "http://localhost:8000/v1/chat/completions"
model_name = "some-model"
"#;
        let cfg = ConfigFile::from_str_validated(text).unwrap();
        match &cfg.agents[0] {
            AgentSpec::Llm(s) => match &s.backend {
                BackendSpec::Http(b) => {
                    assert_eq!(b.temperature, 0.6);
                    assert_eq!(b.max_retries, 2);
                    assert!(!cfg.agents[0].is_deterministic());
                }
                _ => panic!("expected http"),
            },
            _ => panic!("expected llm"),
        }
    }

    #[test]
    fn build_agents_for_scripted_roster() {
        let cfg = ConfigFile::from_str_validated(TWO_SCRIPTED).unwrap();
        let b = cfg.benchmarks.unwrap();
        let slots = build_agents(&cfg, &b, 0).unwrap();
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].agent.label(), "Seller 1");
    }

    #[test]
    fn seed_derivation_is_stable_and_spread() {
        let a = derive_seed(42, 0, 0);
        let b = derive_seed(42, 0, 1);
        let c = derive_seed(42, 1, 0);
        assert_eq!(a, derive_seed(42, 0, 0));
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
    }

    #[test]
    fn pretrain_file_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.toml");
        std::fs::write(
            &path,
            r#"
seed = 9
out_file = "out/tables.plqt"
[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2
"#,
        )
        .unwrap();
        let p = PretrainFile::load(&path).unwrap();
        assert_eq!(p.profile, "desk");
        assert_eq!(p.qparams.m, 15);
        assert_eq!(p.qparams.alpha, 0.15);
    }
}
