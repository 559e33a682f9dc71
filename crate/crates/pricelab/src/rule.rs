//! Deterministic reference agents: grim trigger (with optional stochastic
//! deviation detection), constant-price, and scripted trajectories. These
//! validate the theory modules and serve as replayable test fixtures.

use crate::agent::{Agent, AgentError, AgentView, Decision};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("invalid rule-agent config: {0}")]
    Invalid(String),
}

/// Price at the collusive level until a rival deviation is detected, then
/// price competitively forever.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrimTriggerConfig {
    pub p_collusive: f64,
    pub p_competitive: f64,
    /// Probability a rival deviation is detected in the period it happens;
    /// 1 is perfect monitoring.
    pub rho_detect: f64,
}

impl GrimTriggerConfig {
    pub fn new(p_collusive: f64, p_competitive: f64, rho_detect: f64) -> Result<Self, RuleError> {
        if !(p_competitive < p_collusive) {
            return Err(RuleError::Invalid(format!(
                "p_competitive {p_competitive} must be below p_collusive {p_collusive}"
            )));
        }
        if !(0.0..=1.0).contains(&rho_detect) {
            return Err(RuleError::Invalid(format!("rho_detect must be in [0,1], got {rho_detect}")));
        }
        Ok(Self { p_collusive, p_competitive, rho_detect })
    }
}

/// On-path deviation check tolerance: a rival price counts as the collusive
/// price when within this gap.
const ON_PATH_TOL: f64 = 1e-9;

/// Grim-trigger agent. The trigger is absorbing: once punished, nothing
/// restores collusive pricing.
///
/// Detection draws are local to this agent and seeded; wiring the same seed
/// into both agents of a pairing makes the signal effectively public (both
/// see identical draws).
pub struct GrimTriggerAgent {
    label: String,
    cfg: GrimTriggerConfig,
    rng: ChaCha8Rng,
    triggered: bool,
}

impl GrimTriggerAgent {
    pub fn new(label: impl Into<String>, cfg: GrimTriggerConfig, signal_seed: u64) -> Self {
        Self { label: label.into(), cfg, rng: ChaCha8Rng::seed_from_u64(signal_seed), triggered: false }
    }

    pub fn triggered(&self) -> bool {
        self.triggered
    }
}

impl Agent for GrimTriggerAgent {
    fn label(&self) -> &str {
        &self.label
    }

    fn decide(&mut self, view: &AgentView) -> Result<Decision, AgentError> {
        if !self.triggered {
            if let Some(last) = view.history.last() {
                let rivals = last.rival_prices.as_ref().ok_or_else(|| {
                    AgentError::Failure("grim trigger requires rival price history".into())
                })?;
                let deviated = rivals.iter().any(|p| (p - self.cfg.p_collusive).abs() > ON_PATH_TOL);
                if deviated {
                    // One detection draw per deviating period observed.
                    let detected = self.cfg.rho_detect >= 1.0
                        || (self.cfg.rho_detect > 0.0 && self.rng.gen::<f64>() < self.cfg.rho_detect);
                    if detected {
                        self.triggered = true;
                    }
                }
            }
        }
        let price = if self.triggered { self.cfg.p_competitive } else { self.cfg.p_collusive };
        Ok(Decision::price(price))
    }
}

/// Plays back a fixed trajectory; optionally holds the last price forever.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedAgent {
    pub trajectory: Vec<f64>,
    pub hold_last: bool,
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    "scripted".to_string()
}

impl ScriptedAgent {
    pub fn new(label: impl Into<String>, trajectory: Vec<f64>, hold_last: bool) -> Result<Self, RuleError> {
        if trajectory.is_empty() {
            return Err(RuleError::Invalid("trajectory must be nonempty".into()));
        }
        if trajectory.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(RuleError::Invalid("all scripted prices must be finite and positive".into()));
        }
        Ok(Self { trajectory, hold_last, label: label.into() })
    }

    /// A price held forever.
    pub fn constant(label: impl Into<String>, price: f64) -> Result<Self, RuleError> {
        Self::new(label, vec![price], true)
    }

    /// Price for 0-based step `t`.
    pub fn price_at(&self, t: usize) -> Result<f64, AgentError> {
        if t < self.trajectory.len() {
            Ok(self.trajectory[t])
        } else if self.hold_last {
            Ok(*self.trajectory.last().expect("nonempty"))
        } else {
            Err(AgentError::ScriptExhausted(t + 1))
        }
    }
}

impl Agent for ScriptedAgent {
    fn label(&self) -> &str {
        &self.label
    }

    fn decide(&mut self, view: &AgentView) -> Result<Decision, AgentError> {
        self.price_at(view.round - 1).map(Decision::price)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::VisiblePeriod;
    use crate::market::{market_outcome, LogitMarketParams, PriceVector};

    fn period(round: usize, own: f64, rivals: Vec<f64>) -> VisiblePeriod {
        VisiblePeriod { round, own_price: own, own_quantity: 0.0, own_profit: 0.0, rival_prices: Some(rivals) }
    }

    #[test]
    fn stays_on_path_against_itself() {
        let cfg = GrimTriggerConfig::new(1.92, 1.47, 1.0).unwrap();
        let mut a = GrimTriggerAgent::new("g1", cfg, 1);
        let mut history = Vec::new();
        for round in 1..=1000 {
            let view = AgentView { round, n_sellers: 2, history: &history };
            let d = a.decide(&view).unwrap();
            assert_eq!(d.price, 1.92, "round {round}");
            history.push(period(round, 1.92, vec![1.92]));
        }
        assert!(!a.triggered());
    }

    #[test]
    fn single_deviation_triggers_forever() {
        let cfg = GrimTriggerConfig::new(1.92, 1.47, 1.0).unwrap();
        let mut a = GrimTriggerAgent::new("g1", cfg, 1);
        let mut history = Vec::new();
        for round in 1..=5 {
            let view = AgentView { round, n_sellers: 2, history: &history };
            assert_eq!(a.decide(&view).unwrap().price, 1.92);
            history.push(period(round, 1.92, vec![1.92]));
        }
        // Rival undercuts in round 6.
        history.push(period(6, 1.92, vec![1.47]));
        for round in 7..=20 {
            let view = AgentView { round, n_sellers: 2, history: &history };
            assert_eq!(a.decide(&view).unwrap().price, 1.47, "round {round}");
            // Rival returns to the collusive price; the trigger must hold.
            history.push(period(round, 1.47, vec![1.92]));
        }
        assert!(a.triggered());
    }

    #[test]
    fn detection_time_is_geometric_under_partial_monitoring() {
        // Rival deviates every period at rho = 0.5: the first-detection time
        // is geometric with mean 2.
        let cfg = GrimTriggerConfig::new(1.92, 1.47, 0.5).unwrap();
        let trials = 10_000;
        let mut total = 0.0;
        for seed in 0..trials {
            let mut a = GrimTriggerAgent::new("g1", cfg, seed);
            let mut history = Vec::new();
            let mut round = 1;
            loop {
                history.push(period(round, 1.92, vec![1.47]));
                round += 1;
                let view = AgentView { round, n_sellers: 2, history: &history };
                let d = a.decide(&view).unwrap();
                if d.price == 1.47 {
                    break;
                }
                if round > 200 {
                    panic!("no trigger after 200 deviating rounds");
                }
            }
            // Rounds of deviation observed before punishment started.
            total += (round - 1) as f64;
        }
        let mean = total / trials as f64;
        assert!((mean - 2.0).abs() < 0.2, "mean detection time {mean}");
    }

    #[test]
    fn blind_monitor_never_triggers() {
        let cfg = GrimTriggerConfig::new(1.92, 1.47, 0.0).unwrap();
        let mut a = GrimTriggerAgent::new("g1", cfg, 9);
        let mut history = Vec::new();
        for round in 1..=200 {
            history.push(period(round, 1.92, vec![1.00]));
            let view = AgentView { round: round + 1, n_sellers: 2, history: &history };
            assert_eq!(a.decide(&view).unwrap().price, 1.92);
        }
    }

    #[test]
    fn paired_triggers_match_market_arithmetic() {
        // Two grim triggers at (p_mono, p_comp) earn exactly the symmetric
        // market outcome every period.
        let market = LogitMarketParams::baseline(2);
        let cfg = GrimTriggerConfig::new(1.9249809191, 1.4729266441, 1.0).unwrap();
        let mut a = GrimTriggerAgent::new("g1", cfg, 1);
        let mut b = GrimTriggerAgent::new("g2", cfg, 1);
        let mut history_a = Vec::new();
        let mut history_b = Vec::new();
        let expected = market_outcome(&market, &PriceVector::new(vec![1.9249809191; 2]).unwrap()).unwrap();
        for round in 1..=100 {
            let pa = a.decide(&AgentView { round, n_sellers: 2, history: &history_a }).unwrap().price;
            let pb = b.decide(&AgentView { round, n_sellers: 2, history: &history_b }).unwrap().price;
            let out = market_outcome(&market, &PriceVector::new(vec![pa, pb]).unwrap()).unwrap();
            assert!((out.profits[0] - expected.profits[0]).abs() < 1e-12);
            assert!((out.profits[1] - expected.profits[1]).abs() < 1e-12);
            history_a.push(period(round, pa, vec![pb]));
            history_b.push(period(round, pb, vec![pa]));
        }
    }

    #[test]
    fn scripted_holds_and_exhausts() {
        let hold = ScriptedAgent::new("s", vec![1.6], true).unwrap();
        for t in 0..50 {
            assert_eq!(hold.price_at(t).unwrap(), 1.6);
        }
        let strict = ScriptedAgent::new("s", vec![1.0, 2.0], false).unwrap();
        assert_eq!(strict.price_at(1).unwrap(), 2.0);
        assert!(matches!(strict.price_at(2), Err(AgentError::ScriptExhausted(3))));
    }

    #[test]
    fn scripted_validation() {
        assert!(ScriptedAgent::new("s", vec![], true).is_err());
        assert!(ScriptedAgent::new("s", vec![0.0], true).is_err());
        assert!(ScriptedAgent::new("s", vec![-1.0], true).is_err());
        assert!(ScriptedAgent::constant("s", 1.6).is_ok());
    }
}
