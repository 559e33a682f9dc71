//! Closed-form analysis of the two-seller repeated pricing game with linear
//! demand: equilibrium prices, the four payoffs that drive deviation
//! incentives, and the minimum patience needed to sustain a target price —
//! under perfect monitoring and under stochastic deviation detection.
//!
//! Demand is `Q_i = a - b*p_i + d*p_rival`, profit is `Q_i * (p_i - c)`.
//! A grim-trigger Monte-Carlo oracle cross-checks the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("invalid linear market parameters: {0}")]
    InvalidParams(String),
    #[error("target price {p_c} outside sustainable range ({lo}, {hi}]")]
    OutOfRangeTarget { p_c: f64, lo: f64, hi: f64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Linear-demand market primitives.
///
/// Validity requires `b > d > 0`, `a > c*(b - d)` and `c < a/b`; together
/// these guarantee a competitive price above cost and a monopoly price above
/// the competitive one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearMarketParams {
    /// Demand intercept.
    pub a: f64,
    /// Own-price sensitivity.
    pub b: f64,
    /// Cross-price sensitivity.
    pub d: f64,
    /// Marginal cost.
    pub c: f64,
}

impl LinearMarketParams {
    pub fn new(a: f64, b: f64, d: f64, c: f64) -> Result<Self, TheoryError> {
        if ![a, b, d, c].iter().all(|x| x.is_finite()) {
            return Err(TheoryError::InvalidParams("all parameters must be finite".into()));
        }
        if !(b > d && d > 0.0) {
            return Err(TheoryError::InvalidParams(format!("need b > d > 0, got b={b}, d={d}")));
        }
        if !(a > c * (b - d)) {
            return Err(TheoryError::InvalidParams(format!(
                "need a > c*(b-d), got a={a}, c*(b-d)={}",
                c * (b - d)
            )));
        }
        if !(c < a / b) {
            return Err(TheoryError::InvalidParams(format!("need c < a/b, got c={c}, a/b={}", a / b)));
        }
        Ok(Self { a, b, d, c })
    }
}

/// The four payoffs that matter for sustaining a target price: undercut a
/// colluding rival, collude jointly, compete jointly, or get undercut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffQuad {
    /// Profit from undercutting to the competitive price while the rival
    /// holds the target price.
    pub pi_dev: f64,
    /// Joint-target-price profit.
    pub pi_c: f64,
    /// Joint-competitive-price profit.
    pub pi_star: f64,
    /// Profit from holding the target price while the rival undercuts.
    pub pi_sucker: f64,
}

/// Per-seller deviation-detection probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitoringProfile {
    pub rho_1: f64,
    pub rho_2: f64,
}

impl MonitoringProfile {
    pub fn new(rho_1: f64, rho_2: f64) -> Result<Self, TheoryError> {
        for rho in [rho_1, rho_2] {
            if !(0.0..=1.0).contains(&rho) {
                return Err(TheoryError::InvalidScenario(format!("rho must be in [0,1], got {rho}")));
            }
        }
        Ok(Self { rho_1, rho_2 })
    }

    /// Both sellers observe rivals perfectly.
    pub fn perfect() -> Self {
        Self { rho_1: 1.0, rho_2: 1.0 }
    }
}

/// A target price two sellers try to sustain, together with their patience.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollusionScenario {
    pub params: LinearMarketParams,
    pub p_c: f64,
    pub delta_1: f64,
    pub delta_2: f64,
}

impl CollusionScenario {
    pub fn new(params: LinearMarketParams, p_c: f64, delta_1: f64, delta_2: f64) -> Result<Self, TheoryError> {
        check_target(&params, p_c)?;
        for delta in [delta_1, delta_2] {
            if !(0.0..1.0).contains(&delta) {
                return Err(TheoryError::InvalidScenario(format!("delta must be in [0,1), got {delta}")));
            }
        }
        Ok(Self { params, p_c, delta_1, delta_2 })
    }
}

/// Public monitoring signal: `Bad` only ever follows a deviation (no false
/// alarms).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalOutcome {
    Good,
    Bad,
}

/// `Q_i = a - b*own + d*rival`. May be negative; callers that need demand
/// validity must check.
pub fn linear_demand(params: &LinearMarketParams, own_price: f64, rival_price: f64) -> f64 {
    params.a - params.b * own_price + params.d * rival_price
}

/// `(own - c) * Q_i`.
pub fn linear_profit(params: &LinearMarketParams, own_price: f64, rival_price: f64) -> f64 {
    (own_price - params.c) * linear_demand(params, own_price, rival_price)
}

/// One-shot competitive equilibrium price `(a + b*c) / (2b - d)`, strictly
/// above cost under the parameter invariants.
pub fn nash_price_linear(params: &LinearMarketParams) -> f64 {
    (params.a + params.b * params.c) / (2.0 * params.b - params.d)
}

/// Joint-profit-maximizing symmetric price `(a + (b-d)*c) / (2*(b-d))`,
/// the first-order condition of `(p-c)*(a - (b-d)*p)`.
pub fn monopoly_price_linear(params: &LinearMarketParams) -> f64 {
    let bd = params.b - params.d;
    (params.a + bd * params.c) / (2.0 * bd)
}

fn check_target(params: &LinearMarketParams, p_c: f64) -> Result<(), TheoryError> {
    let lo = nash_price_linear(params);
    let hi = monopoly_price_linear(params);
    if !p_c.is_finite() || p_c <= lo || p_c > hi {
        return Err(TheoryError::OutOfRangeTarget { p_c, lo, hi });
    }
    Ok(())
}

/// Evaluate the four payoffs at the four price pairs
/// `(p*, p_c)`, `(p_c, p_c)`, `(p*, p*)`, `(p_c, p*)`.
///
/// The strict ordering `pi_dev > pi_c > pi_star > pi_sucker` holds for every
/// valid target; it degenerates only in the `p_c -> p*` limit.
pub fn payoff_quad(params: &LinearMarketParams, p_c: f64) -> Result<PayoffQuad, TheoryError> {
    check_target(params, p_c)?;
    let p_star = nash_price_linear(params);
    Ok(PayoffQuad {
        pi_dev: linear_profit(params, p_star, p_c),
        pi_c: linear_profit(params, p_c, p_c),
        pi_star: linear_profit(params, p_star, p_star),
        pi_sucker: linear_profit(params, p_c, p_star),
    })
}

/// Minimum common discount factor sustaining the target price under perfect
/// monitoring: `(pi_dev - pi_c) / (pi_dev - pi_star)`, in (0,1) and strictly
/// increasing in the target price.
pub fn patience_threshold(params: &LinearMarketParams, p_c: f64) -> Result<f64, TheoryError> {
    let q = payoff_quad(params, p_c)?;
    Ok((q.pi_dev - q.pi_c) / (q.pi_dev - q.pi_star))
}

/// Patience threshold under imperfect monitoring, with the seller's
/// deviations detected by its rival with probability `rho_rival`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitoredThreshold {
    pub value: f64,
    /// Set when `rho_rival` = 0: punishment never triggers, so no discount
    /// factor below 1 sustains the target price.
    pub degenerate: bool,
}

/// `(pi_dev - pi_c) / (pi_dev - pi_c + rho_rival*(pi_c - pi_star))`:
/// strictly decreasing in `rho_rival`, equal to [`patience_threshold`] at
/// `rho_rival` = 1, and exactly 1 (flagged degenerate) at `rho_rival` = 0.
pub fn monitored_threshold(
    params: &LinearMarketParams,
    p_c: f64,
    rho_rival: f64,
) -> Result<MonitoredThreshold, TheoryError> {
    if !(0.0..=1.0).contains(&rho_rival) {
        return Err(TheoryError::InvalidScenario(format!("rho must be in [0,1], got {rho_rival}")));
    }
    let q = payoff_quad(params, p_c)?;
    if rho_rival == 0.0 {
        return Ok(MonitoredThreshold { value: 1.0, degenerate: true });
    }
    let gain = q.pi_dev - q.pi_c;
    let value = gain / (gain + rho_rival * (q.pi_c - q.pi_star));
    Ok(MonitoredThreshold { value, degenerate: false })
}

/// Monte-Carlo estimate of seller 1's discounted payoff under grim trigger
/// with stochastic deviation detection.
///
/// With `deviate` unset both sellers stay on the target price forever and the
/// estimate is `pi_c / (1 - delta_1)` up to truncation. With `deviate` set,
/// seller 1 undercuts once at t=0; the rival detects with probability
/// `rho.rho_2`, in which case both price competitively from t=1 on, otherwise
/// the target-price path resumes.
///
/// The stream is truncated at `horizon` periods; pass `None` to truncate
/// where `delta_1^t` falls below 1e-6. Runs are bit-reproducible given the
/// seed, and each trial draws from a substream derived from (seed, trial).
pub fn grim_trigger_mc_oracle(
    scenario: &CollusionScenario,
    rho: &MonitoringProfile,
    deviate: bool,
    horizon: Option<usize>,
    trials: usize,
    seed: u64,
) -> Result<f64, TheoryError> {
    if trials < 1 {
        return Err(TheoryError::InvalidScenario("trials must be >= 1".into()));
    }
    let delta = scenario.delta_1;
    let horizon = match horizon {
        Some(h) => {
            if delta > 0.0 && delta.powi(h as i32) >= 1e-6 {
                return Err(TheoryError::InvalidScenario(format!(
                    "horizon {h} too short: delta^horizon must fall below 1e-6"
                )));
            }
            h
        }
        None => truncation_horizon(delta),
    };
    let q = payoff_quad(&scenario.params, scenario.p_c)?;

    let mut total = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut value = 0.0;
        let mut weight = 1.0;
        let mut punished = false;
        for t in 0..horizon {
            let pi = if t == 0 && deviate {
                // One-shot undercut; detection decides the continuation path.
                punished = rng.gen::<f64>() < rho.rho_2;
                q.pi_dev
            } else if punished {
                q.pi_star
            } else {
                q.pi_c
            };
            value += weight * pi;
            weight *= delta;
        }
        total += value;
    }
    Ok(total / trials as f64)
}

/// Smallest t with `delta^t < 1e-6` (capped for delta near 1).
pub fn truncation_horizon(delta: f64) -> usize {
    if delta <= 0.0 {
        return 1;
    }
    let t = (1e-6f64.ln() / delta.ln()).ceil();
    (t as usize).clamp(1, 20_000_000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn demo() -> LinearMarketParams {
        LinearMarketParams::new(2.0, 1.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn demand_and_profit_worked_examples() {
        let p = demo();
        assert_eq!(linear_demand(&p, 2.0, 2.0), 1.0);
        assert_eq!(linear_demand(&p, 2.0, 2.5), 1.25);
        // Intercept cancellation: own = a/b, rival = 0.
        assert_eq!(linear_demand(&p, 2.0, 0.0), 0.0);
        assert_eq!(linear_profit(&p, 2.0, 2.0), 1.0);
        assert_eq!(linear_profit(&p, 2.0, 2.5), 1.25);
        assert_eq!(linear_profit(&p, 1.0, 1.7), 0.0);
    }

    #[test]
    fn equilibrium_prices_worked_examples() {
        assert_eq!(nash_price_linear(&demo()), 2.0);
        assert_eq!(monopoly_price_linear(&demo()), 2.5);
        let p2 = LinearMarketParams::new(4.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(nash_price_linear(&p2), 2.0);
        assert_eq!(monopoly_price_linear(&p2), 2.5);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(LinearMarketParams::new(2.0, 0.5, 1.0, 1.0).is_err()); // b <= d
        assert!(LinearMarketParams::new(0.4, 1.0, 0.5, 1.0).is_err()); // a <= c(b-d)
        assert!(LinearMarketParams::new(2.0, 4.0, 0.5, 1.0).is_err()); // c >= a/b
    }

    #[test]
    fn payoff_quad_worked_example() {
        let q = payoff_quad(&demo(), 2.5).unwrap();
        assert_eq!(q.pi_dev, 1.25);
        assert_eq!(q.pi_c, 1.125);
        assert_eq!(q.pi_star, 1.0);
        assert_eq!(q.pi_sucker, 0.75);
    }

    #[test]
    fn payoffs_collapse_at_competitive_limit() {
        let p = demo();
        let p_star = nash_price_linear(&p);
        let q = payoff_quad(&p, p_star + 1e-9).unwrap();
        for v in [q.pi_dev, q.pi_c, q.pi_star, q.pi_sucker] {
            assert!((v - q.pi_star).abs() < 1e-8);
        }
    }

    #[test]
    fn target_range_enforced() {
        let p = demo();
        assert!(matches!(payoff_quad(&p, 2.0), Err(TheoryError::OutOfRangeTarget { .. })));
        assert!(matches!(payoff_quad(&p, 2.51), Err(TheoryError::OutOfRangeTarget { .. })));
        assert!(payoff_quad(&p, 2.5).is_ok()); // monopoly price is included
    }

    #[test]
    fn patience_threshold_worked_example() {
        assert_eq!(patience_threshold(&demo(), 2.5).unwrap(), 0.5);
    }

    #[test]
    fn monitored_threshold_worked_examples() {
        let t = monitored_threshold(&demo(), 2.5, 0.5).unwrap();
        assert!((t.value - 2.0 / 3.0).abs() < 1e-4);
        assert!(!t.degenerate);

        let perfect = monitored_threshold(&demo(), 2.5, 1.0).unwrap();
        assert!((perfect.value - 0.5).abs() < 1e-12);

        let blind = monitored_threshold(&demo(), 2.5, 0.0).unwrap();
        assert_eq!(blind.value, 1.0);
        assert!(blind.degenerate);
    }

    #[test]
    fn monopoly_price_matches_grid_search() {
        // Independent check: scan (p-c)*(a-(b-d)p) on a fine grid.
        for params in [demo(), LinearMarketParams::new(4.0, 2.0, 1.0, 1.0).unwrap()] {
            let bd = params.b - params.d;
            let joint = |p: f64| (p - params.c) * (params.a - bd * p);
            let (mut best_p, mut best_v) = (params.c, f64::MIN);
            let hi = params.a / bd;
            let steps = 400_000;
            for i in 0..=steps {
                let p = params.c + (hi - params.c) * i as f64 / steps as f64;
                let v = joint(p);
                if v > best_v {
                    best_v = v;
                    best_p = p;
                }
            }
            assert!((monopoly_price_linear(&params) - best_p).abs() < 1e-4);
        }
    }

    #[test]
    fn mc_oracle_conform_matches_geometric_value() {
        let scenario = CollusionScenario::new(demo(), 2.5, 0.9, 0.9).unwrap();
        let v = grim_trigger_mc_oracle(&scenario, &MonitoringProfile::perfect(), false, None, 3, 7).unwrap();
        assert!((v - 1.125 / 0.1).abs() < 0.01);
    }

    #[test]
    fn mc_oracle_deviation_matches_closed_form() {
        let scenario = CollusionScenario::new(demo(), 2.5, 0.9, 0.9).unwrap();
        let q = payoff_quad(&demo(), 2.5).unwrap();
        for rho2 in [1.0, 0.5] {
            let rho = MonitoringProfile::new(1.0, rho2).unwrap();
            let v = grim_trigger_mc_oracle(&scenario, &rho, true, None, 10_000, 42).unwrap();
            let closed =
                q.pi_dev + 0.9 / 0.1 * (rho2 * q.pi_star + (1.0 - rho2) * q.pi_c);
            // Binomial noise at 10k trials; the rho=1 case is deterministic.
            let tol = if rho2 == 1.0 { 1e-3 } else { 0.05 };
            assert!((v - closed).abs() < tol, "rho={rho2}: {v} vs {closed}");
        }
    }

    #[test]
    fn mc_oracle_is_seed_reproducible() {
        let scenario = CollusionScenario::new(demo(), 2.3, 0.8, 0.8).unwrap();
        let rho = MonitoringProfile::new(1.0, 0.3).unwrap();
        let a = grim_trigger_mc_oracle(&scenario, &rho, true, None, 500, 99).unwrap();
        let b = grim_trigger_mc_oracle(&scenario, &rho, true, None, 500, 99).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    fn arb_valid_params() -> impl Strategy<Value = LinearMarketParams> {
        // Draw b > d > 0 and c, then a large enough for both invariants.
        (0.2f64..4.0, 0.05f64..0.95, 0.1f64..3.0, 0.05f64..3.0).prop_map(|(b, frac, c, slack)| {
            let d = b * frac;
            let a = (c * b).max(c * (b - d)) + slack;
            LinearMarketParams::new(a, b, d, c).unwrap()
        })
    }

    proptest! {
        #[test]
        fn payoff_ordering_holds_everywhere(params in arb_valid_params(), frac in 0.01f64..1.0) {
            let lo = nash_price_linear(&params);
            let hi = monopoly_price_linear(&params);
            let p_c = lo + frac * (hi - lo);
            let q = payoff_quad(&params, p_c).unwrap();
            // Strict in theory; 1e-12 slack only matters at the p_c -> p* boundary.
            prop_assert!(q.pi_dev > q.pi_c - 1e-12);
            prop_assert!(q.pi_c > q.pi_star - 1e-12);
            prop_assert!(q.pi_star > q.pi_sucker - 1e-12);
        }

        #[test]
        fn threshold_increases_with_target_price(params in arb_valid_params()) {
            let lo = nash_price_linear(&params);
            let hi = monopoly_price_linear(&params);
            let mut prev = 0.0;
            for k in 1..=100 {
                let p_c = if k == 100 { hi } else { lo + (hi - lo) * k as f64 / 100.0 };
                let t = patience_threshold(&params, p_c).unwrap();
                prop_assert!(t > 0.0 && t < 1.0);
                prop_assert!(t > prev);
                prev = t;
            }
        }

        #[test]
        fn monitored_threshold_decreases_with_precision(params in arb_valid_params(), frac in 0.05f64..1.0) {
            let lo = nash_price_linear(&params);
            let hi = monopoly_price_linear(&params);
            let p_c = lo + frac * (hi - lo);
            let mut prev = f64::INFINITY;
            for k in 1..=20 {
                let rho = k as f64 / 20.0;
                let t = monitored_threshold(&params, p_c, rho).unwrap();
                prop_assert!(t.value > 0.0 && t.value <= 1.0);
                prop_assert!(t.value < prev);
                prev = t.value;
            }
            let at_one = monitored_threshold(&params, p_c, 1.0).unwrap().value;
            let plain = patience_threshold(&params, p_c).unwrap();
            prop_assert!((at_one - plain).abs() < 1e-12);
        }

        #[test]
        fn deviation_gain_identity(params in arb_valid_params(), frac in 0.01f64..1.0) {
            // pi_dev - pi_star = (p* - c) * d * (p_c - p*)
            let lo = nash_price_linear(&params);
            let hi = monopoly_price_linear(&params);
            let p_c = lo + frac * (hi - lo);
            let q = payoff_quad(&params, p_c).unwrap();
            let rhs = (lo - params.c) * params.d * (p_c - lo);
            prop_assert!((q.pi_dev - q.pi_star - rhs).abs() < 1e-10);
        }

        #[test]
        fn nash_price_exceeds_cost(params in arb_valid_params()) {
            prop_assert!(nash_price_linear(&params) > params.c);
            prop_assert!(monopoly_price_linear(&params) > nash_price_linear(&params));
        }
    }
}
