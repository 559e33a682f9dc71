//! Multinomial-logit market: demand shares, per-period profits, and
//! discounted valuation of profit streams.
//!
//! Every experiment in this crate runs in this environment. Shares follow
//! the exponential form with an outside option,
//! `q_i = exp((a - p_i)/mu) / (sum_j exp((a - p_j)/mu) + exp(a0/mu))`,
//! and profits are `q_i * (p_i - c)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MarketError {
    #[error("invalid market parameters: {0}")]
    InvalidParams(String),
    #[error("invalid price vector: {0}")]
    InvalidPrices(String),
    #[error("price vector has {got} entries, market has {want} sellers")]
    WrongSellerCount { got: usize, want: usize },
}

/// Demand-side primitives of the logit market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogitMarketParams {
    /// Vertical differentiation (price units).
    pub a: f64,
    /// Price-sensitivity scale; smaller means steeper demand.
    pub mu: f64,
    /// Outside-option value.
    pub a0: f64,
    /// Constant marginal cost.
    pub c: f64,
    /// Number of sellers.
    pub n: usize,
}

impl LogitMarketParams {
    pub fn new(a: f64, mu: f64, a0: f64, c: f64, n: usize) -> Result<Self, MarketError> {
        if !(mu > 0.0) {
            return Err(MarketError::InvalidParams(format!("mu must be > 0, got {mu}")));
        }
        if !(c >= 0.0) {
            return Err(MarketError::InvalidParams(format!("c must be >= 0, got {c}")));
        }
        if n < 1 {
            return Err(MarketError::InvalidParams("n must be >= 1".into()));
        }
        if !a.is_finite() || !a0.is_finite() {
            return Err(MarketError::InvalidParams("a and a0 must be finite".into()));
        }
        Ok(Self { a, mu, a0, c, n })
    }

    /// Standard benchmark parameterization: a=2, mu=0.25, a0=0, c=1.
    pub fn baseline(n: usize) -> Self {
        Self { a: 2.0, mu: 0.25, a0: 0.0, c: 1.0, n }
    }

    /// Steep-demand parameterization used by the one-shot validation games:
    /// a=4, mu=0.1, a0=1, c=3. Chosen so correct answers cannot be memorized
    /// defaults.
    pub fn steep(n: usize) -> Self {
        Self { a: 4.0, mu: 0.1, a0: 1.0, c: 3.0, n }
    }
}

/// One price per seller; entries are validated finite and nonnegative.
///
/// Negative prices are rejected here even though the share formula tolerates
/// them: agents occasionally emit garbage and it must be caught before it
/// reaches the market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self, MarketError> {
        for (i, p) in prices.iter().enumerate() {
            if !p.is_finite() {
                return Err(MarketError::InvalidPrices(format!("price {i} is not finite")));
            }
            if *p < 0.0 {
                return Err(MarketError::InvalidPrices(format!("price {i} is negative: {p}")));
            }
        }
        Ok(Self(prices))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for PriceVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Realized demand shares and profits for one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketOutcome {
    /// Per-seller demand share, each in (0,1).
    pub quantities: Vec<f64>,
    /// Per-seller profit `q_i * (p_i - c)`; may be negative below cost.
    pub profits: Vec<f64>,
    /// Share captured by the outside option.
    pub outside_share: f64,
}

/// Logit demand shares for a full price vector.
///
/// Stabilized by subtracting the maximum utility before exponentiation, so
/// prices anywhere in [0, 1e6] stay finite even at small `mu`.
pub fn logit_demand(params: &LogitMarketParams, prices: &PriceVector) -> Result<Vec<f64>, MarketError> {
    if prices.len() != params.n {
        return Err(MarketError::WrongSellerCount { got: prices.len(), want: params.n });
    }
    let utilities: Vec<f64> = prices.as_slice().iter().map(|p| (params.a - p) / params.mu).collect();
    let outside = params.a0 / params.mu;
    let max_u = utilities.iter().copied().fold(outside, f64::max);
    let exp_outside = (outside - max_u).exp();
    let exps: Vec<f64> = utilities.iter().map(|u| (u - max_u).exp()).collect();
    let denom: f64 = exps.iter().sum::<f64>() + exp_outside;
    Ok(exps.iter().map(|e| e / denom).collect())
}

/// Shares plus profits at marginal cost `c`.
pub fn market_outcome(params: &LogitMarketParams, prices: &PriceVector) -> Result<MarketOutcome, MarketError> {
    let quantities = logit_demand(params, prices)?;
    let profits: Vec<f64> = quantities
        .iter()
        .zip(prices.as_slice())
        .map(|(q, p)| q * (p - params.c))
        .collect();
    let outside_share = 1.0 - quantities.iter().sum::<f64>();
    Ok(MarketOutcome { quantities, profits, outside_share })
}

/// Present value of a finite profit stream: `sum_t delta^t * pi_t`.
pub fn discounted_value(profit_stream: &[f64], delta: f64) -> f64 {
    let mut value = 0.0;
    let mut weight = 1.0;
    for pi in profit_stream {
        value += weight * pi;
        weight *= delta;
    }
    value
}
