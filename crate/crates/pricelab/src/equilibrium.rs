//! Numeric competitive (one-shot Nash) and joint-monopoly benchmark prices
//! for the logit market. These two numbers anchor every reported metric:
//! price elevation is measured against the competitive price, and the
//! monopoly price caps the collusive range.
//!
//! Own profit given fixed rivals is single-peaked over the default bracket,
//! so the best response is found by a coarse grid scan refined with
//! golden-section search; the symmetric Nash price is the fixed point of
//! iterated best response.

use crate::market::{logit_demand, LogitMarketParams, PriceVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
}

/// Bracket and stopping rule for the one-dimensional searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub fn new(bracket_lo: f64, bracket_hi: f64, tol: f64, max_iter: usize) -> Result<Self, SolverError> {
        if !(bracket_lo < bracket_hi) {
            return Err(SolverError::InvalidConfig(format!(
                "bracket_lo {bracket_lo} must be below bracket_hi {bracket_hi}"
            )));
        }
        if !(tol > 0.0) {
            return Err(SolverError::InvalidConfig("tol must be positive".into()));
        }
        if max_iter < 1 {
            return Err(SolverError::InvalidConfig("max_iter must be >= 1".into()));
        }
        Ok(Self { bracket_lo, bracket_hi, tol, max_iter })
    }

    /// Default bracket [c, a + 5*mu]: profit is negative below cost and
    /// shares vanish far above a.
    pub fn for_market(params: &LogitMarketParams) -> Self {
        Self {
            bracket_lo: params.c,
            bracket_hi: params.a + 5.0 * params.mu,
            tol: 1e-6,
            max_iter: 10_000,
        }
    }
}

/// Outcome of a benchmark solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub price: f64,
    pub iterations: usize,
    /// Final best-response displacement (fixed-point solves) or bracket
    /// width (direct maximizations).
    pub residual: f64,
    pub converged: bool,
    /// Set when the coarse scan saw several interior local maxima more than
    /// `tol` apart and the solver fell back to the finest-grid argmax.
    pub non_unimodal: bool,
}

const GRID_SCAN_POINTS: usize = 200;
const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on [lo, hi] down to width `tol`.
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64 {
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while hi - lo > tol && iter < max_iter {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = f(x1);
        }
        iter += 1;
    }
    0.5 * (lo + hi)
}

/// Grid scan that counts interior local maxima and returns the best cell.
fn scan<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (usize, f64, Vec<f64>) {
    let vals: Vec<(f64, f64)> = (0..=GRID_SCAN_POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / GRID_SCAN_POINTS as f64;
            (x, f(x))
        })
        .collect();
    let mut best = vals[0];
    for v in &vals {
        if v.1 > best.1 {
            best = *v;
        }
    }
    let mut interior_maxima = Vec::new();
    for w in vals.windows(3) {
        if w[1].1 >= w[0].1 && w[1].1 >= w[2].1 {
            interior_maxima.push(w[1].0);
        }
    }
    (GRID_SCAN_POINTS, best.0, interior_maxima)
}

fn own_profit(params: &LogitMarketParams, own: f64, rivals: &[f64]) -> f64 {
    let mut prices = Vec::with_capacity(rivals.len() + 1);
    prices.push(own);
    prices.extend_from_slice(rivals);
    let pv = PriceVector::new(prices).expect("bracket prices are finite and nonnegative");
    let one_seller_view = LogitMarketParams { n: rivals.len() + 1, ..*params };
    let q = logit_demand(&one_seller_view, &pv).expect("lengths match");
    q[0] * (own - params.c)
}

/// Profit-maximizing own price against fixed rival prices.
///
/// Returns the price and whether the coarse scan flagged multiple interior
/// maxima (in which case the finest-grid argmax seeds the refinement and the
/// flag is surfaced through [`EquilibriumResult::non_unimodal`] by callers).
pub fn best_response(params: &LogitMarketParams, rival_prices: &[f64], cfg: &SolverConfig) -> (f64, bool) {
    let f = |p: f64| own_profit(params, p, rival_prices);
    let (points, best_x, maxima) = scan(&f, cfg.bracket_lo, cfg.bracket_hi);
    let cell = (cfg.bracket_hi - cfg.bracket_lo) / points as f64;
    let non_unimodal = maxima.len() > 1
        && maxima.windows(2).any(|w| (w[1] - w[0]).abs() > cfg.tol.max(2.0 * cell));
    let lo = (best_x - cell).max(cfg.bracket_lo);
    let hi = (best_x + cell).min(cfg.bracket_hi);
    (golden_max(&f, lo, hi, cfg.tol, cfg.max_iter), non_unimodal)
}

/// Symmetric one-shot Nash price by iterated best response.
///
/// Undamped iteration first; if the displacement sequence oscillates without
/// shrinking, retries with 0.5 damping (small `mu` can make the undamped map
/// overshoot).
pub fn nash_logit(params: &LogitMarketParams, cfg: &SolverConfig) -> EquilibriumResult {
    if params.n == 1 {
        return monopoly_logit(params, cfg);
    }
    for damping in [1.0, 0.5] {
        let mut p = 0.5 * (cfg.bracket_lo + cfg.bracket_hi);
        let mut prev_disp = f64::INFINITY;
        let mut oscillating = false;
        let mut non_unimodal = false;
        for iter in 1..=cfg.max_iter {
            let rivals = vec![p; params.n - 1];
            let (br, flag) = best_response(params, &rivals, cfg);
            non_unimodal |= flag;
            let next = damping * br + (1.0 - damping) * p;
            let disp = (next - p).abs();
            p = next;
            if disp <= cfg.tol {
                return EquilibriumResult {
                    price: p,
                    iterations: iter,
                    residual: disp,
                    converged: true,
                    non_unimodal,
                };
            }
            if disp > prev_disp * 1.0001 {
                oscillating = true;
                break;
            }
            prev_disp = disp;
        }
        if !oscillating && damping == 1.0 {
            // Ran out of iterations without oscillation; damping won't help.
            break;
        }
    }
    // Report the last undamped state as non-converged.
    let mut p = 0.5 * (cfg.bracket_lo + cfg.bracket_hi);
    let mut disp = f64::INFINITY;
    let mut non_unimodal = false;
    for _ in 0..cfg.max_iter {
        let rivals = vec![p; params.n - 1];
        let (br, flag) = best_response(params, &rivals, cfg);
        non_unimodal |= flag;
        disp = (br - p).abs();
        p = br;
    }
    EquilibriumResult { price: p, iterations: cfg.max_iter, residual: disp, converged: false, non_unimodal }
}

/// Joint-profit-maximizing common price for symmetric sellers.
pub fn monopoly_logit(params: &LogitMarketParams, cfg: &SolverConfig) -> EquilibriumResult {
    let f = |p: f64| {
        let pv = PriceVector::new(vec![p; params.n]).expect("bracket prices valid");
        let q = logit_demand(params, &pv).expect("lengths match");
        q.iter().map(|qi| qi * (p - params.c)).sum::<f64>()
    };
    let (points, best_x, maxima) = scan(&f, cfg.bracket_lo, cfg.bracket_hi);
    let cell = (cfg.bracket_hi - cfg.bracket_lo) / points as f64;
    let non_unimodal = maxima.len() > 1
        && maxima.windows(2).any(|w| (w[1] - w[0]).abs() > cfg.tol.max(2.0 * cell));
    let lo = (best_x - cell).max(cfg.bracket_lo);
    let hi = (best_x + cell).min(cfg.bracket_hi);
    let price = golden_max(&f, lo, hi, cfg.tol, cfg.max_iter);
    EquilibriumResult { price, iterations: 0, residual: cfg.tol, converged: true, non_unimodal }
}

/// Convenience pair (competitive, monopoly) with default config.
pub fn benchmarks(params: &LogitMarketParams) -> (EquilibriumResult, EquilibriumResult) {
    let cfg = SolverConfig::for_market(params);
    (nash_logit(params, &cfg), monopoly_logit(params, &cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(params: &LogitMarketParams) -> SolverConfig {
        SolverConfig::for_market(params)
    }

    /// Brute-force symmetric fixed point at 1e-3 grid resolution, refined
    /// once; deliberately independent of the production search path.
    fn grid_nash(params: &LogitMarketParams) -> f64 {
        let c = cfg(params);
        let brute_br = |rival: f64| -> f64 {
            let mut best = (c.bracket_lo, f64::MIN);
            let steps = ((c.bracket_hi - c.bracket_lo) / 1e-3) as usize;
            for i in 0..=steps {
                let p = c.bracket_lo + i as f64 * 1e-3;
                let v = super::own_profit(params, p, &vec![rival; params.n - 1]);
                if v > best.1 {
                    best = (p, v);
                }
            }
            best.0
        };
        let mut p = 1.5;
        for _ in 0..200 {
            let next = brute_br(p);
            if (next - p).abs() < 5e-4 {
                return next;
            }
            p = 0.5 * p + 0.5 * next;
        }
        p
    }

    fn grid_monopoly(params: &LogitMarketParams) -> f64 {
        let c = cfg(params);
        let mut best = (c.bracket_lo, f64::MIN);
        let steps = ((c.bracket_hi - c.bracket_lo) / 1e-3) as usize;
        for i in 0..=steps {
            let p = c.bracket_lo + i as f64 * 1e-3;
            let pv = PriceVector::new(vec![p; params.n]).unwrap();
            let q = logit_demand(params, &pv).unwrap();
            let v: f64 = q.iter().map(|qi| qi * (p - params.c)).sum();
            if v > best.1 {
                best = (p, v);
            }
        }
        best.0
    }

    #[test]
    fn baseline_duopoly_benchmarks() {
        let params = LogitMarketParams::baseline(2);
        let (nash, mono) = benchmarks(&params);
        assert!(nash.converged && mono.converged);
        assert!((nash.price - 1.47).abs() < 0.01, "nash {}", nash.price);
        assert!((mono.price - 1.92).abs() < 0.01, "monopoly {}", mono.price);
        // Frozen high-precision values from an independent numeric solve.
        assert!((nash.price - 1.4729266441).abs() < 1e-4);
        assert!((mono.price - 1.9249809191).abs() < 1e-4);
    }

    #[test]
    fn single_seller_nash_is_monopoly() {
        let params = LogitMarketParams::baseline(1);
        let c = cfg(&params);
        let nash = nash_logit(&params, &c);
        let mono = monopoly_logit(&params, &c);
        assert_eq!(nash.price, mono.price);
        assert!((nash.price - 1.8019850111).abs() < 1e-4);
    }

    #[test]
    fn wider_markets_match_grid_oracle() {
        for n in [3, 4, 5] {
            let params = LogitMarketParams::baseline(n);
            let c = cfg(&params);
            let nash = nash_logit(&params, &c);
            assert!(nash.converged);
            assert!((nash.price - grid_nash(&params)).abs() < 2e-3, "n={n}: {}", nash.price);
        }
        // Frozen oracle values for the competitive benchmark at n=3..5.
        for (n, expect) in [(3, 1.3701627266), (4, 1.3314606897), (5, 1.3115206238)] {
            let params = LogitMarketParams::baseline(n);
            let nash = nash_logit(&params, &cfg(&params));
            assert!((nash.price - expect).abs() < 1e-4, "n={n}: {}", nash.price);
        }
    }

    #[test]
    fn steep_demand_benchmarks_match_grid_oracle() {
        let params = LogitMarketParams::steep(2);
        let c = cfg(&params);
        let nash = nash_logit(&params, &c);
        let mono = monopoly_logit(&params, &c);
        assert!(nash.converged, "steep-demand fixed point should converge (with damping)");
        assert!((nash.price - grid_nash(&params)).abs() < 2e-3);
        assert!((mono.price - grid_monopoly(&params)).abs() < 2e-3);
        assert!((nash.price - 3.1226750876).abs() < 1e-3);
        assert!((mono.price - 3.1463055550).abs() < 1e-3);
    }

    #[test]
    fn best_response_is_fixed_at_nash() {
        let params = LogitMarketParams::baseline(2);
        let c = cfg(&params);
        let nash = nash_logit(&params, &c);
        let (br, _) = best_response(&params, &[nash.price], &c);
        assert!((br - nash.price).abs() <= 10.0 * c.tol);
        // Worked example: rival at 1.47 best-responds to roughly 1.47.
        let (br147, _) = best_response(&params, &[1.47], &c);
        assert!((br147 - 1.47).abs() < 0.01);
    }

    #[test]
    fn lonely_seller_limit() {
        // A rival priced out of the market leaves a one-seller problem.
        let params = LogitMarketParams::baseline(2);
        let c = cfg(&params);
        let (br, _) = best_response(&params, &[1e6], &c);
        let solo = monopoly_logit(&LogitMarketParams::baseline(1), &cfg(&LogitMarketParams::baseline(1)));
        assert!((br - solo.price).abs() < 1e-3);
    }

    #[test]
    fn ordering_monopoly_above_nash_above_cost() {
        for params in [
            LogitMarketParams::baseline(2),
            LogitMarketParams::baseline(4),
            LogitMarketParams::steep(2),
            LogitMarketParams::new(3.0, 0.5, 0.5, 0.8, 3).unwrap(),
        ] {
            let (nash, mono) = benchmarks(&params);
            assert!(mono.price >= nash.price - 1e-6);
            assert!(nash.price > params.c);
        }
    }

    #[test]
    fn flat_demand_softens_competition() {
        // Large mu: the gap between monopoly and Nash shrinks relative to baseline.
        let tight = LogitMarketParams::baseline(2);
        let flat = LogitMarketParams::new(2.0, 2.0, 0.0, 1.0, 2).unwrap();
        let (n0, m0) = benchmarks(&tight);
        let (n1, m1) = benchmarks(&flat);
        let rel0 = (m0.price - n0.price) / n0.price;
        let rel1 = (m1.price - n1.price) / n1.price;
        assert!(rel1 < rel0);
    }

    #[test]
    fn results_are_bit_deterministic() {
        let params = LogitMarketParams::baseline(3);
        let c = cfg(&params);
        let a = nash_logit(&params, &c);
        let b = nash_logit(&params, &c);
        assert_eq!(a.price.to_bits(), b.price.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(SolverConfig::new(2.0, 1.0, 1e-6, 100).is_err());
        assert!(SolverConfig::new(1.0, 2.0, 0.0, 100).is_err());
        assert!(SolverConfig::new(1.0, 2.0, 1e-6, 0).is_err());
    }
}
