//! Summary statistics: Welch's unequal-variance t-test (one-sided) and the
//! condition-level reduction of run summaries into report rows.

use super::{EngineError, RunSummary};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub dof: f64,
    /// One-sided p-value for mean(a) > mean(b).
    pub p_one_sided: f64,
}

fn mean_var(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's t-test of mean(a) > mean(b). Each sample needs at least two
/// observations and at least one sample must have nonzero variance.
pub fn welch_t_one_sided(sample_a: &[f64], sample_b: &[f64]) -> Result<WelchTest, EngineError> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(EngineError::Stats(format!(
            "need >= 2 observations per sample, got {} and {}",
            sample_a.len(),
            sample_b.len()
        )));
    }
    let (mean_a, var_a) = mean_var(sample_a);
    let (mean_b, var_b) = mean_var(sample_b);
    if var_a == 0.0 && var_b == 0.0 {
        return Err(EngineError::Stats("both samples have zero variance".into()));
    }
    let na = sample_a.len() as f64;
    let nb = sample_b.len() as f64;
    let se2 = var_a / na + var_b / nb;
    let t = (mean_a - mean_b) / se2.sqrt();
    let dof = se2 * se2 / ((var_a / na).powi(2) / (na - 1.0) + (var_b / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| EngineError::Stats(format!("t distribution: {e}")))?;
    let p_one_sided = 1.0 - dist.cdf(t);
    Ok(WelchTest { t, dof, p_one_sided })
}

/// Aggregate view of one experimental condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub runs: usize,
    pub converged_runs: usize,
    /// Mean/SD of rounds to convergence over converged runs.
    pub rounds_mean: Option<f64>,
    pub rounds_sd: Option<f64>,
    /// Mean/SD of per-run average price over all runs.
    pub price_mean: f64,
    pub price_sd: Option<f64>,
    /// Elevation of the mean price over the competitive benchmark.
    pub elevation: f64,
    pub terminal_lowest_mean: f64,
}

fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let (_, var) = mean_var(values);
    Some(var.sqrt())
}

/// Reduce run summaries to the condition row. Requires at least one summary.
pub fn summarize_condition(summaries: &[RunSummary], p_competitive: f64) -> Result<ConditionReport, EngineError> {
    if summaries.is_empty() {
        return Err(EngineError::Stats("no run summaries".into()));
    }
    let rounds: Vec<f64> = summaries
        .iter()
        .filter_map(|s| s.rounds_to_convergence.map(|r| r as f64))
        .collect();
    let prices: Vec<f64> = summaries.iter().map(|s| s.avg_price).collect();
    let terminals: Vec<f64> = summaries.iter().map(|s| s.terminal_lowest_price).collect();
    let price_mean = prices.iter().sum::<f64>() / prices.len() as f64;
    Ok(ConditionReport {
        runs: summaries.len(),
        converged_runs: rounds.len(),
        rounds_mean: if rounds.is_empty() {
            None
        } else {
            Some(rounds.iter().sum::<f64>() / rounds.len() as f64)
        },
        rounds_sd: sample_sd(&rounds),
        price_mean,
        price_sd: sample_sd(&prices),
        elevation: super::price_elevation(price_mean, p_competitive),
        terminal_lowest_mean: terminals.iter().sum::<f64>() / terminals.len() as f64,
    })
}

impl ConditionReport {
    /// "195.1 (28.8)"-style rounds column; "Did not converge" when no run
    /// converged.
    pub fn rounds_cell(&self) -> String {
        match (self.rounds_mean, self.rounds_sd) {
            (Some(mean), Some(sd)) => format!("{mean:.1} ({sd:.1})"),
            (Some(mean), None) => format!("{mean:.1}"),
            (None, _) => "Did not converge".to_string(),
        }
    }

    /// "1.801 (0.027)"-style price column.
    pub fn price_cell(&self) -> String {
        match self.price_sd {
            Some(sd) => format!("{:.3} ({:.3})", self.price_mean, sd),
            None => format!("{:.3}", self.price_mean),
        }
    }

    /// "+22.2%"-style elevation column.
    pub fn elevation_cell(&self) -> String {
        format!("{:+.1}%", self.elevation * 100.0)
    }
}
