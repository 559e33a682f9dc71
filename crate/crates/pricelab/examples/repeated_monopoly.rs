//! Repeated single-seller pricing with hidden demand: a scripted learner
//! explores, overshoots, and settles within 1% of the theoretical monopoly
//! price — the discover-the-optimum-from-feedback sanity check, fully
//! offline.
//!
//! With one seller the pairwise-gap convergence rule is vacuous, so this
//! example runs the full horizon and reads stability off the tail of the
//! run log itself.
//!
//! ```bash
//! cargo run --example repeated_monopoly
//! ```

use pricelab::config::{build_agents, Benchmarks, ConfigFile};
use pricelab::engine::{load_jsonl, run, ConvergenceRule, RunConfig, RunWriter};
use pricelab::equilibrium::benchmarks;
use pricelab::market::LogitMarketParams;

fn main() {
    let market = LogitMarketParams::baseline(1);
    let (solo, _) = benchmarks(&market);
    println!("theoretical single-seller optimum: {:.4}", solo.price);

    // Cautious start, an exploratory spike, then settle at 1.82.
    let mut prices = vec![1.33, 1.4, 1.45, 1.5, 2.5, 5.0, 2.0, 1.9, 1.85, 1.7, 1.75];
    while prices.len() < 223 {
        prices.push(if prices.len() % 3 == 0 { 1.78 } else { 1.88 });
    }
    prices.push(1.82);

    let toml = format!(
        r#"
name = "repeated-monopoly"
seed = 11
max_periods = 300
[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 1
[benchmarks]
p_competitive = {:.10}
p_monopoly = {:.10}
[[agents]]
kind = "llm"
label = "Monopolist"
delta = 0.95
[agents.backend]
kind = "mock_prices"
prices = {prices:?}
hold_last = true
"#,
        solo.price, solo.price
    );
    let cfg = ConfigFile::from_str_validated(&toml).expect("config parses");
    let bench = Benchmarks { p_competitive: solo.price, p_monopoly: solo.price };
    let mut agents = build_agents(&cfg, &bench, 0).expect("roster builds");

    let out = std::env::temp_dir().join("pricelab_repeated_monopoly");
    let _ = std::fs::remove_dir_all(&out);
    let mut writer = RunWriter::create(&out).expect("writer");
    let run_cfg = RunConfig {
        market,
        // One seller: the gap rule is vacuous, so run the whole horizon.
        convergence: ConvergenceRule { window: 300, band: 0.05 },
        max_periods: 300,
    };
    run(&run_cfg, &mut agents, Some(&mut writer)).expect("run completes");

    let records = load_jsonl(&out.join("periods.jsonl")).expect("log loads");
    let tail: Vec<f64> = records.iter().rev().take(50).map(|r| r.prices[0]).collect();
    let settled = tail.iter().sum::<f64>() / tail.len() as f64;
    let err = (settled - solo.price).abs() / solo.price;
    println!(
        "price over the final 50 rounds: {settled:.4}; relative gap to the optimum {:.2}% (within 1%: {})",
        err * 100.0,
        err < 0.01
    );
    println!("log under {}", out.display());
}
