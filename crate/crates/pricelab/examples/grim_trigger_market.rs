//! Grim-trigger reference agents in the logit market: on-path play at the
//! monopoly price, punishment after a scripted undercut, and stochastic
//! detection delay under partial monitoring.
//!
//! ```bash
//! cargo run --example grim_trigger_market
//! ```

use pricelab::config::ConfigFile;
use pricelab::engine::{run, AgentSlot, ConvergenceRule, RunConfig};
use pricelab::equilibrium::benchmarks;
use pricelab::market::LogitMarketParams;
use pricelab::rule::{GrimTriggerAgent, GrimTriggerConfig, ScriptedAgent};

fn main() {
    let market = LogitMarketParams::baseline(2);
    let (nash, mono) = benchmarks(&market);
    let grim = GrimTriggerConfig::new(mono.price, nash.price, 1.0).unwrap();

    // Two grim triggers: the collusive path never breaks.
    let cfg = RunConfig { market, convergence: ConvergenceRule::default(), max_periods: 150 };
    let mut agents = vec![
        AgentSlot::full(Box::new(GrimTriggerAgent::new("g1", grim, 1))),
        AgentSlot::full(Box::new(GrimTriggerAgent::new("g2", grim, 1))),
    ];
    let outcome = run(&cfg, &mut agents, None).unwrap();
    println!(
        "paired grim triggers: converged={} at round {:?}, price {:.4}",
        outcome.converged,
        outcome.convergence_round,
        outcome.records.last().unwrap().prices[0]
    );

    // A one-time undercutter triggers permanent punishment.
    let mut script = vec![mono.price; 5];
    script.push(nash.price); // deviate in round 6
    script.extend(vec![mono.price; 20]); // try to come back; too late
    let mut agents = vec![
        AgentSlot::full(Box::new(GrimTriggerAgent::new("grim", grim, 2))),
        AgentSlot::full(Box::new(ScriptedAgent::new("undercutter", script, true).unwrap())),
    ];
    let cfg = RunConfig { market, convergence: ConvergenceRule::default(), max_periods: 12 };
    let outcome = run(&cfg, &mut agents, None).unwrap();
    println!("\nundercut in round 6 -> grim price path:");
    for rec in &outcome.records {
        println!("  round {:>2}: grim {:.4}  rival {:.4}", rec.t, rec.prices[0], rec.prices[1]);
    }

    // Under partial monitoring the trigger fires with a geometric delay.
    println!("\ndetection delay at rho = 0.5 (rival deviates every round):");
    for seed in 0..5 {
        let partial = GrimTriggerConfig::new(mono.price, nash.price, 0.5).unwrap();
        let mut agents = vec![
            AgentSlot::full(Box::new(GrimTriggerAgent::new("grim", partial, seed))),
            AgentSlot::full(Box::new(ScriptedAgent::constant("deviator", nash.price).unwrap())),
        ];
        let cfg = RunConfig { market, convergence: ConvergenceRule::default(), max_periods: 40 };
        let outcome = run(&cfg, &mut agents, None).unwrap();
        let trigger_round = outcome
            .records
            .iter()
            .find(|r| (r.prices[0] - nash.price).abs() < 1e-9)
            .map(|r| r.t);
        println!("  seed {seed}: punishment starts in round {trigger_round:?}");
    }

    // The same scenario is expressible declaratively.
    let toml = format!(
        r#"
name = "grim-demo"
seed = 1
max_periods = 150
[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2
[[agents]]
kind = "grim_trigger"
p_collusive = {:.6}
p_competitive = {:.6}
[[agents]]
kind = "grim_trigger"
p_collusive = {:.6}
p_competitive = {:.6}
"#,
        mono.price, nash.price, mono.price, nash.price
    );
    let parsed = ConfigFile::from_str_validated(&toml).expect("declarative grim pairing parses");
    println!("\ndeclarative version parses: condition '{}'", parsed.name);
}
