//! Collusion-sustainability thresholds in the linear-demand duopoly:
//! equilibrium prices, the payoff quadruple, patience thresholds under
//! perfect and imperfect monitoring, and a Monte-Carlo cross-check.
//!
//! ```bash
//! cargo run --example thresholds
//! ```

use pricelab::theory::{
    grim_trigger_mc_oracle, monitored_threshold, monopoly_price_linear, nash_price_linear,
    patience_threshold, payoff_quad, CollusionScenario, LinearMarketParams, MonitoringProfile,
};

fn main() {
    let params = LinearMarketParams::new(2.0, 1.0, 0.5, 1.0).expect("valid params");
    let p_star = nash_price_linear(&params);
    let p_mono = monopoly_price_linear(&params);
    println!("linear market a=2 b=1 d=0.5 c=1");
    println!("competitive price p* = {p_star:.4}");
    println!("monopoly price   pM = {p_mono:.4}");

    let quad = payoff_quad(&params, p_mono).expect("monopoly target is sustainable range");
    println!(
        "payoffs at p_c = pM: deviation {:.4}, collusive {:.4}, competitive {:.4}, undercut {:.4}",
        quad.pi_dev, quad.pi_c, quad.pi_star, quad.pi_sucker
    );

    println!("\npatience threshold rises with the target price:");
    for k in 1..=8 {
        let p_c = p_star + (p_mono - p_star) * k as f64 / 8.0;
        let threshold = patience_threshold(&params, p_c).unwrap();
        println!("  p_c = {p_c:.4}  ->  min delta = {threshold:.4}");
    }

    println!("\nworse monitoring demands more patience (p_c = pM):");
    for rho in [1.0, 0.75, 0.5, 0.25, 0.1] {
        let t = monitored_threshold(&params, p_mono, rho).unwrap();
        println!("  rho = {rho:<4}  ->  min delta = {:.4}", t.value);
    }
    let blind = monitored_threshold(&params, p_mono, 0.0).unwrap();
    println!("  rho = 0     ->  min delta = {} (degenerate: punishment never triggers)", blind.value);

    // Monte-Carlo cross-check of the incentive comparison either side of the
    // threshold.
    let p_c = 2.3;
    let rho = MonitoringProfile::new(1.0, 0.5).unwrap();
    let threshold = monitored_threshold(&params, p_c, rho.rho_2).unwrap().value;
    println!("\nMonte-Carlo grim-trigger check at p_c = {p_c}, rho = {}:", rho.rho_2);
    println!("  closed-form threshold: {threshold:.4}");
    for delta in [threshold - 0.1, threshold + 0.1] {
        let scenario = CollusionScenario::new(params, p_c, delta, delta).unwrap();
        let conform = grim_trigger_mc_oracle(&scenario, &rho, false, None, 20_000, 7).unwrap();
        let deviate = grim_trigger_mc_oracle(&scenario, &rho, true, None, 20_000, 7).unwrap();
        println!(
            "  delta = {delta:.4}: conform {conform:>9.4} vs deviate {deviate:>9.4}  -> {}",
            if conform >= deviate { "collusion holds" } else { "deviation pays" }
        );
    }
}
