//! Render every prompt template once: the repeated oligopoly game (full,
//! own-only, myopic, anti-collusion), the two one-shot validation games,
//! and the repeated monopoly game.
//!
//! ```bash
//! cargo run --example prompt_gallery
//! ```

use pricelab::agent::{InfoAccess, VisiblePeriod};
use pricelab::llm::{
    build_one_shot_bertrand_prompt, build_one_shot_monopoly_prompt, build_repeated_monopoly_prompt,
    build_repeated_prompt, LlmAgentConfig, PromptContext, DEFAULT_ANTI_COLLUSION,
};
use pricelab::market::LogitMarketParams;

fn banner(title: &str) {
    println!("\n{}\n{}\n", "=".repeat(72), title);
}

fn main() {
    let history = vec![
        VisiblePeriod {
            round: 1,
            own_price: 2.0,
            own_quantity: 0.3891,
            own_profit: 0.3891,
            rival_prices: Some(vec![1.95]),
        },
        VisiblePeriod {
            round: 2,
            own_price: 1.85,
            own_quantity: 0.4351,
            own_profit: 0.3692,
            rival_prices: Some(vec![1.82]),
        },
    ];

    banner("repeated oligopoly, round 3, full information, patient");
    let cfg = LlmAgentConfig::new("Seller 1", 0.95, InfoAccess::Full);
    let ctx = PromptContext {
        round: 3,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: Some("Hold near 1.85 and match downward moves.".into()),
        history: history.clone(),
        rival_labels: vec!["Seller 2".into()],
    };
    println!("{}", build_repeated_prompt(&cfg, &ctx).unwrap());

    banner("repeated oligopoly, own-data-only seller");
    let own_only = LlmAgentConfig::new("Seller 2", 0.95, InfoAccess::OwnOnly);
    let stripped: Vec<VisiblePeriod> =
        history.iter().cloned().map(|mut p| { p.rival_prices = None; p }).collect();
    let ctx2 = PromptContext { history: stripped, rival_labels: vec![], ..ctx.clone() };
    println!("{}", build_repeated_prompt(&own_only, &ctx2).unwrap());

    banner("repeated oligopoly, myopic objective (delta = 0)");
    let myopic = LlmAgentConfig::new("Seller 2", 0.0, InfoAccess::Full);
    let ctx3 = PromptContext { delta: 0.0, ..ctx.clone() };
    println!("{}", build_repeated_prompt(&myopic, &ctx3).unwrap());

    banner("repeated oligopoly with the anti-collusion instruction");
    let mut anti = LlmAgentConfig::new("Seller 1", 0.95, InfoAccess::Full);
    anti.anti_collusion = Some(DEFAULT_ANTI_COLLUSION.to_string());
    println!("{}", build_repeated_prompt(&anti, &ctx).unwrap());

    banner("one-shot duopoly (demand formula supplied)");
    println!("{}", build_one_shot_bertrand_prompt(&LogitMarketParams::steep(2), "Seller 1").unwrap());

    banner("one-shot two-product monopoly");
    println!("{}", build_one_shot_monopoly_prompt(&LogitMarketParams::steep(2)).unwrap());

    banner("repeated monopoly, round 2");
    let mono_cfg = LlmAgentConfig::new("Monopolist", 0.95, InfoAccess::Full);
    let mono_ctx = PromptContext {
        round: 2,
        n_sellers: 1,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: Some("Probe upward from 1.5.".into()),
        history: vec![VisiblePeriod {
            round: 1,
            own_price: 1.5,
            own_quantity: 0.6408,
            own_profit: 0.3204,
            rival_prices: None,
        }],
        rival_labels: vec![],
    };
    println!("{}", build_repeated_monopoly_prompt(&mono_cfg, &mono_ctx).unwrap());
}
