//! Golden-file checks: rendered prompts must match the pinned template
//! instantiations byte for byte, window slicing must hit its boundaries
//! exactly, and own-only rendering must never leak rival data.

use pricelab::agent::{AgentView, InfoAccess, VisiblePeriod};
use pricelab::llm::{
    build_one_shot_bertrand_prompt, build_one_shot_monopoly_prompt, build_repeated_monopoly_prompt,
    build_repeated_prompt, LlmAgentConfig, PromptContext, DEFAULT_ANTI_COLLUSION,
};
use pricelab::market::LogitMarketParams;

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("golden file exists")
}

fn assert_matches_golden(rendered: &str, name: &str) {
    let expected = golden(name);
    if rendered != expected {
        for (i, (a, b)) in rendered.lines().zip(expected.lines()).enumerate() {
            if a != b {
                panic!("{name}: first divergence at line {}:\n rendered: {a:?}\n golden:   {b:?}", i + 1);
            }
        }
        panic!(
            "{name}: line count differs: rendered {} vs golden {}",
            rendered.lines().count(),
            expected.lines().count()
        );
    }
}

fn row(round: usize, own: f64, q: f64, pi: f64, opp: Option<f64>) -> VisiblePeriod {
    VisiblePeriod {
        round,
        own_price: own,
        own_quantity: q,
        own_profit: pi,
        rival_prices: opp.map(|p| vec![p]),
    }
}

fn cfg(label: &str, delta: f64, access: InfoAccess) -> LlmAgentConfig {
    LlmAgentConfig::new(label, delta, access)
}

#[test]
fn repeated_game_round_one_matches_golden() {
    let ctx = PromptContext {
        round: 1,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: None,
        history: vec![],
        rival_labels: vec!["Seller 2".into()],
    };
    let rendered = build_repeated_prompt(&cfg("Seller 1", 0.95, InfoAccess::Full), &ctx).unwrap();
    assert_matches_golden(&rendered, "c1_round1_full.txt");
}

#[test]
fn repeated_game_mid_run_matches_golden() {
    let ctx = PromptContext {
        round: 5,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: Some("Hold near 1.85 and match downward moves.".into()),
        history: vec![
            row(1, 5.0, 0.0295, 0.118, Some(1.8)),
            row(2, 2.5, 0.2956, 0.4434, Some(1.9)),
            row(3, 2.0, 0.3891, 0.3891, Some(1.95)),
            row(4, 1.85, 0.4351, 0.3692, Some(1.82)),
        ],
        rival_labels: vec!["Seller 2".into()],
    };
    let rendered = build_repeated_prompt(&cfg("Seller 1", 0.95, InfoAccess::Full), &ctx).unwrap();
    assert_matches_golden(&rendered, "c1_round5_full.txt");
}

#[test]
fn own_only_variant_matches_golden() {
    let ctx = PromptContext {
        round: 3,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: Some("Keep a stable price.".into()),
        history: vec![row(1, 1.6, 0.45, 0.27, None), row(2, 1.6, 0.4489, 0.2693, None)],
        rival_labels: vec![],
    };
    let rendered = build_repeated_prompt(&cfg("Seller 2", 0.95, InfoAccess::OwnOnly), &ctx).unwrap();
    assert_matches_golden(&rendered, "c1_round3_ownonly.txt");
}

#[test]
fn anti_collusion_line_matches_golden() {
    let mut config = cfg("Seller 1", 0.95, InfoAccess::Full);
    config.anti_collusion = Some(DEFAULT_ANTI_COLLUSION.to_string());
    let ctx = PromptContext {
        round: 1,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: None,
        history: vec![],
        rival_labels: vec!["Seller 2".into()],
    };
    let rendered = build_repeated_prompt(&config, &ctx).unwrap();
    assert_matches_golden(&rendered, "c1_round1_anticollusion.txt");
}

#[test]
fn myopic_wording_matches_golden() {
    let ctx = PromptContext {
        round: 2,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.0,
        prior_strategy: Some("Undercut slightly.".into()),
        history: vec![row(1, 1.47, 0.4717, 0.2217, Some(1.47))],
        rival_labels: vec!["Seller 1".into()],
    };
    let rendered = build_repeated_prompt(&cfg("Seller 2", 0.0, InfoAccess::Full), &ctx).unwrap();
    assert_matches_golden(&rendered, "c1_round2_myopic.txt");
    assert!(rendered.contains("in the current round."));
    assert!(!rendered.contains("in the long run."));
}

#[test]
fn one_shot_duopoly_matches_golden() {
    let rendered = build_one_shot_bertrand_prompt(&LogitMarketParams::steep(2), "Seller 1").unwrap();
    assert_matches_golden(&rendered, "c2_steep.txt");
    assert!(rendered.contains(" - Value index of each product (a):          4"));
}

#[test]
fn one_shot_duopoly_baseline_params_substitute() {
    let rendered = build_one_shot_bertrand_prompt(&LogitMarketParams::baseline(2), "Seller 2").unwrap();
    assert!(rendered.contains(" - Value index of each product (a):          2"));
    assert!(rendered.contains(" - Price elasticity of demand (mu):        0.25"));
    assert!(rendered.contains("You are Seller 2,"));
}

#[test]
fn one_shot_duopoly_rejects_wrong_seller_count() {
    assert!(build_one_shot_bertrand_prompt(&LogitMarketParams::steep(3), "Seller 1").is_err());
}

#[test]
fn one_shot_monopoly_matches_golden() {
    let rendered = build_one_shot_monopoly_prompt(&LogitMarketParams::steep(2)).unwrap();
    assert_matches_golden(&rendered, "c3_steep.txt");
    assert!(rendered.contains("maximize the joint profit of the two products"));
    assert!(rendered.contains("put the list inside \\boxed{}"));
}

#[test]
fn one_shot_monopoly_rejects_wrong_product_count() {
    assert!(build_one_shot_monopoly_prompt(&LogitMarketParams::steep(1)).is_err());
}

#[test]
fn repeated_monopoly_matches_goldens() {
    let config = cfg("Monopolist", 0.95, InfoAccess::Full);
    let ctx1 = PromptContext {
        round: 1,
        n_sellers: 1,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: None,
        history: vec![],
        rival_labels: vec![],
    };
    assert_matches_golden(&build_repeated_monopoly_prompt(&config, &ctx1).unwrap(), "c4_round1.txt");

    let ctx3 = PromptContext {
        round: 3,
        n_sellers: 1,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: Some("Probe upward from 1.5.".into()),
        history: vec![row(1, 1.33, 0.6862, 0.2264, None), row(2, 1.5, 0.6408, 0.3204, None)],
        rival_labels: vec![],
    };
    assert_matches_golden(&build_repeated_monopoly_prompt(&config, &ctx3).unwrap(), "c4_round3.txt");
}

// --- window slicing boundaries -------------------------------------------

fn view_with_rounds(max_round_exclusive: usize) -> Vec<VisiblePeriod> {
    (1..max_round_exclusive).map(|r| row(r, 1.5, 0.4, 0.2, Some(1.5))).collect()
}

fn rendered_rounds(prompt: &str) -> Vec<usize> {
    let re = regex::Regex::new(r"(?m)^Round (\d+):$").unwrap();
    re.captures_iter(prompt).map(|c| c[1].parse().unwrap()).collect()
}

#[test]
fn window_slicing_hits_boundaries_exactly() {
    let config = cfg("Seller 1", 0.95, InfoAccess::Full);
    for (round, expect_first, expect_last) in [
        (1usize, None, None),
        (2, Some(1usize), Some(1usize)),
        (101, Some(1), Some(100)),
        (102, Some(2), Some(101)),
        (150, Some(50), Some(149)),
    ] {
        let history = view_with_rounds(round);
        let view = AgentView { round, n_sellers: 2, history: &history };
        let ctx = PromptContext::from_view(&config, &view, 1.0, None, vec!["Seller 2".into()]);
        let prompt = build_repeated_prompt(&config, &ctx).unwrap();
        let rounds = rendered_rounds(&prompt);
        match (expect_first, expect_last) {
            (None, None) => assert!(rounds.is_empty(), "round {round}: expected no history"),
            (Some(first), Some(last)) => {
                assert_eq!(rounds.first().copied(), Some(first), "round {round}");
                assert_eq!(rounds.last().copied(), Some(last), "round {round}");
                assert_eq!(rounds.len(), last - first + 1, "round {round}: contiguous window");
                // Oldest first.
                let mut sorted = rounds.clone();
                sorted.sort_unstable();
                assert_eq!(rounds, sorted);
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn three_seller_history_labels_each_rival() {
    let config = cfg("Seller 2", 0.95, InfoAccess::Full);
    let history = vec![VisiblePeriod {
        round: 1,
        own_price: 1.7,
        own_quantity: 0.3,
        own_profit: 0.21,
        rival_prices: Some(vec![1.8, 1.9]),
    }];
    let ctx = PromptContext {
        round: 2,
        n_sellers: 3,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: None,
        history,
        rival_labels: vec!["Seller 1".into(), "Seller 3".into()],
    };
    let prompt = build_repeated_prompt(&config, &ctx).unwrap();
    assert!(prompt.contains("an oligopolistic market with 3 sellers"));
    assert!(prompt.contains("Round 1 (Opponents):"));
    assert!(prompt.contains("  - Seller 1's price:1.8"));
    assert!(prompt.contains("  - Seller 3's price:1.9"));
}

// --- own-only leak fuzz ----------------------------------------------------

#[test]
fn own_only_prompts_never_mention_rival_prices() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let config = cfg("Seller 2", 0.95, InfoAccess::OwnOnly);
    for _ in 0..200 {
        let rounds = rng.gen_range(1..40usize);
        let history: Vec<VisiblePeriod> =
            (1..=rounds).map(|r| row(r, rng.gen_range(0.5..3.0), rng.gen(), rng.gen(), None)).collect();
        let view = AgentView { round: rounds + 1, n_sellers: 2, history: &history };
        let ctx = PromptContext::from_view(&config, &view, 1.0, None, vec![]);
        let prompt = build_repeated_prompt(&config, &ctx).unwrap();
        assert!(!prompt.contains("Opponent"), "own-only prompt leaked an opponent line");
        assert!(!prompt.contains("opponent"), "own-only prompt promises opponent data");
    }
}

#[test]
fn rendering_is_pure() {
    let ctx = PromptContext {
        round: 7,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: Some("x".into()),
        history: vec![row(6, 1.8, 0.4, 0.32, Some(1.79))],
        rival_labels: vec!["Seller 2".into()],
    };
    let config = cfg("Seller 1", 0.95, InfoAccess::Full);
    let a = build_repeated_prompt(&config, &ctx).unwrap();
    let b = build_repeated_prompt(&config, &ctx).unwrap();
    assert_eq!(a, b);
}

#[test]
fn template_overflow_guard_trips() {
    let mut config = cfg("Seller 1", 0.95, InfoAccess::Full);
    config.char_budget = 200;
    let ctx = PromptContext {
        round: 1,
        n_sellers: 2,
        marginal_cost: 1.0,
        delta: 0.95,
        prior_strategy: None,
        history: vec![],
        rival_labels: vec!["Seller 2".into()],
    };
    assert!(matches!(
        build_repeated_prompt(&config, &ctx),
        Err(pricelab::llm::LlmError::TemplateOverflow { .. })
    ));
}

#[test]
fn parse_of_expected_reply_round_trips_price() {
    // A reply following the echoed response template parses back to the
    // exact price for every template family.
    for price in [1.79, 1.8, 2.3456, 1.0001] {
        let reply = pricelab::llm::backend::templated_reply(Some(17), price);
        let parsed = pricelab::llm::parse_response(&reply).unwrap();
        assert_eq!(parsed.single_price(), Some(price));
        assert_eq!(parsed.round_echo, Some(17));
    }
}
