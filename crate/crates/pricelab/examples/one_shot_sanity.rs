//! One-shot validation harness: score replies to the single-period duopoly
//! and the two-product monopoly (demand formula in the prompt) against the
//! theoretical optima, within 5%. Uses deterministic mock replies here; swap
//! in an HTTP backend to validate a live model.
//!
//! ```bash
//! cargo run --example one_shot_sanity
//! ```

use pricelab::engine::{one_shot_game, OneShotGame};
use pricelab::llm::MockBackend;
use pricelab::market::LogitMarketParams;

fn main() {
    let params = LogitMarketParams::steep(2);

    // A reply that solves the first-order condition well...
    let sharp = MockBackend::scripted(
        vec!["<think>\nmarginal revenue equals marginal cost near 3.12\n</think>\n\\boxed{[3.12]}".into()],
        false,
    );
    let res = one_shot_game(&params, OneShotGame::Duopoly, "Seller 1", &sharp, 0, 0.05).unwrap();
    println!(
        "duopoly: reply {:?} vs optimum {:.4} -> correct = {}",
        res.prices, res.optimum, res.correct
    );

    // ...and one that overshoots badly.
    let blunt = MockBackend::scripted(vec!["\\boxed{[4.5]}".into()], false);
    let res = one_shot_game(&params, OneShotGame::Duopoly, "Seller 2", &blunt, 0, 0.05).unwrap();
    println!(
        "duopoly: reply {:?} vs optimum {:.4} -> correct = {}",
        res.prices, res.optimum, res.correct
    );

    // Joint pricing of both products.
    let joint = MockBackend::scripted(vec!["\\boxed{[3.15, 3.14]}".into()], false);
    let res = one_shot_game(&params, OneShotGame::Monopoly, "Seller1", &joint, 0, 0.05).unwrap();
    println!(
        "monopoly: reply {:?} vs optimum {:.4} -> correct = {} (errors {:?})",
        res.prices, res.optimum, res.correct, res.relative_errors
    );
}
