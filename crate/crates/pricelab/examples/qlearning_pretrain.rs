//! Desk-scale pretraining of a pair of tabular Q-learners: self-play until
//! every state's greedy action has been stable for 10,000 periods, then a
//! look at the greedy self-play prices and a save/reload round trip.
//!
//! ```bash
//! cargo run --release --example qlearning_pretrain
//! ```

use pricelab::equilibrium::benchmarks;
use pricelab::market::LogitMarketParams;
use pricelab::qlearn::{greedy_selfplay, pretrain, PretrainConfig, PriceGrid, QParams, TableFile};

fn main() {
    let market = LogitMarketParams::baseline(2);
    let (nash, mono) = benchmarks(&market);
    println!("benchmarks: p^C = {:.4}, p^M = {:.4}", nash.price, mono.price);

    let grid = PriceGrid::spanning(nash.price, mono.price, 15, 0.1).unwrap();
    let params = QParams::defaults(grid);
    let cfg = PretrainConfig::desk(42, nash.price);
    println!(
        "pretraining: m={} window={} cap={} seed={}",
        params.grid.len(),
        cfg.stability_window,
        cfg.cap,
        cfg.seed
    );

    let started = std::time::Instant::now();
    let outcome = pretrain(&params, &market, &cfg).expect("pretraining runs");
    println!(
        "converged = {} after {} periods in {:.2}s",
        outcome.converged,
        outcome.periods,
        started.elapsed().as_secs_f64()
    );

    let path = outcome.tables[0].values().len(); // table size, for display
    println!("table entries per agent: {path}");

    let play = greedy_selfplay(&outcome.tables, &params.grid, outcome.final_actions, 12);
    println!("\ngreedy self-play from the final state:");
    for (t, (a, b)) in play.iter().enumerate() {
        println!("  period {:>2}: {a:.4}  {b:.4}", t + 1);
    }
    let tail: Vec<f64> = play.iter().flat_map(|(a, b)| [*a, *b]).collect();
    let avg = tail.iter().sum::<f64>() / tail.len() as f64;
    println!("average greedy price {avg:.4} vs competitive {:.4}", nash.price);

    let out = std::env::temp_dir().join("pricelab_pretrain_demo.plqt");
    let file = TableFile::from_pretrain(&params, &cfg, &outcome);
    file.save(&out).expect("save tables");
    let reloaded = TableFile::load(&out).expect("reload tables");
    println!("\nsaved + reloaded {} tables from {} (bit-identical: {})", reloaded.tables.len(), out.display(), reloaded == file);
}
