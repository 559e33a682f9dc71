//! Competitive (one-shot Nash) and joint-monopoly benchmark prices of the
//! logit market for one to five sellers, plus the steep-demand validation
//! parameterization.
//!
//! ```bash
//! cargo run --example benchmarks
//! ```

use pricelab::equilibrium::{benchmarks, best_response, SolverConfig};
use pricelab::market::LogitMarketParams;

fn main() {
    println!("baseline market (a=2, mu=0.25, a0=0, c=1):");
    println!("{:>3} {:>12} {:>12}", "n", "competitive", "monopoly");
    for n in 1..=5 {
        let params = LogitMarketParams::baseline(n);
        let (nash, mono) = benchmarks(&params);
        println!("{n:>3} {:>12.6} {:>12.6}", nash.price, mono.price);
    }

    let steep = LogitMarketParams::steep(2);
    let (nash, mono) = benchmarks(&steep);
    println!("\nsteep market (a=4, mu=0.1, a0=1, c=3), n=2:");
    println!("competitive {:.6}, monopoly {:.6}", nash.price, mono.price);

    // The fixed-point property: best-responding to the Nash price stays put.
    let params = LogitMarketParams::baseline(2);
    let cfg = SolverConfig::for_market(&params);
    let (nash2, _) = benchmarks(&params);
    let (br, _) = best_response(&params, &[nash2.price], &cfg);
    println!("\nfixed point check at n=2: BR({:.6}) = {:.6}", nash2.price, br);
}
