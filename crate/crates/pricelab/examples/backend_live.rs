//! Short live-backend session: five rounds of the repeated monopoly game
//! against a real chat-completion endpoint.
//!
//! Gated on environment variables so the example is a no-op offline:
//!
//! ```bash
//! export PRICELAB_ENDPOINT=http://localhost:8000/v1/chat/completions
//! export PRICELAB_MODEL=deepseek-r1-distill-qwen-32b
//! # export PRICELAB_API_KEY_ENV=MY_KEY_VAR   # optional, for keyed services
//! cargo run --example backend_live
//! ```

use pricelab::agent::InfoAccess;
use pricelab::config::{AgentSpec, BackendSpec, Benchmarks, ConfigFile, LlmSpec};
use pricelab::engine::ConvergenceRule;
use pricelab::llm::BackendConfig;
use pricelab::market::LogitMarketParams;

fn main() {
    let (Ok(endpoint), Ok(model)) =
        (std::env::var("PRICELAB_ENDPOINT"), std::env::var("PRICELAB_MODEL"))
    else {
        println!("set PRICELAB_ENDPOINT and PRICELAB_MODEL to run against a live backend;");
        println!("see configs/size_asymmetry.toml for the declarative equivalent.");
        return;
    };
    let cfg = ConfigFile {
        name: "live-monopoly-smoke".into(),
        seed: 1,
        runs: 1,
        max_periods: 5,
        out_dir: None,
        parallel: 1,
        market: LogitMarketParams::baseline(1),
        convergence: ConvergenceRule::default(),
        benchmarks: Some(Benchmarks { p_competitive: 1.4729266441, p_monopoly: 1.9249809191 }),
        agents: vec![AgentSpec::Llm(LlmSpec {
            label: Some("Monopolist".into()),
            delta: 0.95,
            info_access: InfoAccess::Full,
            history_window: 100,
            anti_collusion: None,
            token_cap: 5000,
            max_retries: 2,
            backend: BackendSpec::Http(BackendConfig {
                endpoint,
                model_name: model,
                api_key_env: std::env::var("PRICELAB_API_KEY_ENV").ok(),
                temperature: 0.6,
                timeout_secs: 300,
                max_retries: 2,
            }),
        })],
    };
    let out = std::env::temp_dir().join("pricelab_live_smoke");
    let mut stdout = std::io::stdout().lock();
    match pricelab::cli::run_condition(&mut stdout, &cfg, &out, 1, 1) {
        Ok(outcome) => println!("done; log under {}", outcome.out_dir.display()),
        Err(e) => println!("live run failed: {e}"),
    }
}
