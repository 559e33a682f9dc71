//! A laboratory for repeated-pricing games between heterogeneous algorithmic agents.
//!
//! The crate has three layers:
//!
//! * **Analytics** — closed-form duopoly theory with linear demand
//!   ([`theory`]), the multinomial-logit market every experiment runs in
//!   ([`market`]), and numeric competitive / monopoly benchmarks
//!   ([`equilibrium`]).
//! * **Agents** — deterministic reference strategies ([`rule`]), tabular
//!   Q-learners with pretraining and persistence ([`qlearn`]), and
//!   LLM-backed pricing agents with prompt rendering, response parsing,
//!   and pluggable chat backends ([`llm`]).
//! * **Orchestration** — the period loop, convergence detection, run
//!   logging, summary statistics ([`engine`]), declarative experiment
//!   configs ([`config`]), and the command implementations behind the
//!   `pricelab` binary ([`cli`]).
//!
//! Start with the runnable examples (`cargo run --example benchmarks`,
//! `cargo run --example scripted_experiment`, ...) — there is one per major
//! capability.

// Validation guards are written `!(x > 0.0)` so NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod cli;
pub mod config;
pub mod engine;
pub mod equilibrium;
pub mod llm;
pub mod market;
pub mod qlearn;
pub mod rule;
pub mod theory;
