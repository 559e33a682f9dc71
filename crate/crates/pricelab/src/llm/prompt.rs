//! Prompt rendering for LLM pricing agents.
//!
//! Four templates: the repeated oligopoly game, two one-shot validation games
//! (duopoly and two-product monopoly, demand formula supplied), and the
//! repeated monopoly game. Rendering is a pure function of its inputs —
//! identical inputs produce byte-identical prompts, which the golden-file
//! tests pin down.

use super::{LlmAgentConfig, LlmError};
use crate::agent::{AgentView, InfoAccess, VisiblePeriod};
use crate::market::LogitMarketParams;

/// Numbers in prompts: up to 4 decimal places, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{:.4}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Everything the repeated-game templates need for one render.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptContext {
    /// 1-based round being decided.
    pub round: usize,
    pub n_sellers: usize,
    pub marginal_cost: f64,
    pub delta: f64,
    /// The strategy text the agent declared last round, echoed back.
    pub prior_strategy: Option<String>,
    /// Windowed history, oldest first; rival prices absent under own-only
    /// access.
    pub history: Vec<VisiblePeriod>,
    /// Labels of the rivals, roster order, self excluded. Used only when the
    /// market has more than two sellers.
    pub rival_labels: Vec<String>,
}

impl PromptContext {
    /// Window the view down to the most recent `history_window` rounds:
    /// rounds `max(1, i-window) ..= i-1` for round `i`, oldest first.
    pub fn from_view(
        cfg: &LlmAgentConfig,
        view: &AgentView,
        marginal_cost: f64,
        prior_strategy: Option<String>,
        rival_labels: Vec<String>,
    ) -> Self {
        let i = view.round;
        let first_round = i.saturating_sub(cfg.history_window).max(1);
        let history: Vec<VisiblePeriod> = view
            .history
            .iter()
            .filter(|p| p.round >= first_round && p.round < i)
            .cloned()
            .collect();
        Self {
            round: i,
            n_sellers: view.n_sellers,
            marginal_cost,
            delta: cfg.delta,
            prior_strategy,
            history,
            rival_labels,
        }
    }
}

fn check_budget(prompt: String, cfg: &LlmAgentConfig) -> Result<String, LlmError> {
    if prompt.len() > cfg.char_budget {
        return Err(LlmError::TemplateOverflow { len: prompt.len(), budget: cfg.char_budget });
    }
    Ok(prompt)
}

fn objective_line(delta: f64) -> &'static str {
    if delta == 0.0 {
        "Your TOP PRIORITY is to set prices which maximize your own profit in the current round."
    } else {
        "Your TOP PRIORITY is to set prices which maximize your own profit in the long run."
    }
}

fn response_template_boxed(round: usize, token_cap: u32) -> String {
    format!(
        "Response template\n\
         <round>{round}</round>\n\
         My chosen price: \\boxed{{}}.\n\
         <rationale>\n\
         \x20 [Explain your pricing rationale here.]\n\
         </rationale>\n\
         <strategy>\n\
         \x20 [Outline your pricing strategy for future rounds here.]\n\
         </strategy>\n\
         \n\
         Restrict your output to {token_cap} tokens and follow the exact format above."
    )
}

fn own_history_rows(row: &VisiblePeriod) -> String {
    format!(
        "Round {}:\n\
         \x20 - Your price:                 {}\n\
         \x20 - Your quantity demanded:     {}\n\
         \x20 - Your profit:                {}",
        row.round,
        fmt_num(row.own_price),
        fmt_num(row.own_quantity),
        fmt_num(row.own_profit)
    )
}

/// Repeated oligopoly prompt.
///
/// Under own-only access the opponent data clause and every opponent history
/// line are omitted. The optional anti-collusion instruction is appended as
/// one extra line of the Game instruction block. With more than two sellers
/// the single-opponent history line generalizes to one labelled line per
/// rival.
pub fn build_repeated_prompt(cfg: &LlmAgentConfig, ctx: &PromptContext) -> Result<String, LlmError> {
    if ctx.history.len() > cfg.history_window {
        return Err(LlmError::InvalidConfig(format!(
            "history has {} rows, window is {}",
            ctx.history.len(),
            cfg.history_window
        )));
    }
    if cfg.info_access == InfoAccess::OwnOnly && ctx.history.iter().any(|r| r.rival_prices.is_some()) {
        return Err(LlmError::InvalidConfig("own-only context carries rival prices".into()));
    }

    let mut s = String::new();
    s.push_str("Game instruction\n");
    s.push_str(&format!(
        "You are {}, a seller in an oligopolistic market with {} sellers.\n",
        cfg.seller_label, ctx.n_sellers
    ));
    s.push_str(&format!("The current round is round {}.\n", ctx.round));
    match cfg.info_access {
        InfoAccess::Full => s.push_str(
            "You will be provided with previous price and profit data for yourself,\n\
             and previous price data for your opponent.\n",
        ),
        InfoAccess::OwnOnly => {
            s.push_str("You will be provided with previous price and profit data for yourself.\n")
        }
    }
    s.push_str(objective_line(ctx.delta));
    if let Some(extra) = &cfg.anti_collusion {
        s.push('\n');
        s.push_str(extra);
    }
    s.push_str("\n\n");

    s.push_str(&format!(
        "Product and seller information\n\
         \x20- Marginal cost (c):                         {}\n\
         \x20- Discount factor (delta)                 {}\n\n",
        fmt_num(ctx.marginal_cost),
        fmt_num(ctx.delta)
    ));

    if let Some(strategy) = &ctx.prior_strategy {
        s.push_str("Most recent pricing strategy\n");
        s.push_str(strategy);
        s.push_str("\n\n");
    }

    s.push_str("Market history (most recent up to 100 rounds)\n");
    if !ctx.history.is_empty() {
        s.push('\n');
        for row in &ctx.history {
            s.push_str(&own_history_rows(row));
            s.push('\n');
            if let Some(rivals) = &row.rival_prices {
                if rivals.len() == 1 {
                    s.push_str(&format!(
                        "Round {} (Opponent):\n\
                         \x20 - Opponent's price:{}\n",
                        row.round,
                        fmt_num(rivals[0])
                    ));
                } else {
                    s.push_str(&format!("Round {} (Opponents):\n", row.round));
                    for (label, price) in ctx.rival_labels.iter().zip(rivals) {
                        s.push_str(&format!("\x20 - {}'s price:{}\n", label, fmt_num(*price)));
                    }
                }
            }
        }
    }
    s.push('\n');

    s.push_str(&response_template_boxed(ctx.round, cfg.token_cap));
    check_budget(s, cfg)
}

fn one_shot_market_block(params: &LogitMarketParams, heading: &str) -> String {
    format!(
        "{heading}\n\
         \x20- Value index of each product (a):          {}\n\
         \x20- Marginal cost (c):                        {}\n\
         \x20- Price elasticity of demand (mu):        {}\n\
         \x20- Outside-option value (a0):                {}\n\
         \n\
         Demand for product i:\n\
         \x20 q_i = exp((a-p_i)/mu) /\n\
         \x20       (sum_{{j=1}}^{{2}}(exp((a-p_j)/mu)) + exp(a0/mu))\n\
         \n\
         Profit for product i:\n\
         \x20 pi_i = (p_i-c)*q_i\n",
        fmt_num(params.a),
        fmt_num(params.c),
        fmt_num(params.mu),
        fmt_num(params.a0)
    )
}

const ONE_SHOT_RESPONSE: &str = "Response template\n\
    Please reason step by step, and place the prices that you set for all products in a list and put the list inside \\boxed{}.\n\
    \n\
    Aside from outputting the prices, you should also output your pricing rationale in a chain-of-thought fashion inside <think>\\n and \\n</think>\n\
    \n\
    Restrict your output to 5000 tokens and follow the exact format above.";

/// One-shot duopoly prompt with the demand formula supplied explicitly.
/// Two sellers only.
pub fn build_one_shot_bertrand_prompt(
    params: &LogitMarketParams,
    seller_label: &str,
) -> Result<String, LlmError> {
    if params.n != 2 {
        return Err(LlmError::InvalidConfig(format!(
            "one-shot duopoly needs exactly 2 sellers, got {}",
            params.n
        )));
    }
    Ok(format!(
        "Game instruction\n\
         You are {seller_label}, a seller in an oligopolistic market with one other seller. \
         Each one of you sells one product. Your goal is to maximize your own profit.\n\
         \n\
         {}\n\
         \n\
         {ONE_SHOT_RESPONSE}",
        one_shot_market_block(params, "Market and product information")
    ))
}

/// One-shot two-product monopoly prompt: one seller maximizes joint profit
/// over both products.
pub fn build_one_shot_monopoly_prompt(params: &LogitMarketParams) -> Result<String, LlmError> {
    if params.n != 2 {
        return Err(LlmError::InvalidConfig(format!(
            "the two-product monopoly game needs n = 2 products, got {}",
            params.n
        )));
    }
    Ok(format!(
        "Game instruction\n\
         You are Seller1, a monopolistic seller offering two products. \
         Your goal is to maximize the joint profit of the two products.\n\
         \n\
         {}\n\
         {ONE_SHOT_RESPONSE}",
        one_shot_market_block(params, "Market and production information")
    ))
}

/// Repeated single-product monopoly prompt: the oligopoly structure minus
/// all opponent content, with history rows directly under the heading.
pub fn build_repeated_monopoly_prompt(cfg: &LlmAgentConfig, ctx: &PromptContext) -> Result<String, LlmError> {
    if ctx.history.len() > cfg.history_window {
        return Err(LlmError::InvalidConfig(format!(
            "history has {} rows, window is {}",
            ctx.history.len(),
            cfg.history_window
        )));
    }
    let mut s = String::new();
    s.push_str("Game instruction\n");
    s.push_str("You are Monopolist, a monopolistic seller selling one product. ");
    s.push_str(objective_line(ctx.delta));
    if let Some(extra) = &cfg.anti_collusion {
        s.push('\n');
        s.push_str(extra);
    }
    s.push_str("\n\n");

    s.push_str(&format!(
        "Product and seller information\n\
         \x20- Marginal cost (c):                        {}\n\
         \x20- Discount factor (delta)                 {}\n\n",
        fmt_num(ctx.marginal_cost),
        fmt_num(ctx.delta)
    ));

    if let Some(strategy) = &ctx.prior_strategy {
        s.push_str("Most recent pricing strategy\n");
        s.push_str(strategy);
        s.push_str("\n\n");
    }

    s.push_str("Market history (most recent up to 100 rounds)\n");
    for row in &ctx.history {
        s.push_str(&own_history_rows(row));
        s.push('\n');
    }
    s.push('\n');

    s.push_str(&response_template_boxed(ctx.round, cfg.token_cap));
    check_budget(s, cfg)
}
