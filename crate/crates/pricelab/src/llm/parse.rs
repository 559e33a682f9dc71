//! Structured-response parsing: pull a boxed price (or price list), the
//! echoed round number, and the rationale/strategy tags out of a model
//! reply, tolerating any amount of surrounding chain-of-thought text.

use super::LlmError;
use regex::Regex;
use std::sync::OnceLock;

/// Price content of a reply: a single boxed numeral or a boxed list.
#[derive(Debug, Clone, PartialEq)]
pub enum PriceExtraction {
    Single(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedResponse {
    /// Round number echoed inside `<round>...</round>`, when present.
    pub round_echo: Option<u32>,
    pub price: PriceExtraction,
    pub rationale: Option<String>,
    pub strategy: Option<String>,
    /// The response verbatim.
    pub raw: String,
}

impl ParsedResponse {
    /// The single boxed price, if the reply carried one.
    pub fn single_price(&self) -> Option<f64> {
        match &self.price {
            PriceExtraction::Single(p) => Some(*p),
            PriceExtraction::List(_) => None,
        }
    }

    /// The echoed round differs from the round that was prompted.
    pub fn round_mismatch(&self, expected: usize) -> Option<String> {
        match self.round_echo {
            Some(echo) if echo as usize != expected => {
                Some(format!("round echo {echo} does not match prompted round {expected}"))
            }
            _ => None,
        }
    }
}

fn boxed_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\\boxed\{([^{}]*)\}").expect("valid regex"))
}

fn round_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<round>\s*(\d+)\s*</round>").expect("valid regex"))
}

fn tag_re(tag: &'static str, cell: &'static OnceLock<Regex>) -> &'static Regex {
    cell.get_or_init(|| Regex::new(&format!(r"(?s)<{tag}>(.*?)</{tag}>")).expect("valid regex"))
}

fn parse_price_text(text: &str) -> Option<PriceExtraction> {
    let inner = text.trim().trim_start_matches('$').trim_end_matches('$').trim();
    let inner = inner.trim_start_matches('[').trim_end_matches(']').trim();
    if inner.is_empty() {
        return None;
    }
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let mut values = Vec::with_capacity(parts.len());
    for part in &parts {
        let cleaned = part.trim_start_matches('$').trim_end_matches('$').trim();
        let v: f64 = cleaned.parse().ok()?;
        if !v.is_finite() {
            return None;
        }
        values.push(v);
    }
    if values.len() == 1 && !text.contains('[') {
        Some(PriceExtraction::Single(values[0]))
    } else {
        Some(PriceExtraction::List(values))
    }
}

/// Parse a model reply. The first `\boxed{...}` whose content is a numeral
/// (or a list of numerals) wins; empty boxes — like the one in the echoed
/// response template — are skipped.
pub fn parse_response(text: &str) -> Result<ParsedResponse, LlmError> {
    let mut price = None;
    for cap in boxed_re().captures_iter(text) {
        if let Some(extracted) = parse_price_text(&cap[1]) {
            price = Some(extracted);
            break;
        }
    }
    let price = price.ok_or_else(|| {
        LlmError::MalformedResponse("no parsable \\boxed{...} price found".to_string())
    })?;
    match &price {
        PriceExtraction::Single(p) if *p <= 0.0 => return Err(LlmError::NonPositivePrice(*p)),
        PriceExtraction::List(ps) if ps.iter().any(|p| *p <= 0.0) => {
            return Err(LlmError::NonPositivePrice(
                ps.iter().copied().find(|p| *p <= 0.0).unwrap_or(0.0),
            ))
        }
        _ => {}
    }

    let round_echo = round_re()
        .captures(text)
        .and_then(|c| c[1].parse::<u32>().ok());

    static RATIONALE: OnceLock<Regex> = OnceLock::new();
    static STRATEGY: OnceLock<Regex> = OnceLock::new();
    let rationale = tag_re("rationale", &RATIONALE)
        .captures(text)
        .map(|c| c[1].trim().to_string());
    let strategy = tag_re("strategy", &STRATEGY)
        .captures(text)
        .map(|c| c[1].trim().to_string());

    Ok(ParsedResponse { round_echo, price, rationale, strategy, raw: text.to_string() })
}
