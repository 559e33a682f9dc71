//! Minimal SVG price-trajectory charts with competitive and monopoly
//! reference lines. Text-only output, deterministic, no dependencies.

use super::PeriodRecord;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;

const SERIES_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn x_of(round: usize, max_round: usize) -> f64 {
    let span = WIDTH - MARGIN_L - MARGIN_R;
    MARGIN_L + span * (round as f64 - 1.0) / (max_round.max(2) as f64 - 1.0)
}

fn y_of(price: f64, lo: f64, hi: f64) -> f64 {
    let span = HEIGHT - MARGIN_T - MARGIN_B;
    HEIGHT - MARGIN_B - span * (price - lo) / (hi - lo)
}

/// Render one run's price paths. Reference lines are dashed; one polyline
/// per seller, labelled in the legend.
pub fn svg_price_chart(
    records: &[PeriodRecord],
    labels: &[String],
    p_competitive: f64,
    p_monopoly: f64,
    title: &str,
) -> String {
    let n = records.first().map(|r| r.prices.len()).unwrap_or(0);
    let max_round = records.last().map(|r| r.t).unwrap_or(1);
    let mut lo = p_competitive.min(p_monopoly);
    let mut hi = p_competitive.max(p_monopoly);
    for r in records {
        for p in &r.prices {
            lo = lo.min(*p);
            hi = hi.max(*p);
        }
    }
    let pad = 0.08 * (hi - lo).max(0.2);
    lo -= pad;
    hi += pad;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));

    // Axes.
    s.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    s.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">round</text>\n",
        (WIDTH + MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 10.0
    ));
    // Y ticks.
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = y_of(v, lo, hi);
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.2}</text>\n",
            MARGIN_L - 6.0,
            y + 4.0
        ));
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{MARGIN_L}\" y2=\"{y}\" stroke=\"black\"/>\n",
            MARGIN_L - 4.0
        ));
    }
    // X ticks: start, quarters, end.
    for k in 0..=4 {
        let round = 1 + (max_round - 1) * k / 4;
        let x = x_of(round.max(1), max_round);
        s.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{round}</text>\n",
            HEIGHT - MARGIN_B + 16.0
        ));
    }

    // Reference lines.
    for (value, label, color) in
        [(p_competitive, "competitive", "#555555"), (p_monopoly, "monopoly", "#999999")]
    {
        let y = y_of(value, lo, hi);
        s.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" stroke-dasharray=\"6,4\"/>\n",
            WIDTH - MARGIN_R
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{label} {value:.2}</text>\n",
            WIDTH - MARGIN_R - 120.0,
            y - 4.0
        ));
    }

    // Price paths.
    for seller in 0..n {
        let color = SERIES_COLORS[seller % SERIES_COLORS.len()];
        let mut points = String::new();
        for r in records {
            points.push_str(&format!("{:.2},{:.2} ", x_of(r.t, max_round), y_of(r.prices[seller], lo, hi)));
        }
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.trim_end()
        ));
        let label = labels.get(seller).cloned().unwrap_or_else(|| format!("seller {}", seller + 1));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            MARGIN_L + 8.0,
            MARGIN_T + 14.0 * (seller as f64 + 1.0),
            xml_escape(&label)
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
