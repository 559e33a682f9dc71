//! Tabular Q-learning pricing agent for two-seller markets.
//!
//! The state is the previous joint price pair, actions are points on a
//! discretized price grid, exploration is epsilon-greedy with exponential
//! decay `eps = exp(-t * beta)`, and the update is the standard convex
//! combination
//! `Q(s,p) <- (1-alpha) Q(s,p) + alpha [pi + delta max_p' Q(s',p')]`.
//!
//! Agents are pretrained in self-play until every state's greedy action has
//! been stable for a configured window, then deployed either frozen (pure
//! greedy, no updates) or adaptive (keeps exploring and updating against its
//! new opponent). Pretrained tables persist to a small versioned binary file
//! so later experiments can reload them.

use crate::agent::{Agent, AgentError, AgentView, Decision, VisiblePeriod};
use crate::market::{market_outcome, LogitMarketParams, PriceVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QError {
    #[error("invalid price grid: {0}")]
    InvalidGrid(String),
    #[error("invalid learning parameters: {0}")]
    InvalidParams(String),
    #[error("pretraining cap {cap} is below the stability window {window}")]
    CapBelowWindow { cap: u64, window: u64 },
    #[error("table io: {0}")]
    Io(#[from] std::io::Error),
    #[error("table file format: {0}")]
    Format(String),
}

/// Strictly increasing discretized price points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceGrid {
    points: Vec<f64>,
}

impl PriceGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, QError> {
        if points.len() < 2 {
            return Err(QError::InvalidGrid("need at least 2 points".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(QError::InvalidGrid("points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QError::InvalidGrid("points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `m` equispaced points spanning the competitive-to-monopoly corridor
    /// widened by `xi` on each side:
    /// `[p_comp - xi*(p_mono - p_comp), p_mono + xi*(p_mono - p_comp)]`.
    pub fn spanning(p_competitive: f64, p_monopoly: f64, m: usize, xi: f64) -> Result<Self, QError> {
        if !(p_monopoly > p_competitive) {
            return Err(QError::InvalidGrid(format!(
                "need p_monopoly > p_competitive, got {p_monopoly} vs {p_competitive}"
            )));
        }
        if xi < 0.0 {
            return Err(QError::InvalidGrid("xi must be nonnegative".into()));
        }
        let span = p_monopoly - p_competitive;
        let lo = p_competitive - xi * span;
        let hi = p_monopoly + xi * span;
        let points = (0..m)
            .map(|i| lo + (hi - lo) * i as f64 / (m - 1).max(1) as f64)
            .collect();
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn price(&self, index: usize) -> f64 {
        self.points[index]
    }

    pub fn nearest_index(&self, price: f64) -> usize {
        let mut best = 0;
        let mut best_gap = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let gap = (p - price).abs();
            if gap < best_gap {
                best_gap = gap;
                best = i;
            }
        }
        best
    }
}

/// Learning rate, exploration decay, discounting and the action grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    /// Learning rate, in (0,1]. Default 0.15.
    pub alpha: f64,
    /// Exploration decay per period. Default 0.004.
    pub beta: f64,
    /// Discount factor, in [0,1). Default 0.95.
    pub delta: f64,
    pub grid: PriceGrid,
}

impl QParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, grid: PriceGrid) -> Result<Self, QError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(QError::InvalidParams(format!("alpha must be in (0,1], got {alpha}")));
        }
        if !(beta > 0.0) {
            return Err(QError::InvalidParams(format!("beta must be > 0, got {beta}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(QError::InvalidParams(format!("delta must be in [0,1), got {delta}")));
        }
        Ok(Self { alpha, beta, delta, grid })
    }

    /// alpha=0.15, beta=0.004, delta=0.95 on the supplied grid.
    pub fn defaults(grid: PriceGrid) -> Self {
        Self { alpha: 0.15, beta: 0.004, delta: 0.95, grid }
    }
}

/// Exploration probability after `t` periods: `exp(-t * beta)`.
pub fn epsilon(t: u64, beta: f64) -> f64 {
    (-(t as f64) * beta).exp()
}

/// Joint previous-price state: grid indices of (own, rival) last prices.
pub type QState = (usize, usize);

/// Dense state-action value table over m^2 states and m actions.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    m: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(m: usize) -> Self {
        Self { m, values: vec![0.0; m * m * m] }
    }

    /// Initialize every entry to the discounted payoff of its action against
    /// a uniformly randomizing rival: `Q0(s,a) = mean_j pi(a,j) / (1-delta)`.
    /// Keeps early greedy play from locking into pessimistic corners.
    pub fn uniform_rival_init(params: &QParams, market: &LogitMarketParams) -> Self {
        let m = params.grid.len();
        let profit = profit_matrix(&params.grid, market);
        let mut table = Self::zeros(m);
        for (action, row) in profit.iter().enumerate() {
            let mean: f64 = row.iter().sum::<f64>() / m as f64;
            let v = mean / (1.0 - params.delta);
            for own in 0..m {
                for rival in 0..m {
                    table.set((own, rival), action, v);
                }
            }
        }
        table
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    fn offset(&self, state: QState, action: usize) -> usize {
        debug_assert!(state.0 < self.m && state.1 < self.m && action < self.m);
        (state.0 * self.m + state.1) * self.m + action
    }

    pub fn get(&self, state: QState, action: usize) -> f64 {
        self.values[self.offset(state, action)]
    }

    pub fn set(&mut self, state: QState, action: usize, value: f64) {
        let i = self.offset(state, action);
        self.values[i] = value;
    }

    /// Greedy action; ties break to the lowest index.
    pub fn greedy(&self, state: QState) -> usize {
        let base = (state.0 * self.m + state.1) * self.m;
        let row = &self.values[base..base + self.m];
        let mut best = 0;
        for (i, v) in row.iter().enumerate().skip(1) {
            if *v > row[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_value(&self, state: QState) -> f64 {
        let base = (state.0 * self.m + state.1) * self.m;
        self.values[base..base + self.m].iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Epsilon-greedy selection; with probability `eps` a uniform grid draw,
/// otherwise the greedy action. `eps = 0` consumes no randomness.
pub fn select_action<R: Rng>(table: &QTable, state: QState, eps: f64, rng: &mut R) -> usize {
    if eps > 0.0 && rng.gen::<f64>() < eps {
        rng.gen_range(0..table.m())
    } else {
        table.greedy(state)
    }
}

/// Apply the one-entry value update and return the new entry value.
pub fn q_update(
    table: &mut QTable,
    state: QState,
    action: usize,
    reward: f64,
    next_state: QState,
    params: &QParams,
) -> f64 {
    let bootstrap = table.max_value(next_state);
    let old = table.get(state, action);
    let new = (1.0 - params.alpha) * old + params.alpha * (reward + params.delta * bootstrap);
    table.set(state, action, new);
    new
}

/// Own-profit lookup `profit[own_action][rival_action]` for a 2-seller market.
fn profit_matrix(grid: &PriceGrid, market: &LogitMarketParams) -> Vec<Vec<f64>> {
    let market2 = LogitMarketParams { n: 2, ..*market };
    let m = grid.len();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let pv = PriceVector::new(vec![grid.price(i), grid.price(j)]).expect("grid prices valid");
            let out = market_outcome(&market2, &pv).expect("2 sellers");
            row.push(out.profits[0]);
        }
        rows.push(row);
    }
    rows
}

/// How the initial Q table is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QInit {
    UniformRival,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretrainConfig {
    /// Periods every state's greedy action must stay unchanged. Desk-scale
    /// default 10_000; the long profile uses 100_000.
    pub stability_window: u64,
    /// Hard stop. Desk-scale default 5_000_000; the long profile allows 1e9.
    pub cap: u64,
    pub seed: u64,
    /// Both sellers' notional previous price at t=0 (snapped to the grid).
    pub initial_price: f64,
    pub init: QInit,
}

impl PretrainConfig {
    pub fn desk(seed: u64, initial_price: f64) -> Self {
        Self { stability_window: 10_000, cap: 5_000_000, seed, initial_price, init: QInit::UniformRival }
    }

    pub fn long(seed: u64, initial_price: f64) -> Self {
        Self { stability_window: 100_000, cap: 1_000_000_000, seed, initial_price, init: QInit::UniformRival }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PretrainOutcome {
    pub tables: [QTable; 2],
    /// Periods of self-play actually executed.
    pub periods: u64,
    pub converged: bool,
    /// Joint action indices in the final period; a natural start state for
    /// greedy evaluation.
    pub final_actions: (usize, usize),
}

/// Self-play two learners in the logit market until every greedy action has
/// been stable for the configured window (or the cap is hit).
///
/// Deterministic given the seed: same seed, same tables, same period count.
pub fn pretrain(
    params: &QParams,
    market: &LogitMarketParams,
    cfg: &PretrainConfig,
) -> Result<PretrainOutcome, QError> {
    if cfg.stability_window < 1 {
        return Err(QError::InvalidParams("stability_window must be >= 1".into()));
    }
    if cfg.cap < cfg.stability_window {
        return Err(QError::CapBelowWindow { cap: cfg.cap, window: cfg.stability_window });
    }
    let m = params.grid.len();
    let profit = profit_matrix(&params.grid, market);
    let mut tables = match cfg.init {
        QInit::UniformRival => {
            let t = QTable::uniform_rival_init(params, market);
            [t.clone(), t]
        }
        QInit::Zero => [QTable::zeros(m), QTable::zeros(m)],
    };
    let mut greedy: [Vec<usize>; 2] = [all_greedy(&tables[0]), all_greedy(&tables[1])];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let anchor = params.grid.nearest_index(cfg.initial_price);
    let (mut prev_a, mut prev_b) = (anchor, anchor);
    let mut stable: u64 = 0;
    let mut t: u64 = 0;
    while t < cfg.cap {
        let eps = epsilon(t, params.beta);
        let state_a = (prev_a, prev_b);
        let state_b = (prev_b, prev_a);
        let act_a = select_action(&tables[0], state_a, eps, &mut rng);
        let act_b = select_action(&tables[1], state_b, eps, &mut rng);
        let reward_a = profit[act_a][act_b];
        let reward_b = profit[act_b][act_a];
        let next_a = (act_a, act_b);
        let next_b = (act_b, act_a);
        let mut changed = false;
        q_update(&mut tables[0], state_a, act_a, reward_a, next_a, params);
        if refresh_greedy(&tables[0], &mut greedy[0], state_a) {
            changed = true;
        }
        q_update(&mut tables[1], state_b, act_b, reward_b, next_b, params);
        if refresh_greedy(&tables[1], &mut greedy[1], state_b) {
            changed = true;
        }
        stable = if changed { 0 } else { stable + 1 };
        prev_a = act_a;
        prev_b = act_b;
        t += 1;
        if stable >= cfg.stability_window {
            return Ok(PretrainOutcome {
                tables,
                periods: t,
                converged: true,
                final_actions: (prev_a, prev_b),
            });
        }
    }
    Ok(PretrainOutcome { tables, periods: t, converged: false, final_actions: (prev_a, prev_b) })
}

fn all_greedy(table: &QTable) -> Vec<usize> {
    let m = table.m();
    let mut out = Vec::with_capacity(m * m);
    for own in 0..m {
        for rival in 0..m {
            out.push(table.greedy((own, rival)));
        }
    }
    out
}

/// Re-derive the greedy action for one state; true if it moved.
fn refresh_greedy(table: &QTable, greedy: &mut [usize], state: QState) -> bool {
    let idx = state.0 * table.m() + state.1;
    let new = table.greedy(state);
    if greedy[idx] != new {
        greedy[idx] = new;
        true
    } else {
        false
    }
}

/// Greedy self-play price paths from a joint start state (no exploration,
/// no updates). Returns per-period (price_a, price_b).
pub fn greedy_selfplay(
    tables: &[QTable; 2],
    grid: &PriceGrid,
    start: (usize, usize),
    periods: usize,
) -> Vec<(f64, f64)> {
    let (mut a, mut b) = start;
    let mut out = Vec::with_capacity(periods);
    for _ in 0..periods {
        let next_a = tables[0].greedy((a, b));
        let next_b = tables[1].greedy((b, a));
        a = next_a;
        b = next_b;
        out.push((grid.price(a), grid.price(b)));
    }
    out
}

/// Deployment behavior of a pretrained learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QMode {
    /// Act greedily from the converged table; never update.
    Frozen,
    /// Keep epsilon-greedy exploration and value updates during play.
    Adaptive,
}

/// One action under the given mode; `t` drives the adaptive exploration
/// clock. Frozen mode consumes no randomness.
pub fn act<R: Rng>(
    table: &QTable,
    mode: QMode,
    state: QState,
    t: u64,
    params: &QParams,
    rng: &mut R,
) -> usize {
    match mode {
        QMode::Frozen => table.greedy(state),
        QMode::Adaptive => select_action(table, state, epsilon(t, params.beta), rng),
    }
}

// --- persistence -------------------------------------------------------

const MAGIC: &[u8; 4] = b"PLQT";
const VERSION: u16 = 1;

/// A pretraining artifact: parameters, provenance, and one table per seller.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFile {
    pub params: QParams,
    pub seed: u64,
    pub converged: bool,
    pub periods: u64,
    pub tables: Vec<QTable>,
}

impl TableFile {
    pub fn from_pretrain(params: &QParams, cfg: &PretrainConfig, outcome: &PretrainOutcome) -> Self {
        Self {
            params: params.clone(),
            seed: cfg.seed,
            converged: outcome.converged,
            periods: outcome.periods,
            tables: outcome.tables.to_vec(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), QError> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        let m = self.params.grid.len() as u32;
        buf.extend_from_slice(&m.to_le_bytes());
        for p in self.params.grid.points() {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        for v in [self.params.alpha, self.params.beta, self.params.delta] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf.extend_from_slice(&self.seed.to_le_bytes());
        buf.push(self.converged as u8);
        buf.extend_from_slice(&self.periods.to_le_bytes());
        buf.extend_from_slice(&(self.tables.len() as u32).to_le_bytes());
        for table in &self.tables {
            for v in table.values() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, QError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != &MAGIC[..] {
            return Err(QError::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes(cur.take(2)?.try_into().unwrap());
        if version != VERSION {
            return Err(QError::Format(format!("unsupported version {version}")));
        }
        let m = u32::from_le_bytes(cur.take(4)?.try_into().unwrap()) as usize;
        if !(2..=10_000).contains(&m) {
            return Err(QError::Format(format!("implausible grid size {m}")));
        }
        let mut points = Vec::with_capacity(m);
        for _ in 0..m {
            points.push(cur.f64()?);
        }
        let grid = PriceGrid::new(points).map_err(|e| QError::Format(e.to_string()))?;
        let alpha = cur.f64()?;
        let beta = cur.f64()?;
        let delta = cur.f64()?;
        let params = QParams::new(alpha, beta, delta, grid).map_err(|e| QError::Format(e.to_string()))?;
        let seed = u64::from_le_bytes(cur.take(8)?.try_into().unwrap());
        let converged = cur.take(1)?[0] != 0;
        let periods = u64::from_le_bytes(cur.take(8)?.try_into().unwrap());
        let count = u32::from_le_bytes(cur.take(4)?.try_into().unwrap()) as usize;
        if count > 64 {
            return Err(QError::Format(format!("implausible table count {count}")));
        }
        let mut tables = Vec::with_capacity(count);
        for _ in 0..count {
            let mut table = QTable::zeros(m);
            for own in 0..m {
                for rival in 0..m {
                    for action in 0..m {
                        let v = cur.f64()?;
                        if !v.is_finite() {
                            return Err(QError::Format("non-finite table entry".into()));
                        }
                        table.set((own, rival), action, v);
                    }
                }
            }
            tables.push(table);
        }
        if cur.pos != bytes.len() {
            return Err(QError::Format("trailing bytes".into()));
        }
        Ok(Self { params, seed, converged, periods, tables })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], QError> {
        if self.pos + n > self.bytes.len() {
            return Err(QError::Format("truncated file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn f64(&mut self) -> Result<f64, QError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

// --- engine-facing agent -------------------------------------------------

/// Where the adaptive exploration clock starts when a pretrained learner is
/// paired with a fresh opponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationClock {
    /// Decay restarts from zero at pairing onset (the default).
    Restart,
    /// Decay continues from the pretraining period count.
    Continue,
}

/// A pretrained tabular learner wired into the period loop.
///
/// Rival prices are snapped to the nearest grid point for state construction
/// only; the market always sees true prices.
pub struct QAgent {
    label: String,
    table: QTable,
    params: QParams,
    mode: QMode,
    rng: ChaCha8Rng,
    clock: u64,
    anchor: usize,
    pending: Option<(QState, usize)>,
}

impl QAgent {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        table: QTable,
        params: QParams,
        mode: QMode,
        clock: ExplorationClock,
        pretrain_periods: u64,
        anchor_price: f64,
        seed: u64,
    ) -> Self {
        let anchor = params.grid.nearest_index(anchor_price);
        Self {
            label: label.into(),
            table,
            params,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            clock: match clock {
                ExplorationClock::Restart => 0,
                ExplorationClock::Continue => pretrain_periods,
            },
            anchor,
            pending: None,
        }
    }

    pub fn table(&self) -> &QTable {
        &self.table
    }

    fn state_from(&self, view: &AgentView) -> QState {
        match view.history.last() {
            Some(last) => {
                let own = self.params.grid.nearest_index(last.own_price);
                let rival_price = last
                    .rival_prices
                    .as_ref()
                    .and_then(|r| r.first().copied())
                    .expect("Q agents require full information access");
                (own, self.params.grid.nearest_index(rival_price))
            }
            None => (self.anchor, self.anchor),
        }
    }
}

impl Agent for QAgent {
    fn label(&self) -> &str {
        &self.label
    }

    fn decide(&mut self, view: &AgentView) -> Result<Decision, AgentError> {
        let state = self.state_from(view);
        let action = act(&self.table, self.mode, state, self.clock, &self.params, &mut self.rng);
        if self.mode == QMode::Adaptive {
            self.clock += 1;
            self.pending = Some((state, action));
        }
        Ok(Decision::price(self.params.grid.price(action)))
    }

    fn observe(&mut self, period: &VisiblePeriod) {
        if self.mode != QMode::Adaptive {
            return;
        }
        let Some((state, action)) = self.pending.take() else {
            return;
        };
        let rival_price = period
            .rival_prices
            .as_ref()
            .and_then(|r| r.first().copied())
            .expect("Q agents require full information access");
        let next_state = (action, self.params.grid.nearest_index(rival_price));
        q_update(&mut self.table, state, action, period.own_profit, next_state, &self.params);
    }
}
