//! Sampling processes: DUFS and its special cases, plus the independent
//! random-walk baselines.
//!
//! Every run owns its [`ObservedGraph`], [`WalkerPool`], [`BudgetLedger`]
//! and RNG, and returns a [`SampleLog`]. Runs are deterministic given
//! `(graph, config, seed)`.
//!
//! Budget rules: each initial placement costs `c`; a random jump costs `c`
//! and a walk step costs 1, but only when it lands on a node not visited
//! before. A jump whose landing would overdraw the budget ends the run, so
//! `spent <= B` always holds. Because revisits are free, a run on a fully
//! explored region would never exhaust its budget; [`WalkConfig::step_limit`]
//! caps the number of moves.

mod observed;
mod pool;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeIndex, NodeRecord};

pub use observed::ObservedGraph;
pub use pool::WalkerPool;

/// Moves allowed per unit of budget when no explicit step limit is set.
pub const DEFAULT_STEPS_PER_BUDGET_UNIT: u64 = 100;

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::Config(format!(concat!("unknown ", stringify!($name), " '{}'"), other))),
                }
            }
        }
    };
}
pub(crate) use named_enum;

named_enum!(
    /// Whether a crawler can retrieve in-edges.
    Scenario { Visible => "visible", Invisible => "invisible" }
);

named_enum!(
    /// Distribution of initial walker locations.
    Placement { Uniform => "uniform", Proportional => "prop", Inverse => "inv" }
);

named_enum!(
    Method {
        Dufs => "dufs",
        Fs => "fs",
        Durw => "durw",
        SingleRw => "single-rw",
        MultiRw => "multi-rw",
        UniformNode => "uniform-node",
    }
);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    /// Total budget B.
    pub budget: u64,
    /// Average budget per walker b.
    pub per_walker_budget: u64,
    /// Cost c of one uniform node draw.
    pub uniform_cost: u64,
    /// Random jump weight w.
    pub jump_weight: f64,
    pub scenario: Scenario,
    pub placement: Placement,
    /// Maximum number of post-placement moves. Defaults to
    /// `DEFAULT_STEPS_PER_BUDGET_UNIT · B`.
    pub step_limit: Option<u64>,
}

impl WalkConfig {
    pub fn new(budget: u64, per_walker_budget: u64, uniform_cost: u64, jump_weight: f64) -> Self {
        WalkConfig {
            budget,
            per_walker_budget,
            uniform_cost,
            jump_weight,
            scenario: Scenario::Visible,
            placement: Placement::Uniform,
            step_limit: None,
        }
    }

    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_step_limit(mut self, limit: u64) -> Self {
        self.step_limit = Some(limit);
        self
    }

    /// n = ⌊B/(c+b)⌋.
    pub fn walker_count(&self) -> usize {
        let per = self.uniform_cost + self.per_walker_budget;
        if per == 0 {
            0
        } else {
            (self.budget / per) as usize
        }
    }

    pub fn effective_step_limit(&self) -> u64 {
        self.step_limit.unwrap_or_else(|| DEFAULT_STEPS_PER_BUDGET_UNIT.saturating_mul(self.budget).max(1000))
    }

    fn validate(&self) -> Result<()> {
        if self.uniform_cost < 1 {
            return Err(Error::Config("uniform cost c must be at least 1".into()));
        }
        if !(self.jump_weight >= 0.0) || !self.jump_weight.is_finite() {
            return Err(Error::Config(format!("jump weight {} must be finite and >= 0", self.jump_weight)));
        }
        let n = self.walker_count();
        if n == 0 {
            return Err(Error::Config(format!(
                "budget {} buys no walker at c = {} and b = {}",
                self.budget, self.uniform_cost, self.per_walker_budget
            )));
        }
        if (n as u64) * self.uniform_cost > self.budget {
            return Err(Error::Config("placements exceed the budget".into()));
        }
        Ok(())
    }
}

/// How a walk sample was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Step,
    Jump,
    /// Uniform jump taken because every walker sat on a degree-0 node with
    /// w = 0.
    ForcedJump,
}

impl MoveKind {
    pub fn code(&self) -> char {
        match self {
            MoveKind::Step => 'S',
            MoveKind::Jump => 'J',
            MoveKind::ForcedJump => 'F',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'S' => Some(MoveKind::Step),
            'J' => Some(MoveKind::Jump),
            'F' => Some(MoveKind::ForcedJump),
            _ => None,
        }
    }

    pub fn is_jump(&self) -> bool {
        !matches!(self, MoveKind::Step)
    }
}

impl WalkSample {
    pub fn is_weighted(&self) -> bool {
        self.bias > 0.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BudgetLedger {
    /// B.
    pub total: u64,
    /// c.
    pub uniform_cost: u64,
    /// i.
    pub spent: u64,
    pub placements: u64,
    /// Jumps (forced included) that landed on an unvisited node.
    pub charged_jumps: u64,
    pub free_jumps: u64,
    pub charged_steps: u64,
    pub free_steps: u64,
    pub forced_jumps: u64,
    pub step_limit_hit: bool,
}

impl BudgetLedger {
    pub fn new(total: u64, uniform_cost: u64) -> Self {
        BudgetLedger { total, uniform_cost, ..Default::default() }
    }

    pub fn remaining(&self) -> u64 {
        self.total.saturating_sub(self.spent)
    }

    pub fn is_exhausted(&self) -> bool {
        self.spent >= self.total
    }

    fn charge_placement(&mut self) {
        self.placements += 1;
        self.spent += self.uniform_cost;
    }

    fn cost_of(&self, kind: MoveKind, first_visit: bool) -> u64 {
        match (first_visit, kind) {
            (false, _) => 0,
            (true, MoveKind::Step) => 1,
            (true, _) => self.uniform_cost,
        }
    }

    fn charge_move(&mut self, kind: MoveKind, first_visit: bool) {
        self.spent += self.cost_of(kind, first_visit);
        if kind == MoveKind::ForcedJump {
            self.forced_jumps += 1;
        }
        match (kind.is_jump(), first_visit) {
            (true, true) => self.charged_jumps += 1,
            (true, false) => self.free_jumps += 1,
            (false, true) => self.charged_steps += 1,
            (false, false) => self.free_steps += 1,
        }
    }

    /// c·(placements + charged jumps) + charged steps.
    pub fn decomposition(&self) -> u64 {
        self.uniform_cost * (self.placements + self.charged_jumps) + self.charged_steps
    }

    /// Uniform node draws made by the run: placements plus every jump.
    pub fn uniform_draws(&self) -> u64 {
        self.placements + self.charged_jumps + self.free_jumps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitialSample {
    pub node: NodeIndex,
    /// Degree in the observed graph after placement.
    pub degree: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSample {
    pub node: NodeIndex,
    /// Frozen degree + w. Zero only for a forced jump (w = 0) that lands on
    /// a node with no observed edge; such samples have no sampling weight
    /// and every estimator skips them.
    pub bias: f64,
    pub walker: u32,
    pub kind: MoveKind,
}

/// Everything a run observed, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLog {
    pub method: Method,
    pub scenario: Scenario,
    pub placement: Placement,
    pub seed: u64,
    pub per_walker_budget: u64,
    pub jump_weight: f64,
    pub walker_count: usize,
    /// Whether the crawled graph carried node attributes.
    pub attributes_known: bool,
    /// Initial placements. Estimators only treat them as uniform node
    /// samples when `placement` is [`Placement::Uniform`].
    pub initial: Vec<InitialSample>,
    pub walk: Vec<WalkSample>,
    /// Labels of every visited node, captured at first visit.
    pub records: BTreeMap<NodeIndex, NodeRecord>,
    pub ledger: BudgetLedger,
}

impl SampleLog {
    pub fn uses_uniform_placement(&self) -> bool {
        self.placement == Placement::Uniform
    }

    pub fn record(&self, node: NodeIndex) -> Option<&NodeRecord> {
        self.records.get(&node)
    }

    /// Recounts the ledger from the sample sequence alone and checks the
    /// budget decomposition and `spent <= B`.
    pub fn audit(&self) -> Result<()> {
        let ledger = &self.ledger;
        let mut visited: BTreeSet<NodeIndex> = BTreeSet::new();
        for s in &self.initial {
            visited.insert(s.node);
        }
        let mut recount = BudgetLedger::new(ledger.total, ledger.uniform_cost);
        for _ in &self.initial {
            recount.charge_placement();
        }
        for s in &self.walk {
            let first = visited.insert(s.node);
            recount.charge_move(s.kind, first);
        }
        let fail = |what: &str| Err(Error::InvalidInput(format!("ledger audit failed: {what}")));
        if recount.spent != ledger.spent {
            return fail("recounted spend differs from the recorded spend");
        }
        if ledger.decomposition() != ledger.spent {
            return fail("spent != c·(placements + charged jumps) + charged steps");
        }
        if ledger.spent > ledger.total {
            return fail("spent exceeds the budget");
        }
        let counters = (recount.placements, recount.charged_jumps, recount.free_jumps, recount.charged_steps, recount.free_steps, recount.forced_jumps);
        let recorded = (ledger.placements, ledger.charged_jumps, ledger.free_jumps, ledger.charged_steps, ledger.free_steps, ledger.forced_jumps);
        if counters != recorded {
            return fail("per-kind counters differ from the sample sequence");
        }
        if self.walk.iter().any(|s| !(s.bias > 0.0) && !(s.bias == 0.0 && s.kind == MoveKind::ForcedJump)) {
            return fail("non-positive bias");
        }
        Ok(())
    }
}

/// Jump probability w/(w + deg) out of a node of the given degree. With
/// w = 0 there are no jumps.
pub fn jump_probability(jump_weight: f64, degree: u32) -> f64 {
    if jump_weight <= 0.0 {
        0.0
    } else {
        jump_weight / (jump_weight + degree as f64)
    }
}

/// Draws `n` initial locations (with replacement) and charges `c` for each.
pub fn place_walkers<R: Rng + ?Sized>(
    g: &DirectedGraph,
    n: usize,
    placement: Placement,
    ledger: &mut BudgetLedger,
    rng: &mut R,
) -> Result<Vec<NodeIndex>> {
    if n == 0 {
        return Err(Error::Config("at least one walker is required".into()));
    }
    if (n as u64).saturating_mul(ledger.uniform_cost) > ledger.remaining() {
        return Err(Error::Config(format!(
            "{n} placements at cost {} exceed the remaining budget {}",
            ledger.uniform_cost,
            ledger.remaining()
        )));
    }
    let count = g.node_count() as NodeIndex;
    let nodes: Vec<NodeIndex> = match placement {
        Placement::Uniform => (0..n).map(|_| rng.random_range(0..count)).collect(),
        Placement::Proportional | Placement::Inverse => {
            let mut acc = 0.0;
            let cumulative: Vec<f64> = (0..count)
                .map(|v| {
                    let d = g.degree(v) as f64;
                    acc += match placement {
                        Placement::Proportional => d,
                        _ if d > 0.0 => 1.0 / d,
                        _ => 0.0,
                    };
                    acc
                })
                .collect();
            if !(acc > 0.0) {
                return Err(Error::InvalidInput("graph has no positive placement weight".into()));
            }
            (0..n)
                .map(|_| {
                    let t = rng.random::<f64>() * acc;
                    let i = cumulative.partition_point(|&c| c <= t);
                    i.min(count as usize - 1) as NodeIndex
                })
                .collect()
        }
    };
    for _ in 0..n {
        ledger.charge_placement();
    }
    Ok(nodes)
}

fn new_log(g: &DirectedGraph, method: Method, cfg: &WalkConfig, seed: u64, walker_count: usize) -> SampleLog {
    SampleLog {
        method,
        scenario: cfg.scenario,
        placement: cfg.placement,
        seed,
        per_walker_budget: cfg.per_walker_budget,
        jump_weight: cfg.jump_weight,
        walker_count,
        attributes_known: g.has_attributes(),
        initial: Vec::new(),
        walk: Vec::new(),
        records: BTreeMap::new(),
        ledger: BudgetLedger::new(cfg.budget, cfg.uniform_cost),
    }
}

/// Directed Unbiased Frontier Sampling.
///
/// n = ⌊B/(c+b)⌋ walkers start on nodes drawn from `cfg.placement`. Each
/// move picks walker j with probability (w + deg(v_j))/(n·w + Σ deg), then
/// either jumps to a uniform node with probability w/(w + deg(v_j)) or
/// follows a uniform edge of the observed graph.
pub fn dufs_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    frontier_run(g, cfg, seed, Method::Dufs)
}

/// Frontier Sampling: DUFS with w = 0.
pub fn fs_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    let cfg = WalkConfig { jump_weight: 0.0, ..*cfg };
    frontier_run(g, &cfg, seed, Method::Fs)
}

/// Directed Unbiased Random Walk: DUFS with a single walker (b = B - c).
pub fn durw_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    if cfg.budget <= cfg.uniform_cost {
        return Err(Error::Config("DURW needs B > c".into()));
    }
    let cfg = WalkConfig { per_walker_budget: cfg.budget - cfg.uniform_cost, ..*cfg };
    frontier_run(g, &cfg, seed, Method::Durw)
}

/// Pure uniform node sampling: DUFS with b = 0.
pub fn uniform_node_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    let cfg = WalkConfig { per_walker_budget: 0, ..*cfg };
    frontier_run(g, &cfg, seed, Method::UniformNode)
}

fn frontier_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64, method: Method) -> Result<SampleLog> {
    cfg.validate()?;
    let n = cfg.walker_count();
    let w = cfg.jump_weight;
    let node_count = g.node_count() as NodeIndex;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = new_log(g, method, cfg, seed, n);

    let start = place_walkers(g, n, cfg.placement, &mut log.ledger, &mut rng)?;
    let mut observed = ObservedGraph::new(g, cfg.scenario);
    observed.visit_initial(&start);
    for &v in &start {
        log.records.entry(v).or_insert_with(|| g.node_record(v));
    }
    let degrees: Vec<u32> = start.iter().map(|&v| observed.degree(v)).collect();
    log.initial = start.iter().zip(&degrees).map(|(&node, &degree)| InitialSample { node, degree }).collect();
    let mut pool = WalkerPool::new(start, degrees, w);

    let limit = cfg.effective_step_limit();
    let mut moves = 0u64;
    while !log.ledger.is_exhausted() {
        if moves >= limit {
            log.ledger.step_limit_hit = true;
            break;
        }
        let total = pool.total_weight();
        let (walker, forced) = if total > 0.0 {
            (pool.select_at(rng.random::<f64>() * total), false)
        } else {
            (rng.random_range(0..n), true)
        };
        let here = pool.location(walker);
        let degree = observed.degree(here);
        let jump = forced || (w > 0.0 && rng.random::<f64>() < jump_probability(w, degree));
        let (next, kind) = if jump {
            let kind = if forced { MoveKind::ForcedJump } else { MoveKind::Jump };
            (rng.random_range(0..node_count), kind)
        } else {
            let nbrs = observed.neighbors(here);
            (nbrs[rng.random_range(0..nbrs.len())], MoveKind::Step)
        };
        let first = !observed.is_visited(next);
        if log.ledger.cost_of(kind, first) > log.ledger.remaining() {
            break;
        }
        log.ledger.charge_move(kind, first);
        if observed.visit(next) {
            log.records.insert(next, g.node_record(next));
        }
        let next_degree = observed.degree(next);
        log.walk.push(WalkSample { node: next, bias: next_degree as f64 + w, walker: walker as u32, kind });
        pool.relocate(walker, next, next_degree);
        moves += 1;
    }
    Ok(log)
}

/// One random walk without jumps on the symmetrized graph.
pub fn single_rw_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    if cfg.budget <= cfg.uniform_cost {
        return Err(Error::Config("SingleRW needs B > c".into()));
    }
    let cfg = WalkConfig { per_walker_budget: cfg.budget - cfg.uniform_cost, ..*cfg };
    independent_run(g, &cfg, seed, Method::SingleRw)
}

/// n = ⌊B/(c+b)⌋ independent walks without jumps, advanced round-robin.
/// Walker k draws from its own RNG stream, so its trajectory does not
/// depend on the schedule.
pub fn multi_rw_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    independent_run(g, cfg, seed, Method::MultiRw)
}

fn independent_run(g: &DirectedGraph, cfg: &WalkConfig, seed: u64, method: Method) -> Result<SampleLog> {
    let cfg = WalkConfig { jump_weight: 0.0, ..*cfg };
    cfg.validate()?;
    if cfg.scenario != Scenario::Visible {
        return Err(Error::Config(format!("{method} runs only with visible in-edges")));
    }
    let n = cfg.walker_count();
    let mut placement_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = new_log(g, method, &cfg, seed, n);
    let start = place_walkers(g, n, cfg.placement, &mut log.ledger, &mut placement_rng)?;
    let mut observed = ObservedGraph::new(g, cfg.scenario);
    observed.visit_initial(&start);
    for &v in &start {
        log.records.entry(v).or_insert_with(|| g.node_record(v));
    }
    log.initial = start.iter().map(|&node| InitialSample { node, degree: observed.degree(node) }).collect();
    if let Some(&node) = start.iter().find(|&&v| observed.degree(v) == 0) {
        return Err(Error::StuckWalker { node });
    }

    let mut streams: Vec<ChaCha8Rng> = (0..n)
        .map(|k| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k as u64 + 1);
            r
        })
        .collect();
    let mut locations = start;
    let limit = cfg.effective_step_limit();
    let mut moves = 0u64;
    'rounds: loop {
        for walker in 0..n {
            if log.ledger.is_exhausted() {
                break 'rounds;
            }
            if moves >= limit {
                log.ledger.step_limit_hit = true;
                break 'rounds;
            }
            let nbrs = observed.neighbors(locations[walker]);
            let next = nbrs[streams[walker].random_range(0..nbrs.len())];
            let first = !observed.is_visited(next);
            log.ledger.charge_move(MoveKind::Step, first);
            if observed.visit(next) {
                log.records.insert(next, g.node_record(next));
            }
            log.walk.push(WalkSample {
                node: next,
                bias: observed.degree(next) as f64,
                walker: walker as u32,
                kind: MoveKind::Step,
            });
            locations[walker] = next;
            moves += 1;
        }
    }
    Ok(log)
}

/// Dispatches to the sampler named by `method`.
pub fn run(method: Method, g: &DirectedGraph, cfg: &WalkConfig, seed: u64) -> Result<SampleLog> {
    match method {
        Method::Dufs => dufs_run(g, cfg, seed),
        Method::Fs => fs_run(g, cfg, seed),
        Method::Durw => durw_run(g, cfg, seed),
        Method::SingleRw => single_rw_run(g, cfg, seed),
        Method::MultiRw => multi_rw_run(g, cfg, seed),
        Method::UniformNode => uniform_node_run(g, cfg, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn clique(n: u64, offset: u64) -> Vec<(u64, u64)> {
        let mut e = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    e.push((u + offset, v + offset));
                }
            }
        }
        e
    }

    fn star() -> DirectedGraph {
        DirectedGraph::from_id_pairs(&[(0, 1), (0, 2), (0, 3), (0, 4)], true).unwrap()
    }

    #[test]
    fn single_node_placements() {
        let g = DirectedGraph::from_id_pairs(&[(0, 0)], false).unwrap();
        let mut ledger = BudgetLedger::new(10, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = place_walkers(&g, 3, Placement::Uniform, &mut ledger, &mut rng).unwrap();
        assert_eq!(l, vec![0, 0, 0]);
        assert_eq!(ledger.spent, 6);
        assert!(place_walkers(&g, 3, Placement::Uniform, &mut ledger, &mut rng).is_err());
    }

    fn center_frequency(placement: Placement) -> f64 {
        let g = star();
        let mut ledger = BudgetLedger::new(u64::MAX, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000;
        let l = place_walkers(&g, draws, placement, &mut ledger, &mut rng).unwrap();
        l.iter().filter(|&&v| v == 0).count() as f64 / draws as f64
    }

    #[test]
    fn proportional_and_inverse_placement() {
        let n = 100_000.0;
        let p = 4.0 / 8.0;
        let sigma = libm::sqrt(p * (1.0 - p) / n);
        assert!((center_frequency(Placement::Proportional) - p).abs() < 3.0 * sigma);
        let p = 0.25 / (0.25 + 4.0);
        let sigma = libm::sqrt(p * (1.0 - p) / n);
        assert!((center_frequency(Placement::Inverse) - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn jump_probabilities() {
        assert_eq!(jump_probability(2.0, 2), 0.5);
        assert_eq!(jump_probability(0.3, 0), 1.0);
        assert_eq!(jump_probability(0.0, 0), 0.0);
    }

    #[test]
    fn zero_degree_walker_always_jumps() {
        // 1 is a sink: in the invisible view it has no edge until 0 or 2 is
        // visited before it
        let g = DirectedGraph::from_id_pairs(&[(0, 1), (2, 1)], false).unwrap();
        let cfg = WalkConfig::new(200, 199, 1, 0.5).with_scenario(Scenario::Invisible).with_step_limit(500);
        for seed in 0..20 {
            let log = dufs_run(&g, &cfg, seed).unwrap();
            let mut degree = log.initial[0].degree;
            for s in &log.walk {
                if degree == 0 {
                    assert_eq!(s.kind, MoveKind::Jump);
                }
                degree = (s.bias - 0.5) as u32;
            }
            log.audit().unwrap();
        }
    }

    #[test]
    fn zero_per_walker_budget_is_uniform_node_sampling() {
        let g = DirectedGraph::from_id_pairs(&clique(6, 0), false).unwrap();
        let cfg = WalkConfig::new(12, 0, 2, 1.0);
        let log = dufs_run(&g, &cfg, 3).unwrap();
        assert_eq!(log.walker_count, 6);
        assert_eq!(log.initial.len(), 6);
        assert!(log.walk.is_empty());
        assert_eq!(log.ledger.spent, 12);
        let u = uniform_node_run(&g, &WalkConfig::new(12, 5, 2, 1.0), 3).unwrap();
        assert_eq!(u.initial, log.initial);
    }

    #[test]
    fn two_node_walk_alternates() {
        let g = DirectedGraph::from_id_pairs(&[(0, 1)], true).unwrap();
        let cfg = WalkConfig::new(10, 9, 1, 0.0).with_step_limit(20);
        let log = dufs_run(&g, &cfg, 5).unwrap();
        assert_eq!(log.walker_count, 1);
        assert_eq!(log.walk.len(), 20);
        let mut at = log.initial[0].node;
        for s in &log.walk {
            assert_ne!(s.node, at);
            at = s.node;
        }
        // both nodes cost something once, then revisits are free
        assert_eq!(log.ledger.spent, 2);
        assert!(log.ledger.step_limit_hit);
    }

    #[test]
    fn walker_count_conserved_and_biases_positive() {
        let mut pairs = clique(5, 0);
        pairs.extend(clique(7, 10));
        pairs.push((3, 12));
        let g = DirectedGraph::from_id_pairs(&pairs, false).unwrap();
        for scenario in Scenario::ALL {
            let cfg = WalkConfig::new(12, 2, 1, 0.5).with_scenario(*scenario);
            let log = dufs_run(&g, &cfg, 9).unwrap();
            assert_eq!(log.walker_count, 4);
            assert!(log.walk.iter().all(|s| (s.walker as usize) < 4 && s.bias > 0.0));
            assert!(log.ledger.spent <= 12);
            log.audit().unwrap();
        }
    }

    #[test]
    fn degree_freeze_holds_over_a_run() {
        let g = crate::powerlaw::generate_powerlaw_digraph(300, 2.0, 30, 4).unwrap();
        let cfg = WalkConfig::new(150, 10, 1, 1.0).with_scenario(Scenario::Invisible);
        let log = dufs_run(&g, &cfg, 2).unwrap();
        let mut first: BTreeMap<NodeIndex, f64> = BTreeMap::new();
        for s in &log.initial {
            first.insert(s.node, s.degree as f64 + 1.0);
        }
        for s in &log.walk {
            let b = *first.entry(s.node).or_insert(s.bias);
            assert_eq!(b, s.bias);
        }
    }

    #[test]
    fn visible_biases_are_true_degrees() {
        let g = crate::powerlaw::generate_powerlaw_digraph(200, 2.0, 20, 8).unwrap();
        let cfg = WalkConfig::new(60, 5, 1, 0.25);
        let log = dufs_run(&g, &cfg, 1).unwrap();
        for s in &log.walk {
            assert_eq!(s.bias, g.degree(s.node) as f64 + 0.25);
        }
    }

    #[test]
    fn single_rw_equals_multi_rw_with_one_walker() {
        let g = DirectedGraph::from_id_pairs(&clique(5, 0), false).unwrap();
        let cfg = WalkConfig::new(10, 9, 1, 0.0).with_step_limit(50);
        let a = single_rw_run(&g, &cfg, 4).unwrap();
        let b = multi_rw_run(&g, &cfg, 4).unwrap();
        assert_eq!(a.walk, b.walk);
        assert_eq!(a.initial, b.initial);
    }

    #[test]
    fn independent_walks_reject_invisible() {
        let g = DirectedGraph::from_id_pairs(&clique(3, 0), false).unwrap();
        let cfg = WalkConfig::new(10, 2, 1, 0.0).with_scenario(Scenario::Invisible);
        assert!(matches!(multi_rw_run(&g, &cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_configs() {
        let g = DirectedGraph::from_id_pairs(&clique(3, 0), false).unwrap();
        assert!(dufs_run(&g, &WalkConfig::new(3, 10, 1, 1.0), 0).is_err());
        assert!(dufs_run(&g, &WalkConfig::new(30, 1, 0, 1.0), 0).is_err());
        assert!(dufs_run(&g, &WalkConfig::new(30, 1, 1, -1.0), 0).is_err());
        assert!(durw_run(&g, &WalkConfig::new(1, 0, 1, 1.0), 0).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = crate::powerlaw::generate_powerlaw_digraph(200, 2.0, 20, 8).unwrap();
        for method in Method::ALL {
            let cfg = WalkConfig::new(40, 4, 2, 1.0);
            let a = run(*method, &g, &cfg, 77).unwrap();
            let b = run(*method, &g, &cfg, 77).unwrap();
            assert_eq!(a, b, "{method}");
        }
    }

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), *m);
        }
        assert!("nope".parse::<Scenario>().is_err());
        assert_eq!("inv".parse::<Placement>().unwrap(), Placement::Inverse);
    }
}
