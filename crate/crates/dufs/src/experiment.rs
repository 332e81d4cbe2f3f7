//! Replicated runs, parameter grids and DURW jump-weight matching.
//!
//! Run r of an experiment uses seed `base + r` and nothing else, so its
//! output does not depend on how runs are spread over worker threads.
//! Results are merged by run index.

use std::collections::BTreeMap;

use dufs_core::analysis::{
    analytic_edge_sampling_nrmse, analytic_node_sampling_nrmse, empirical_nrmse, top_decile_attribute_task, NrmseReport,
};
use dufs_core::estimate::{estimate, summarize, Estimate, EstimatorId, Warning};
use dufs_core::powerlaw::generate_powerlaw_digraph;
use dufs_core::walk::{self, BudgetLedger, Method, SampleLog, WalkConfig};
use dufs_core::{DirectedGraph, GroundTruth, Label, LabelKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CanonicalRun, GraphSection, RunSpec};
use crate::error::{CliError, Result};
use crate::io::{graph_hash, load_attributes, load_snap_edgelist, sha256_hex};
use crate::output::{
    estimates_table, key_value_table, nrmse_plotspec, nrmse_table, opt, LabelFormat, NrmseRow, OutputDir, Table,
};
use crate::samplelog::log_to_string;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Builds the graph a config describes. Returns the graph and how many
/// attribute entries named unknown nodes.
pub fn load_graph(section: &GraphSection) -> Result<(DirectedGraph, usize)> {
    section.validate()?;
    let mut g = match (&section.path, &section.generate) {
        (Some(path), _) => load_snap_edgelist(path, section.symmetrize)?,
        (None, Some(spec)) => {
            let g = generate_powerlaw_digraph(spec.nodes, spec.exponent, spec.max_degree, spec.seed)?;
            if section.symmetrize {
                let pairs: Vec<(u64, u64)> = g.edges().map(|(u, v)| (g.original_id(u), g.original_id(v))).collect();
                DirectedGraph::from_id_pairs(&pairs, true)?
            } else {
                g
            }
        }
        (None, None) => unreachable!("validated"),
    };
    if section.lcc {
        g = g.largest_scc();
    }
    let mut skipped = 0;
    if let Some(path) = &section.attributes {
        (g, skipped) = load_attributes(g, path)?;
    }
    Ok((g, skipped))
}

/// A rayon pool with `workers` threads; `None` or 0 means one per core.
pub fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

/// The config the sampler will actually run with, after method-specific
/// overrides.
pub fn effective_walk_config(method: Method, cfg: &WalkConfig) -> WalkConfig {
    match method {
        Method::Fs => WalkConfig { jump_weight: 0.0, ..*cfg },
        Method::Durw => WalkConfig { per_walker_budget: cfg.budget.saturating_sub(cfg.uniform_cost), ..*cfg },
        Method::UniformNode => WalkConfig { per_walker_budget: 0, ..*cfg },
        _ => *cfg,
    }
}

/// Everything fixed before the first run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub spec: RunSpec,
    pub walk: WalkConfig,
    pub kind: LabelKind,
    pub truth: GroundTruth,
    /// d̄ handed to the MVUE.
    pub mean_degree: Option<f64>,
}

impl Plan {
    /// Validates `spec` against `g`; every error here is raised before any
    /// run starts.
    pub fn new(g: &DirectedGraph, spec: &RunSpec) -> Result<Self> {
        spec.validate()?;
        spec.check_graph(g)?;
        let walk = spec.walk_config(g.node_count());
        let eff = effective_walk_config(spec.method, &walk);
        if spec.method == Method::Durw && walk.budget <= walk.uniform_cost {
            return Err(CliError::Config(format!("durw needs budget {} > c = {}", walk.budget, walk.uniform_cost)));
        }
        let n = eff.walker_count();
        if n == 0 || n as u64 * eff.uniform_cost > eff.budget {
            return Err(CliError::Config(format!(
                "budget {} buys no walker at c = {} and b = {}",
                eff.budget, eff.uniform_cost, eff.per_walker_budget
            )));
        }
        let kind = spec.label_kind(g)?;
        let truth = g.ground_truth(kind)?;
        let mean_degree = (spec.estimator == EstimatorId::Mvue).then_some(truth.mean_undirected_degree);
        Ok(Plan { spec: spec.clone(), walk, kind, truth, mean_degree })
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.spec.seed.wrapping_add(run as u64)
    }

    pub fn walker_count(&self) -> usize {
        effective_walk_config(self.spec.method, &self.walk).walker_count()
    }

    pub fn threshold(&self) -> Option<u32> {
        match self.kind {
            LabelKind::TopAttribute { threshold } => Some(threshold),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub estimate: Estimate,
    pub ledger: BudgetLedger,
    pub walk_samples: usize,
    pub log: Option<SampleLog>,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunResult, String>,
}

/// Estimates a recorded log.
pub fn estimate_log(log: &SampleLog, kind: LabelKind, estimator: EstimatorId, mean_degree: Option<f64>) -> Result<Estimate> {
    let summary = summarize(log, kind)?;
    Ok(estimate(&summary, estimator, mean_degree)?)
}

fn one_run(g: &DirectedGraph, plan: &Plan, index: usize, keep_log: bool) -> RunRecord {
    let seed = plan.seed(index);
    let outcome = walk::run(plan.spec.method, g, &plan.walk, seed)
        .map_err(CliError::from)
        .and_then(|log| {
            let estimate = estimate_log(&log, plan.kind, plan.spec.estimator, plan.mean_degree)?;
            Ok(RunResult {
                estimate,
                ledger: log.ledger.clone(),
                walk_samples: log.walk.len(),
                log: keep_log.then_some(log),
            })
        })
        .map_err(|e| e.to_string());
    RunRecord { index, seed, outcome }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub plan: Plan,
    pub runs: Vec<RunRecord>,
}

/// Runs every replication of `spec` on the pool. A failing run is kept as
/// a failure record; the others are unaffected.
pub fn run_experiment(g: &DirectedGraph, spec: &RunSpec, pool: &rayon::ThreadPool, keep_logs: bool) -> Result<Experiment> {
    let plan = Plan::new(g, spec)?;
    let runs: Vec<RunRecord> =
        pool.install(|| (0..spec.runs).into_par_iter().map(|r| one_run(g, &plan, r, keep_logs)).collect());
    Ok(Experiment { plan, runs })
}

impl Experiment {
    pub fn estimates(&self) -> Vec<Estimate> {
        self.runs.iter().filter_map(|r| r.outcome.as_ref().ok()).map(|r| r.estimate.clone()).collect()
    }

    pub fn failures(&self) -> Vec<Failure> {
        self.runs
            .iter()
            .filter_map(|r| {
                r.outcome.as_ref().err().map(|e| Failure { run: r.index, seed: r.seed, error: e.clone() })
            })
            .collect()
    }

    fn completed(&self) -> impl Iterator<Item = &RunResult> {
        self.runs.iter().filter_map(|r| r.outcome.as_ref().ok())
    }

    /// Uniform node samples a node-sampling baseline buys with the same
    /// budget.
    pub fn node_sampling_budget(&self) -> f64 {
        (self.plan.walk.budget as f64 / self.plan.walk.uniform_cost as f64).max(1.0)
    }

    /// Per-label NRMSE with closed-form baselines. For top-attribute labels
    /// errors are measured on masses conditional on the selected set.
    pub fn nrmse(&self) -> Result<(NrmseReport, Vec<NrmseRow>)> {
        let estimates = self.estimates();
        if estimates.is_empty() {
            return Err(CliError::Data("no run completed".into()));
        }
        let node_budget = self.node_sampling_budget();
        let (report, node, edge): (NrmseReport, BTreeMap<Label, f64>, BTreeMap<Label, f64>) =
            if let LabelKind::TopAttribute { .. } = self.plan.kind {
                let task = top_decile_attribute_task(&estimates, &self.plan.truth, node_budget)?;
                (task.report, task.baseline.per_label, BTreeMap::new())
            } else {
                let report = empirical_nrmse(&estimates, &self.plan.truth)?;
                let node = analytic_node_sampling_nrmse(&self.plan.truth, node_budget)?.per_label;
                let edge = if self.plan.kind.is_degree() {
                    analytic_edge_sampling_nrmse(&self.plan.truth, self.plan.walk.budget as f64)?.per_label
                } else {
                    BTreeMap::new()
                };
                (report, node, edge)
            };
        let rows = report
            .truth
            .iter()
            .map(|(l, &t)| NrmseRow {
                label: *l,
                truth: t,
                nrmse: report.nrmse(l),
                node_sampling: node.get(l).copied(),
                edge_sampling: edge.get(l).copied(),
            })
            .collect();
        Ok((report, rows))
    }

    fn mean_of(&self, f: impl Fn(&RunResult) -> f64) -> Option<f64> {
        let values: Vec<f64> = self.completed().map(f).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    pub fn mean_uniform_draws(&self) -> Option<f64> {
        self.mean_of(|r| r.ledger.uniform_draws() as f64)
    }

    fn summary_entries(&self, report: Option<&NrmseReport>) -> Vec<(&'static str, String)> {
        let completed = self.completed().count();
        let not_converged = self
            .completed()
            .filter(|r| r.estimate.diagnostics.warnings.contains(&Warning::NotConverged))
            .count();
        vec![
            ("runs", self.runs.len().to_string()),
            ("completed", completed.to_string()),
            ("failed", (self.runs.len() - completed).to_string()),
            ("budget", self.plan.walk.budget.to_string()),
            ("walkers", self.plan.walker_count().to_string()),
            ("mean_nrmse", opt(report.and_then(|r| r.mean()))),
            ("head_mean_nrmse", opt(report.and_then(|r| r.head_mean))),
            ("tail_mean_nrmse", opt(report.and_then(|r| r.tail_mean))),
            ("mean_spent", opt(self.mean_of(|r| r.ledger.spent as f64))),
            ("mean_uniform_draws", opt(self.mean_uniform_draws())),
            ("mean_walk_samples", opt(self.mean_of(|r| r.walk_samples as f64))),
            ("labels_without_truth", report.map_or(0, |r| r.excluded.len()).to_string()),
            ("not_converged", not_converged.to_string()),
        ]
    }

    fn manifest_run(&self, section: &GraphSection) -> ManifestRun {
        let config = self.plan.spec.canonical();
        ManifestRun {
            config_hash: config_hash(section, &config),
            config,
            budget: self.plan.walk.budget,
            walkers: self.plan.walker_count(),
            label_threshold: self.plan.threshold(),
            seeds: Seeds { base: self.plan.spec.seed, count: self.plan.spec.runs },
            failures: self.failures(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Failure {
    pub run: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Seeds {
    /// Run r used seed `base + r`.
    pub base: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestRun {
    pub config: CanonicalRun,
    pub config_hash: String,
    pub budget: u64,
    pub walkers: usize,
    pub label_threshold: Option<u32>,
    pub seeds: Seeds,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphInfo {
    pub source: GraphSection,
    pub hash: String,
    pub nodes: usize,
    pub edges: usize,
}

impl GraphInfo {
    pub fn new(section: &GraphSection, g: &DirectedGraph) -> Self {
        GraphInfo { source: section.clone(), hash: graph_hash(g), nodes: g.node_count(), edges: g.edge_count() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub graph: GraphInfo,
    pub runs: Vec<ManifestRun>,
    pub baseline: Option<String>,
    pub calibration: Option<Calibration>,
    /// sha256 of every file written next to the manifest.
    pub files: BTreeMap<String, String>,
}

pub fn config_hash(section: &GraphSection, run: &CanonicalRun) -> String {
    let json = serde_json::to_vec(&(section, run)).expect("config serializes");
    sha256_hex(&json)
}

fn csv(t: Table) -> Vec<u8> {
    t.into_bytes()
}

/// Writes estimates.csv, nrmse.csv, summary.csv, plotspec.json, the sample
/// logs when they were kept, and manifest.json.
pub fn write_experiment(exp: &Experiment, g: &DirectedGraph, section: &GraphSection, out: &mut OutputDir) -> Result<Manifest> {
    let fmt = LabelFormat::for_graph(exp.plan.kind, g);
    let completed: Vec<(usize, u64, &Estimate)> = exp
        .runs
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|res| (r.index, r.seed, &res.estimate)))
        .collect();
    out.write("estimates.csv", &csv(estimates_table(&completed, &fmt)))?;
    let nrmse = exp.nrmse();
    let report = nrmse.as_ref().ok().map(|(r, _)| r);
    if let Ok((report, rows)) = &nrmse {
        out.write("nrmse.csv", &csv(nrmse_table(rows, exp.plan.spec.estimator.as_str(), report.runs, &fmt)))?;
        let spec = nrmse_plotspec(
            "nrmse.csv",
            exp.plan.kind,
            &["nrmse", "node_sampling_nrmse", "edge_sampling_nrmse"],
            None,
        );
        out.write_json("plotspec.json", &spec)?;
    }
    out.write("summary.csv", &csv(key_value_table(&exp.summary_entries(report))))?;
    for r in &exp.runs {
        if let Ok(RunResult { log: Some(log), .. }) = &r.outcome {
            out.write(&format!("logs/run-{:05}.log", r.index), log_to_string(log, g.attribute_names()).as_bytes())?;
        }
    }
    let manifest = Manifest {
        tool: "dufs",
        version: VERSION,
        command: "run",
        graph: GraphInfo::new(section, g),
        runs: vec![exp.manifest_run(section)],
        baseline: None,
        calibration: None,
        files: out.files.clone(),
    };
    out.write_unlisted_json("manifest.json", &manifest)?;
    nrmse.map(|_| manifest)
}

/// Matches DURW's jump weight to a reference configuration's mean number
/// of uniform draws.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Calibration {
    pub reference: String,
    pub jump_weight: f64,
    pub target_draws: f64,
    pub achieved_draws: f64,
    pub iterations: usize,
    pub within_tolerance: bool,
}

pub const CALIBRATION_RUNS: usize = 200;
pub const CALIBRATION_TOLERANCE: f64 = 0.01;
pub const CALIBRATION_RANGE: (f64, f64) = (0.01, 100.0);

fn mean_uniform_draws(g: &DirectedGraph, method: Method, cfg: &WalkConfig, base: u64, runs: usize, pool: &rayon::ThreadPool) -> Result<f64> {
    let draws: Vec<u64> = pool.install(|| {
        (0..runs)
            .into_par_iter()
            .map(|r| walk::run(method, g, cfg, base.wrapping_add(r as u64)).map(|log| log.ledger.uniform_draws()))
            .collect::<dufs_core::Result<Vec<u64>>>()
    })?;
    Ok(draws.iter().sum::<u64>() as f64 / runs as f64)
}

/// Bisection in log w' over [0.01, 100] until DURW's mean uniform-draw
/// count is within 1% of the reference's. Both sides use the same seeds.
pub fn calibrate_durw_jump_weight(
    g: &DirectedGraph,
    reference: &RunSpec,
    runs: usize,
    pool: &rayon::ThreadPool,
) -> Result<Calibration> {
    let base = spec_walk(g, reference)?;
    let target = mean_uniform_draws(g, reference.method, &base, reference.seed, runs, pool)?;
    let draws = |w: f64| mean_uniform_draws(g, Method::Durw, &WalkConfig { jump_weight: w, ..base }, reference.seed, runs, pool);
    let close = |d: f64| (d / target - 1.0).abs() <= CALIBRATION_TOLERANCE;
    let (mut lo, mut hi) = CALIBRATION_RANGE;
    let done = |w: f64, d: f64, iterations: usize| Calibration {
        reference: reference.name.clone(),
        jump_weight: w,
        target_draws: target,
        achieved_draws: d,
        iterations,
        within_tolerance: close(d),
    };
    let d_lo = draws(lo)?;
    if d_lo >= target || close(d_lo) {
        return Ok(done(lo, d_lo, 1));
    }
    let d_hi = draws(hi)?;
    if d_hi <= target || close(d_hi) {
        return Ok(done(hi, d_hi, 2));
    }
    let mut best = if (d_lo - target).abs() < (d_hi - target).abs() { (lo, d_lo) } else { (hi, d_hi) };
    for iteration in 3..=64 {
        let mid = (lo * hi).sqrt();
        let d = draws(mid)?;
        if (d - target).abs() < (best.1 - target).abs() {
            best = (mid, d);
        }
        if close(d) {
            return Ok(done(mid, d, iteration));
        }
        if d < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(done(best.0, best.1, 64))
}

fn spec_walk(g: &DirectedGraph, spec: &RunSpec) -> Result<WalkConfig> {
    Ok(Plan::new(g, spec)?.walk)
}

/// The outcome of several configurations on one graph.
#[derive(Debug, Clone)]
pub struct Grid {
    pub experiments: Vec<Experiment>,
    pub baseline: usize,
    pub calibration: Option<Calibration>,
}

/// Runs each configuration. All must share the label kind; `baseline`
/// names the configuration ratios are taken against (default: the first).
pub fn run_grid(g: &DirectedGraph, specs: &[RunSpec], baseline: Option<&str>, pool: &rayon::ThreadPool) -> Result<Grid> {
    let first = specs.first().ok_or_else(|| CliError::Config("grid has no configurations".into()))?;
    let mut names = std::collections::BTreeSet::new();
    for s in specs {
        if s.label != first.label || s.top_fraction != first.top_fraction {
            return Err(CliError::Config(format!(
                "grid configurations must share the label kind: '{}' uses {}, '{}' uses {}",
                first.name, first.label, s.name, s.label
            )));
        }
        if !names.insert(s.name.as_str()) {
            return Err(CliError::Config(format!("duplicate configuration name '{}'", s.name)));
        }
    }
    let baseline = match baseline {
        None => 0,
        Some(name) => specs
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| CliError::Config(format!("baseline '{name}' is not a configuration name")))?,
    };
    for s in specs {
        Plan::new(g, s)?;
    }
    let experiments = specs.iter().map(|s| run_experiment(g, s, pool, false)).collect::<Result<Vec<_>>>()?;
    Ok(Grid { experiments, baseline, calibration: None })
}

/// Writes grid.csv (one row per label and configuration, with the ratio
/// to the baseline), grid_summary.csv, plotspec.json and manifest.json.
pub fn write_grid(grid: &Grid, g: &DirectedGraph, section: &GraphSection, out: &mut OutputDir) -> Result<Manifest> {
    let kind = grid.experiments[grid.baseline].plan.kind;
    let fmt = LabelFormat::for_graph(kind, g);
    let reports: Vec<Option<(NrmseReport, Vec<NrmseRow>)>> = grid.experiments.iter().map(|e| e.nrmse().ok()).collect();
    let baseline = reports[grid.baseline].as_ref().map(|(r, _)| r);

    let mut headers: Vec<&str> = fmt.headers().to_vec();
    headers.extend_from_slice(&["config", "truth", "nrmse", "ratio_to_baseline", "estimator", "runs"]);
    let mut table = Table::new(&headers);
    let labels: Vec<Label> = reports.iter().flatten().flat_map(|(r, _)| r.truth.keys().copied()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    for label in &labels {
        for (exp, report) in grid.experiments.iter().zip(&reports) {
            let Some((report, _)) = report else { continue };
            let Some(&truth) = report.truth.get(label) else { continue };
            let value = report.nrmse(label);
            let ratio = value.zip(baseline.and_then(|b| b.nrmse(label))).filter(|(_, b)| *b > 0.0).map(|(a, b)| a / b);
            let mut row = fmt.fields(label);
            row.extend([
                exp.plan.spec.name.clone(),
                truth.to_string(),
                opt(value),
                opt(ratio),
                exp.plan.spec.estimator.to_string(),
                report.runs.to_string(),
            ]);
            table.row(&row);
        }
    }
    out.write("grid.csv", &csv(table))?;

    let mut summary = Table::new(&[
        "config",
        "method",
        "estimator",
        "scenario",
        "w",
        "b",
        "c",
        "runs",
        "failed",
        "mean_nrmse",
        "head_mean_nrmse",
        "tail_mean_nrmse",
        "mean_uniform_draws",
    ]);
    for (exp, report) in grid.experiments.iter().zip(&reports) {
        let s = &exp.plan.spec;
        let r = report.as_ref().map(|(r, _)| r);
        summary.row(&[
            s.name.clone(),
            s.method.to_string(),
            s.estimator.to_string(),
            s.scenario.to_string(),
            s.w.to_string(),
            s.b.to_string(),
            s.c.to_string(),
            s.runs.to_string(),
            exp.failures().len().to_string(),
            opt(r.and_then(|r| r.mean())),
            opt(r.and_then(|r| r.head_mean)),
            opt(r.and_then(|r| r.tail_mean)),
            opt(exp.mean_uniform_draws()),
        ]);
    }
    out.write("grid_summary.csv", &csv(summary))?;
    out.write_json("plotspec.json", &nrmse_plotspec("grid.csv", kind, &["nrmse"], Some("config")))?;

    let manifest = Manifest {
        tool: "dufs",
        version: VERSION,
        command: "grid",
        graph: GraphInfo::new(section, g),
        runs: grid.experiments.iter().map(|e| e.manifest_run(section)).collect(),
        baseline: Some(grid.experiments[grid.baseline].plan.spec.name.clone()),
        calibration: grid.calibration.clone(),
        files: out.files.clone(),
    };
    out.write_unlisted_json("manifest.json", &manifest)?;
    Ok(manifest)
}

/// Closed-form node- and edge-sampling NRMSE per label.
pub fn analytic_rows(truth: &GroundTruth, budget: f64, uniform_cost: f64) -> Result<Vec<NrmseRow>> {
    let node = analytic_node_sampling_nrmse(truth, (budget / uniform_cost).max(1.0))?.per_label;
    let edge =
        if truth.kind.is_degree() { analytic_edge_sampling_nrmse(truth, budget)?.per_label } else { BTreeMap::new() };
    Ok(truth
        .masses
        .iter()
        .map(|(l, &t)| NrmseRow {
            label: *l,
            truth: t,
            nrmse: None,
            node_sampling: node.get(l).copied(),
            edge_sampling: edge.get(l).copied(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GenerateSpec, RunLayer};

    fn graph() -> (GraphSection, DirectedGraph) {
        let section = GraphSection {
            generate: Some(GenerateSpec { nodes: 300, exponent: 2.0, max_degree: 30, seed: 4 }),
            ..Default::default()
        };
        let (g, _) = load_graph(&section).unwrap();
        (section, g)
    }

    fn spec(layer: RunLayer) -> RunSpec {
        RunSpec::resolve(&[&RunLayer { runs: Some(12), seed: Some(9), ..layer }]).unwrap()
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let (_, g) = graph();
        let s = spec(RunLayer::default());
        let one = run_experiment(&g, &s, &worker_pool(Some(1)).unwrap(), false).unwrap();
        let four = run_experiment(&g, &s, &worker_pool(Some(4)).unwrap(), false).unwrap();
        assert_eq!(one.estimates(), four.estimates());
    }

    #[test]
    fn uniform_node_equals_dufs_without_walk_budget() {
        let (_, g) = graph();
        let pool = worker_pool(Some(2)).unwrap();
        let a = run_experiment(&g, &spec(RunLayer { method: Some("uniform-node".into()), ..Default::default() }), &pool, false).unwrap();
        let b = run_experiment(&g, &spec(RunLayer { b: Some(0), ..Default::default() }), &pool, false).unwrap();
        assert_eq!(a.estimates(), b.estimates());
    }

    #[test]
    fn identical_grid_entries_have_unit_ratios() {
        let (section, g) = graph();
        let pool = worker_pool(Some(2)).unwrap();
        let a = spec(RunLayer { name: Some("a".into()), ..Default::default() });
        let b = RunSpec { name: "b".into(), ..a.clone() };
        let grid = run_grid(&g, &[a, b], None, &pool).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        write_grid(&grid, &g, &section, &mut out).unwrap();
        let text = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
        let ratios: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
        assert!(!ratios.is_empty());
        assert!(ratios.iter().all(|r| *r == "1"), "{ratios:?}");
    }

    #[test]
    fn grid_rejects_mixed_label_kinds() {
        let (_, g) = graph();
        let a = spec(RunLayer { name: Some("a".into()), ..Default::default() });
        let b = RunSpec { name: "b".into(), label: crate::config::LabelChoice::InDegree, ..a.clone() };
        assert_eq!(run_grid(&g, &[a, b], None, &worker_pool(Some(1)).unwrap()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn calibration_matches_uniform_draws() {
        let (_, g) = graph();
        let reference = spec(RunLayer { w: Some(1.0), b: Some(10), ..Default::default() });
        let c = calibrate_durw_jump_weight(&g, &reference, 40, &worker_pool(None).unwrap()).unwrap();
        assert!(c.within_tolerance, "{c:?}");
        assert!(c.jump_weight > CALIBRATION_RANGE.0 && c.jump_weight < CALIBRATION_RANGE.1);
    }

    #[test]
    fn budget_that_buys_no_walker_fails_before_running() {
        let (_, g) = graph();
        let s = spec(RunLayer { budget: Some(5), b: Some(10), ..Default::default() });
        assert_eq!(run_experiment(&g, &s, &worker_pool(Some(1)).unwrap(), false).unwrap_err().exit_code(), 2);
    }
}
