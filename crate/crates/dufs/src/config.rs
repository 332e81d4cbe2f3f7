//! Experiment configuration.
//!
//! A config is a TOML file:
//!
//! ```toml
//! output = "results"
//! workers = 4
//!
//! [graph]
//! path = "soc-Epinions1.txt"   # or: generate = { nodes = 1000, exponent = 2.0, max_degree = 100, seed = 1 }
//! symmetrize = false
//! lcc = true
//! attributes = "labels.txt"
//!
//! [run]
//! method = "dufs"
//! estimator = "hybrid"
//! label = "out-degree"
//! w = 1.0
//! b = 10
//!
//! [[runs]]          # grid entries, each overriding [run]
//! name = "w10-b1"
//! w = 10.0
//! b = 1
//! ```
//!
//! Precedence, lowest first: built-in defaults, the preset named by
//! `preset`, `[run]`, a `[[runs]]` entry, command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dufs_core::estimate::EstimatorId;
use dufs_core::graph::degree_threshold_top_fraction;
use dufs_core::walk::{Method, Placement, Scenario, WalkConfig};
use dufs_core::{DirectedGraph, LabelKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_RUNS: usize = 200;
pub const DEFAULT_BUDGET_FRACTION: f64 = 0.1;
pub const DEFAULT_TOP_FRACTION: f64 = 0.1;

/// Label kinds selectable from a config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelChoice {
    OutDegree,
    InDegree,
    Degree,
    Joint,
    Attribute,
    /// Attributes of the top `top_fraction` nodes by degree.
    TopAttribute,
}

impl LabelChoice {
    pub const ALL: &'static [LabelChoice] = &[
        LabelChoice::OutDegree,
        LabelChoice::InDegree,
        LabelChoice::Degree,
        LabelChoice::Joint,
        LabelChoice::Attribute,
        LabelChoice::TopAttribute,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LabelChoice::OutDegree => "out-degree",
            LabelChoice::InDegree => "in-degree",
            LabelChoice::Degree => "degree",
            LabelChoice::Joint => "joint",
            LabelChoice::Attribute => "attribute",
            LabelChoice::TopAttribute => "top-attribute",
        }
    }

    pub fn is_degree(&self) -> bool {
        matches!(self, LabelChoice::OutDegree | LabelChoice::InDegree | LabelChoice::Degree)
    }

    pub fn needs_attributes(&self) -> bool {
        matches!(self, LabelChoice::Attribute | LabelChoice::TopAttribute)
    }
}

impl fmt::Display for LabelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        LabelChoice::ALL
            .iter()
            .find(|c| c.as_str() == s)
            .copied()
            .ok_or_else(|| CliError::Config(format!("unknown label kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub nodes: usize,
    pub exponent: f64,
    pub max_degree: u32,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub path: Option<PathBuf>,
    pub generate: Option<GenerateSpec>,
    #[serde(default)]
    pub symmetrize: bool,
    #[serde(default)]
    pub lcc: bool,
    pub attributes: Option<PathBuf>,
}

impl GraphSection {
    pub fn validate(&self) -> Result<()> {
        match (&self.path, &self.generate) {
            (Some(_), Some(_)) => Err(CliError::Config("graph: give either path or generate, not both".into())),
            (None, None) => Err(CliError::Config("graph: need a path or a generate spec".into())),
            (None, Some(g)) if g.nodes < 2 || !(g.exponent >= 1.0) || g.max_degree == 0 => {
                Err(CliError::Config("graph: generate needs nodes >= 2, exponent >= 1, max_degree >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Resolves relative paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        for p in [&mut self.path, &mut self.attributes].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

/// One layer of run settings; unset fields fall through to lower layers.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunLayer {
    pub name: Option<String>,
    pub preset: Option<String>,
    pub method: Option<String>,
    pub estimator: Option<String>,
    pub scenario: Option<String>,
    pub placement: Option<String>,
    pub label: Option<String>,
    pub budget_fraction: Option<f64>,
    pub budget: Option<u64>,
    pub b: Option<u64>,
    pub c: Option<u64>,
    pub w: Option<f64>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub step_limit: Option<u64>,
    pub top_fraction: Option<f64>,
}

impl RunLayer {
    /// `self` with every field set in `over` replaced.
    pub fn overlay(&self, over: &RunLayer) -> RunLayer {
        macro_rules! pick {
            ($($f:ident),*) => { RunLayer { $($f: over.$f.clone().or_else(|| self.$f.clone())),* } };
        }
        pick!(
            name, preset, method, estimator, scenario, placement, label, budget_fraction, budget, b, c, w, runs, seed,
            step_limit, top_fraction
        )
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub baseline: Option<String>,
    #[serde(default)]
    pub graph: GraphSection,
    #[serde(default)]
    pub run: RunLayer,
    #[serde(default)]
    pub runs: Vec<RunLayer>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config, resolving relative graph paths against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.graph.rebase(dir);
        }
        Ok(cfg)
    }
}

/// Walker parameters recommended for head or tail accuracy, by uniform
/// cost and in-edge visibility. Where several b values are listed as
/// equally good, the smallest is used.
pub fn preset(name: &str) -> Result<RunLayer> {
    let (w, b, c, scenario) = match name {
        "table2-head-c1-visible" => (10.0, 1, 1, Scenario::Visible),
        "table2-head-c1-invisible" => (10.0, 1, 1, Scenario::Invisible),
        "table2-head-c10-visible" => (1.0, 100, 10, Scenario::Visible),
        "table2-head-c10-invisible" => (10.0, 1, 10, Scenario::Invisible),
        "table2-tail-c1-visible" => (1.0, 10, 1, Scenario::Visible),
        "table2-tail-c1-invisible" => (1.0, 10, 1, Scenario::Invisible),
        "table2-tail-c10-visible" => (0.1, 1000, 10, Scenario::Visible),
        "table2-tail-c10-invisible" => (0.1, 10, 10, Scenario::Invisible),
        _ => return Err(CliError::Config(format!("unknown preset '{name}'"))),
    };
    Ok(RunLayer { w: Some(w), b: Some(b), c: Some(c), scenario: Some(scenario.as_str().into()), ..Default::default() })
}

pub const PRESETS: &[&str] = &[
    "table2-head-c1-visible",
    "table2-head-c1-invisible",
    "table2-head-c10-visible",
    "table2-head-c10-invisible",
    "table2-tail-c1-visible",
    "table2-tail-c1-invisible",
    "table2-tail-c10-visible",
    "table2-tail-c10-invisible",
];

/// A fully resolved and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub name: String,
    pub method: Method,
    pub estimator: EstimatorId,
    pub scenario: Scenario,
    pub placement: Placement,
    pub label: LabelChoice,
    pub budget_fraction: f64,
    /// Absolute budget; overrides `budget_fraction` when set.
    pub budget: Option<u64>,
    pub b: u64,
    pub c: u64,
    pub w: f64,
    pub runs: usize,
    pub seed: u64,
    pub step_limit: Option<u64>,
    pub top_fraction: f64,
}

fn parse_name<T: FromStr>(value: Option<&str>, default: T) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.map_or(Ok(default), |v| v.parse().map_err(|e: T::Err| CliError::Config(e.to_string())))
}

impl RunSpec {
    /// Applies the layers over the defaults and validates the result.
    pub fn resolve(layers: &[&RunLayer]) -> Result<Self> {
        let mut merged = RunLayer::default();
        for layer in layers {
            merged = merged.overlay(layer);
        }
        if let Some(p) = &merged.preset {
            let mut with_preset = preset(p)?;
            for layer in layers {
                with_preset = with_preset.overlay(layer);
            }
            merged = with_preset;
        }
        let m = merged;
        let spec = RunSpec {
            name: m.name.clone().unwrap_or_else(|| "run".into()),
            method: parse_name(m.method.as_deref(), Method::Dufs)?,
            estimator: parse_name(m.estimator.as_deref(), EstimatorId::Hybrid)?,
            scenario: parse_name(m.scenario.as_deref(), Scenario::Visible)?,
            placement: parse_name(m.placement.as_deref(), Placement::Uniform)?,
            label: parse_name(m.label.as_deref(), LabelChoice::OutDegree)?,
            budget_fraction: m.budget_fraction.unwrap_or(DEFAULT_BUDGET_FRACTION),
            budget: m.budget,
            b: m.b.unwrap_or(10),
            c: m.c.unwrap_or(1),
            w: m.w.unwrap_or(1.0),
            runs: m.runs.unwrap_or(DEFAULT_RUNS),
            seed: m.seed.unwrap_or(0),
            step_limit: m.step_limit,
            top_fraction: m.top_fraction.unwrap_or(DEFAULT_TOP_FRACTION),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parameter ranges and the method/estimator/label compatibility
    /// matrix. Checks that need the graph are in [`RunSpec::check_graph`].
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.c < 1 {
            return fail("c must be at least 1".into());
        }
        if !(self.w >= 0.0) || !self.w.is_finite() {
            return fail(format!("w = {} must be finite and >= 0", self.w));
        }
        if !(self.budget_fraction > 0.0 && self.budget_fraction <= 1.0) {
            return fail(format!("budget_fraction = {} must be in (0, 1]", self.budget_fraction));
        }
        if self.budget == Some(0) {
            return fail("budget must be positive".into());
        }
        if self.runs < 1 {
            return fail("runs must be at least 1".into());
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return fail(format!("top_fraction = {} must be in (0, 1]", self.top_fraction));
        }
        if self.scenario == Scenario::Invisible {
            if matches!(self.method, Method::SingleRw | Method::MultiRw) {
                return fail(format!("{} needs visible in-edges", self.method));
            }
            if !matches!(self.label, LabelChoice::OutDegree | LabelChoice::Attribute | LabelChoice::TopAttribute) {
                return fail(format!("label '{}' is not observable without visible in-edges", self.label));
            }
        }
        if self.estimator.is_hybrid() && self.placement != Placement::Uniform {
            return fail(format!("estimator {} needs uniform placement", self.estimator));
        }
        if self.method == Method::UniformNode && self.estimator == EstimatorId::Edge {
            return fail("uniform-node collects no walk samples for the edge estimator".into());
        }
        if self.estimator == EstimatorId::Mvue {
            if self.label != LabelChoice::Degree {
                return fail("mvue needs label = degree".into());
            }
            if self.scenario != Scenario::Visible {
                return fail("mvue needs visible in-edges".into());
            }
            let effective_w = if self.method == Method::Fs { 0.0 } else { self.w };
            if effective_w != 0.0 && !matches!(self.method, Method::SingleRw | Method::MultiRw) {
                return fail("mvue needs w = 0".into());
            }
        }
        Ok(())
    }

    pub fn check_graph(&self, g: &DirectedGraph) -> Result<()> {
        if self.label.needs_attributes() && !g.has_attributes() {
            return Err(CliError::Config(format!("label '{}' needs an attributes file", self.label)));
        }
        Ok(())
    }

    pub fn budget_for(&self, node_count: usize) -> u64 {
        self.budget.unwrap_or_else(|| ((self.budget_fraction * node_count as f64).round() as u64).max(1))
    }

    pub fn walk_config(&self, node_count: usize) -> WalkConfig {
        let mut cfg = WalkConfig::new(self.budget_for(node_count), self.b, self.c, self.w)
            .with_scenario(self.scenario)
            .with_placement(self.placement);
        cfg.step_limit = self.step_limit;
        cfg
    }

    pub fn label_kind(&self, g: &DirectedGraph) -> Result<LabelKind> {
        Ok(match self.label {
            LabelChoice::OutDegree => LabelKind::OutDegree,
            LabelChoice::InDegree => LabelKind::InDegree,
            LabelChoice::Degree => LabelKind::Degree,
            LabelChoice::Joint => LabelKind::Joint,
            LabelChoice::Attribute => LabelKind::Attribute,
            LabelChoice::TopAttribute => {
                LabelKind::TopAttribute { threshold: degree_threshold_top_fraction(g, self.top_fraction)? }
            }
        })
    }

    /// Everything that influences results, in a fixed field order.
    pub fn canonical(&self) -> CanonicalRun {
        CanonicalRun {
            name: self.name.clone(),
            method: self.method.as_str().into(),
            estimator: self.estimator.as_str().into(),
            scenario: self.scenario.as_str().into(),
            placement: self.placement.as_str().into(),
            label: self.label.as_str().into(),
            budget_fraction: self.budget_fraction,
            budget: self.budget,
            b: self.b,
            c: self.c,
            w: self.w,
            runs: self.runs,
            seed: self.seed,
            step_limit: self.step_limit,
            top_fraction: self.top_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalRun {
    pub name: String,
    pub method: String,
    pub estimator: String,
    pub scenario: String,
    pub placement: String,
    pub label: String,
    pub budget_fraction: f64,
    pub budget: Option<u64>,
    pub b: u64,
    pub c: u64,
    pub w: f64,
    pub runs: usize,
    pub seed: u64,
    pub step_limit: Option<u64>,
    pub top_fraction: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<RunSpec> {
        let f = ConfigFile::parse(text)?;
        RunSpec::resolve(&[&f.run])
    }

    #[test]
    fn defaults() {
        let s = resolve("").unwrap();
        assert_eq!((s.method, s.estimator, s.runs, s.budget_fraction), (Method::Dufs, EstimatorId::Hybrid, 200, 0.1));
        assert_eq!(s.walk_config(1000).budget, 100);
    }

    #[test]
    fn presets_expand_and_yield_to_explicit_values() {
        let s = resolve("[run]\npreset = \"table2-head-c1-visible\"\n").unwrap();
        assert_eq!((s.w, s.b, s.c, s.scenario), (10.0, 1, 1, Scenario::Visible));
        let s = resolve("[run]\npreset = \"table2-tail-c10-visible\"\nw = 3.0\n").unwrap();
        assert_eq!((s.w, s.b, s.c), (3.0, 1000, 10));
        for p in PRESETS {
            preset(p).unwrap();
        }
        assert!(resolve("[run]\npreset = \"nope\"\n").is_err());
    }

    #[test]
    fn later_layers_win() {
        let f = ConfigFile::parse("[run]\nw = 1.0\nb = 10\n[[runs]]\nw = 0.1\n[[runs]]\nb = 100\n").unwrap();
        let a = RunSpec::resolve(&[&f.run, &f.runs[0]]).unwrap();
        let b = RunSpec::resolve(&[&f.run, &f.runs[1]]).unwrap();
        assert_eq!((a.w, a.b), (0.1, 10));
        assert_eq!((b.w, b.b), (1.0, 100));
        let flags = RunLayer { w: Some(7.0), ..Default::default() };
        assert_eq!(RunSpec::resolve(&[&f.run, &f.runs[0], &flags]).unwrap().w, 7.0);
    }

    #[test]
    fn incompatible_combinations_are_config_errors() {
        for bad in [
            "[run]\nscenario = \"invisible\"\nlabel = \"in-degree\"\n",
            "[run]\nscenario = \"invisible\"\nmethod = \"multi-rw\"\n",
            "[run]\nplacement = \"prop\"\nestimator = \"hybrid\"\n",
            "[run]\nmethod = \"uniform-node\"\nestimator = \"edge\"\n",
            "[run]\nestimator = \"mvue\"\nlabel = \"out-degree\"\nw = 0.0\n",
            "[run]\nestimator = \"mvue\"\nlabel = \"degree\"\nw = 1.0\n",
            "[run]\nc = 0\n",
            "[run]\nw = -1.0\n",
            "[run]\nbudget_fraction = 1.5\n",
            "[run]\nruns = 0\n",
            "[run]\nmethod = \"teleport\"\n",
            "[run]\nunknown = 1\n",
        ] {
            let err = resolve(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
        resolve("[run]\nestimator = \"mvue\"\nlabel = \"degree\"\nw = 0.0\n").unwrap();
        resolve("[run]\nestimator = \"mvue\"\nlabel = \"degree\"\nmethod = \"fs\"\n").unwrap();
    }

    #[test]
    fn graph_section_needs_one_source() {
        assert!(ConfigFile::parse("").unwrap().graph.validate().is_err());
        let f = ConfigFile::parse("[graph]\ngenerate = { nodes = 10, exponent = 2.0, max_degree = 5 }\n").unwrap();
        f.graph.validate().unwrap();
        let f = ConfigFile::parse("[graph]\npath = \"x\"\ngenerate = { nodes = 10, exponent = 2.0, max_degree = 5 }\n")
            .unwrap();
        assert!(f.graph.validate().is_err());
    }
}
