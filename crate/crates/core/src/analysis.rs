//! Error measurement: empirical NRMSE over replications, closed-form NRMSE
//! of uniform node and edge sampling, joint-degree grids and the top-decile
//! attribute task.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::graph::{GroundTruth, Label, LabelKind};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct NrmseReport {
    /// NRMSE(ℓ) = sqrt(mean_r (θ̂_r,ℓ − θ_ℓ)²)/θ_ℓ for every label with
    /// θ_ℓ > 0.
    pub per_label: BTreeMap<Label, f64>,
    pub truth: BTreeMap<Label, f64>,
    pub runs: usize,
    /// Degree labels below the mean label degree.
    pub head: Vec<Label>,
    /// The largest 1% of distinct degree values (at least one).
    pub tail: Vec<Label>,
    pub head_mean: Option<f64>,
    pub tail_mean: Option<f64>,
    /// Labels some run estimated but whose true mass is 0.
    pub excluded: Vec<Label>,
}

impl NrmseReport {
    pub fn nrmse(&self, label: &Label) -> Option<f64> {
        self.per_label.get(label).copied()
    }

    pub fn mean(&self) -> Option<f64> {
        mean(self.per_label.values().copied())
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Head and tail label sets of a degree-kind truth; both empty otherwise.
pub fn head_tail(truth: &GroundTruth) -> (Vec<Label>, Vec<Label>) {
    let Some(mean) = truth.mean_label_degree() else {
        return (Vec::new(), Vec::new());
    };
    let head = truth.masses.keys().filter(|l| l.degree().is_some_and(|d| (d as f64) < mean)).copied().collect();
    // degree labels sort by degree
    let distinct: Vec<Label> = truth.masses.keys().copied().collect();
    let k = distinct.len();
    let take = (math::ceil(0.01 * k as f64) as usize).max(1).min(k);
    let tail = distinct[k - take..].to_vec();
    (head, tail)
}

/// NRMSE of each run's masses against the truth. Labels missing from a run
/// count as θ̂ = 0. Accepts a single run.
pub fn nrmse_from_masses(runs: &[&BTreeMap<Label, f64>], truth: &GroundTruth) -> Result<NrmseReport> {
    if runs.is_empty() {
        return Err(Error::NoData("NRMSE needs at least one run".into()));
    }
    let r = runs.len() as f64;
    let per_label: BTreeMap<Label, f64> = truth
        .masses
        .iter()
        .filter(|(_, &t)| t > 0.0)
        .map(|(l, &t)| {
            let sq: f64 = runs
                .iter()
                .map(|m| {
                    let e = m.get(l).copied().unwrap_or(0.0) - t;
                    e * e
                })
                .sum();
            (*l, math::sqrt(sq / r) / t)
        })
        .collect();
    let excluded: BTreeSet<Label> = runs
        .iter()
        .flat_map(|m| m.keys())
        .filter(|l| !per_label.contains_key(l))
        .copied()
        .collect();
    let (head, tail) = head_tail(truth);
    let head_mean = mean(head.iter().filter_map(|l| per_label.get(l).copied()));
    let tail_mean = mean(tail.iter().filter_map(|l| per_label.get(l).copied()));
    Ok(NrmseReport {
        truth: truth.masses.iter().filter(|(_, &t)| t > 0.0).map(|(l, t)| (*l, *t)).collect(),
        per_label,
        runs: runs.len(),
        head,
        tail,
        head_mean,
        tail_mean,
        excluded: excluded.into_iter().collect(),
    })
}

/// [`nrmse_from_masses`] over a list of estimates.
pub fn empirical_nrmse(estimates: &[Estimate], truth: &GroundTruth) -> Result<NrmseReport> {
    let runs: Vec<&BTreeMap<Label, f64>> = estimates.iter().map(|e| &e.mass).collect();
    nrmse_from_masses(&runs, truth)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingModel {
    Node,
    Edge,
}

impl SamplingModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplingModel::Node => "node-sampling",
            SamplingModel::Edge => "edge-sampling",
        }
    }
}

/// Power-law parameters fitted to a degree distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// β.
    pub exponent: f64,
    /// Z = Σ_{d ≤ τ} d^{-β}.
    pub normalizer: f64,
    /// τ.
    pub max_degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticNrmse {
    pub model: SamplingModel,
    pub budget: f64,
    pub per_label: BTreeMap<Label, f64>,
    pub powerlaw: Option<PowerLawFit>,
}

/// sqrt((1/p − 1)/B) for a Bernoulli(p) frequency over B samples.
pub fn bernoulli_nrmse(p: f64, budget: f64) -> f64 {
    math::sqrt((1.0 / p - 1.0) / budget)
}

fn check_budget(budget: f64) -> Result<()> {
    if budget >= 1.0 && budget.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("budget {budget} must be at least 1")))
    }
}

/// NRMSE of uniform node sampling with B samples: sqrt((1/θ_ℓ − 1)/B).
pub fn analytic_node_sampling_nrmse(truth: &GroundTruth, budget: f64) -> Result<AnalyticNrmse> {
    check_budget(budget)?;
    let per_label = truth.masses.iter().filter(|(_, &t)| t > 0.0).map(|(l, &t)| (*l, bernoulli_nrmse(t, budget))).collect();
    Ok(AnalyticNrmse { model: SamplingModel::Node, budget, per_label, powerlaw: fit_powerlaw(truth) })
}

/// NRMSE of uniform edge sampling, measured relative to the edge-sampling
/// probability π_d = dθ_d/Σ dθ: sqrt((1/π_d − 1)/B).
pub fn analytic_edge_sampling_nrmse(truth: &GroundTruth, budget: f64) -> Result<AnalyticNrmse> {
    check_budget(budget)?;
    let pi = truth
        .edge_sampling_masses()
        .ok_or_else(|| Error::Config("edge-sampling NRMSE needs a degree label kind".into()))?;
    let per_label = pi.iter().filter(|(_, &p)| p > 0.0).map(|(l, &p)| (*l, bernoulli_nrmse(p, budget))).collect();
    Ok(AnalyticNrmse { model: SamplingModel::Edge, budget, per_label, powerlaw: fit_powerlaw(truth) })
}

/// Least-squares slope of y against x.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::NoData("slope fit needs two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("slope fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}

/// Slope of ln value against ln degree over degree labels with positive
/// values.
pub fn fit_loglog_slope(values: &BTreeMap<Label, f64>) -> Result<f64> {
    let points: Vec<(f64, f64)> = values
        .iter()
        .filter_map(|(l, &v)| match l.degree() {
            Some(d) if d > 0 && v > 0.0 => Some((math::ln(d as f64), math::ln(v))),
            _ => None,
        })
        .collect();
    fit_slope(&points)
}

/// Fits θ_d ∝ d^{-β} by least squares in log-log space over degrees ≥ 1.
pub fn fit_powerlaw(truth: &GroundTruth) -> Option<PowerLawFit> {
    if !truth.kind.is_degree() {
        return None;
    }
    let slope = fit_loglog_slope(&truth.masses).ok()?;
    let max_degree = truth.masses.keys().filter_map(|l| l.degree()).max()?;
    let exponent = -slope;
    let normalizer = (1..=max_degree).map(|d| math::powf(d as f64, -exponent)).sum();
    Some(PowerLawFit { exponent, normalizer, max_degree })
}

/// NRMSE per (in-degree, out-degree) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGrid {
    pub cells: BTreeMap<(u32, u32), f64>,
    pub runs: usize,
}

pub fn joint_error_grid(estimates: &[Estimate], truth: &GroundTruth) -> Result<JointGrid> {
    if truth.kind != LabelKind::Joint {
        return Err(Error::Config("joint error grid needs joint-degree truth".into()));
    }
    let report = empirical_nrmse(estimates, truth)?;
    let cells = report
        .per_label
        .iter()
        .filter_map(|(l, &v)| match *l {
            Label::Joint { in_degree, out_degree } => Some(((in_degree, out_degree), v)),
            _ => None,
        })
        .collect();
    Ok(JointGrid { cells, runs: report.runs })
}

/// Cell-wise `numerator / denominator` over cells present in both grids
/// with a positive denominator.
pub fn ratio_grid(numerator: &JointGrid, denominator: &JointGrid) -> BTreeMap<(u32, u32), f64> {
    numerator
        .cells
        .iter()
        .filter_map(|(cell, &a)| {
            let b = *denominator.cells.get(cell)?;
            (b > 0.0).then(|| (*cell, a / b))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopDecileReport {
    pub threshold: u32,
    pub report: NrmseReport,
    /// Uniform node sampling with the expected number of samples that fall
    /// in the selected set, B·|selected|/|V|.
    pub baseline: AnalyticNrmse,
}

/// Turns estimates made with [`LabelKind::TopAttribute`] labels into
/// attribute masses conditional on the selected set,
/// θ̂_a/θ̂_selected, and scores them against the conditional truth.
pub fn top_decile_attribute_task(estimates: &[Estimate], truth: &GroundTruth, budget: f64) -> Result<TopDecileReport> {
    let LabelKind::TopAttribute { threshold } = truth.kind else {
        return Err(Error::Config("top-decile task needs top-attribute truth".into()));
    };
    if truth.support_fraction <= 0.0 {
        return Err(Error::InvalidInput("empty top-decile node set".into()));
    }
    let conditional: Vec<BTreeMap<Label, f64>> = estimates.iter().map(|e| conditional_masses(&e.mass)).collect();
    let runs: Vec<&BTreeMap<Label, f64>> = conditional.iter().collect();
    let report = nrmse_from_masses(&runs, truth)?;
    let baseline = analytic_node_sampling_nrmse(truth, (budget * truth.support_fraction).max(1.0))?;
    Ok(TopDecileReport { threshold, report, baseline })
}

/// θ̂_a/θ̂_selected for every attribute label; empty when the selected
/// set was estimated at 0.
pub fn conditional_masses(mass: &BTreeMap<Label, f64>) -> BTreeMap<Label, f64> {
    let selected = mass.get(&Label::Selected).copied().unwrap_or(0.0);
    if selected <= 0.0 {
        return BTreeMap::new();
    }
    mass.iter().filter(|(l, _)| **l != Label::Selected).map(|(l, &m)| (*l, m / selected)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{Diagnostics, EstimatorId};
    use alloc::vec;

    fn degree_truth(masses: &[(u32, f64)]) -> GroundTruth {
        let masses: BTreeMap<Label, f64> = masses.iter().map(|&(d, m)| (Label::Degree(d), m)).collect();
        let mean = masses.iter().map(|(l, m)| l.degree().unwrap() as f64 * m).sum();
        GroundTruth { kind: LabelKind::OutDegree, masses, node_count: 0, support_fraction: 1.0, mean_undirected_degree: mean }
    }

    fn est(masses: &[(Label, f64)]) -> Estimate {
        Estimate { mass: masses.iter().copied().collect(), estimator: EstimatorId::Hybrid, diagnostics: Diagnostics::default() }
    }

    #[test]
    fn nrmse_hand_value() {
        let truth = degree_truth(&[(1, 0.5), (2, 0.5)]);
        let runs = [est(&[(Label::Degree(1), 0.4)]), est(&[(Label::Degree(1), 0.6)])];
        let r = empirical_nrmse(&runs, &truth).unwrap();
        assert!((r.nrmse(&Label::Degree(1)).unwrap() - 0.2).abs() < 1e-12);
        // missing in both runs: full-mass error
        assert!((r.nrmse(&Label::Degree(2)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_runs_have_zero_error_and_exclusions_are_reported() {
        let truth = degree_truth(&[(1, 0.25), (3, 0.75)]);
        let exact = est(&[(Label::Degree(1), 0.25), (Label::Degree(3), 0.75), (Label::Degree(9), 0.0)]);
        let r = empirical_nrmse(&[exact.clone(), exact], &truth).unwrap();
        assert!(r.per_label.values().all(|&v| v == 0.0));
        assert_eq!(r.excluded, vec![Label::Degree(9)]);
        assert!(empirical_nrmse(&[], &truth).is_err());
    }

    #[test]
    fn head_and_tail() {
        let masses: Vec<(u32, f64)> = (1..=250).map(|d| (d, 1.0 / 250.0)).collect();
        let (head, tail) = head_tail(&degree_truth(&masses));
        // mean 125.5
        assert_eq!(head.len(), 125);
        assert_eq!(tail, vec![Label::Degree(248), Label::Degree(249), Label::Degree(250)]);
        let (_, tail) = head_tail(&degree_truth(&[(1, 0.5), (4, 0.5)]));
        assert_eq!(tail, vec![Label::Degree(4)]);
    }

    #[test]
    fn analytic_hand_values() {
        let truth = degree_truth(&[(2, 0.5), (4, 0.5)]);
        let node = analytic_node_sampling_nrmse(&truth, 100.0).unwrap();
        assert!((node.per_label[&Label::Degree(2)] - 0.1).abs() < 1e-15);
        let single = analytic_node_sampling_nrmse(&degree_truth(&[(3, 1.0)]), 10.0).unwrap();
        assert_eq!(single.per_label[&Label::Degree(3)], 0.0);
        assert!(analytic_node_sampling_nrmse(&truth, 0.5).is_err());
    }

    #[test]
    fn regular_truth_has_identical_models() {
        let truth = degree_truth(&[(2, 1.0)]);
        let mut t = truth.clone();
        t.masses.insert(Label::Degree(2), 0.5);
        let node = analytic_node_sampling_nrmse(&t, 100.0).unwrap();
        let edge = analytic_edge_sampling_nrmse(&truth, 100.0).unwrap();
        assert_eq!(edge.per_label[&Label::Degree(2)], 0.0);
        assert!((node.per_label[&Label::Degree(2)] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn node_beats_edge_below_mean_degree() {
        let law = crate::powerlaw::TruncatedPowerLaw::new(2.0, 50).unwrap();
        let truth = law.ground_truth();
        let mean = truth.mean_label_degree().unwrap();
        let node = analytic_node_sampling_nrmse(&truth, 1000.0).unwrap();
        let edge = analytic_edge_sampling_nrmse(&truth, 1000.0).unwrap();
        for (l, v) in &node.per_label {
            let d = l.degree().unwrap() as f64;
            assert_eq!(*v < edge.per_label[l], d < mean, "degree {d}");
        }
        let fit = node.powerlaw.unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9);
        assert_eq!(fit.max_degree, 50);
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        assert!((fit_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert!(fit_slope(&pts[..1]).is_err());
    }

    #[test]
    fn joint_grid_ratios() {
        let cell = Label::Joint { in_degree: 1, out_degree: 2 };
        let truth = GroundTruth {
            kind: LabelKind::Joint,
            masses: [(cell, 1.0)].into_iter().collect(),
            node_count: 1,
            support_fraction: 1.0,
            mean_undirected_degree: 3.0,
        };
        let runs = [est(&[(cell, 0.5)]), est(&[(cell, 1.5)])];
        let grid = joint_error_grid(&runs, &truth).unwrap();
        assert_eq!(grid.cells.len(), 1);
        assert!((grid.cells[&(1, 2)] - 0.5).abs() < 1e-12);
        let ratio = ratio_grid(&grid, &grid);
        assert_eq!(ratio[&(1, 2)], 1.0);
        assert!(joint_error_grid(&runs, &degree_truth(&[(1, 1.0)])).is_err());
    }

    #[test]
    fn conditional_attribute_masses() {
        let m: BTreeMap<Label, f64> = [(Label::Selected, 0.1), (Label::Attribute(0), 0.05)].into_iter().collect();
        let c = conditional_masses(&m);
        assert!((c[&Label::Attribute(0)] - 0.5).abs() < 1e-12);
        assert!(conditional_masses(&[(Label::Attribute(0), 0.05)].into_iter().collect()).is_empty());
    }
}
