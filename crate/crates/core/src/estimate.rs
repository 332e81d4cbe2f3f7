//! Node-label distribution estimators.
//!
//! Notation follows the sample counts kept in [`HybridSummary`]: `n_i`
//! uniform node samples and `m_i` walk samples with label `i`, and
//! `μ_i = Σ 1/bias` over those walk samples. `r_i = m_i/μ_i` is the
//! harmonic-mean bias of label `i` (0 when `m_i = 0`).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Label, LabelKind};
use crate::math;
use crate::walk::SampleLog;

/// Bias value as an exactly comparable key (positive floats order like
/// their bit patterns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiasKey(u64);

impl BiasKey {
    pub fn new(bias: f64) -> Self {
        BiasKey(bias.to_bits())
    }

    pub fn value(&self) -> f64 {
        f64::from_bits(self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelCounts {
    /// n_i.
    pub node_samples: u64,
    /// m_i.
    pub walk_samples: u64,
    /// μ_i.
    pub inv_bias: f64,
    /// m_{i,k} per distinct bias k.
    pub bias_counts: BTreeMap<BiasKey, u64>,
}

impl LabelCounts {
    pub fn observations(&self) -> u64 {
        self.node_samples + self.walk_samples
    }

    /// r_i = m_i/μ_i, or 0 without walk samples.
    pub fn mean_bias(&self) -> f64 {
        if self.walk_samples == 0 {
            0.0
        } else {
            self.walk_samples as f64 / self.inv_bias
        }
    }
}

/// Sufficient statistics of a sample log for the hybrid estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSummary {
    pub kind: LabelKind,
    pub labels: BTreeMap<Label, LabelCounts>,
    /// N: uniform node samples (0 unless placement was uniform).
    pub node_samples: u64,
    /// M: walk samples.
    pub walk_samples: u64,
    /// Σ 1/bias over every walk sample, labelled or not.
    pub inv_bias_total: f64,
    /// Z: largest bias seen.
    pub max_bias: f64,
}

impl HybridSummary {
    pub fn empty(kind: LabelKind) -> Self {
        HybridSummary {
            kind,
            labels: BTreeMap::new(),
            node_samples: 0,
            walk_samples: 0,
            inv_bias_total: 0.0,
            max_bias: 0.0,
        }
    }

    /// d̂ = M / Σ 1/bias, `None` without walk samples.
    pub fn mean_degree_hat(&self) -> Option<f64> {
        (self.walk_samples > 0).then(|| self.walk_samples as f64 / self.inv_bias_total)
    }

    pub fn counts(&self, label: &Label) -> Option<&LabelCounts> {
        self.labels.get(label)
    }

    /// Adds one uniform node sample carrying `labels`.
    pub fn add_node_sample(&mut self, labels: &[Label]) {
        self.node_samples += 1;
        for &l in labels {
            self.labels.entry(l).or_default().node_samples += 1;
        }
    }

    /// Adds one walk sample of the given bias carrying `labels`.
    pub fn add_walk_sample(&mut self, labels: &[Label], bias: f64) {
        self.walk_samples += 1;
        self.inv_bias_total += 1.0 / bias;
        if bias > self.max_bias {
            self.max_bias = bias;
        }
        for &l in labels {
            let c = self.labels.entry(l).or_default();
            c.walk_samples += 1;
            c.inv_bias += 1.0 / bias;
            *c.bias_counts.entry(BiasKey::new(bias)).or_insert(0) += 1;
        }
    }
}

/// Counts a log. Placements enter as node samples only when they were
/// drawn uniformly; walk samples without sampling weight are skipped.
pub fn summarize(log: &SampleLog, kind: LabelKind) -> Result<HybridSummary> {
    if kind.needs_attributes() && !log.attributes_known {
        return Err(Error::InvalidInput("attribute labels requested on a log without attributes".into()));
    }
    if log.initial.is_empty() && log.walk.is_empty() {
        return Err(Error::NoData("sample log is empty".into()));
    }
    let mut summary = HybridSummary::empty(kind);
    let mut labels = Vec::new();
    let labels_into = |node, labels: &mut Vec<Label>| -> Result<()> {
        let record = log
            .record(node)
            .ok_or_else(|| Error::InvalidInput(format!("sample log has no record for node {node}")))?;
        labels.clear();
        record.labels_into(kind, labels);
        Ok(())
    };
    if log.uses_uniform_placement() {
        for s in &log.initial {
            labels_into(s.node, &mut labels)?;
            summary.add_node_sample(&labels);
        }
    }
    for s in log.walk.iter().filter(|s| s.is_weighted()) {
        labels_into(s.node, &mut labels)?;
        summary.add_walk_sample(&labels, s.bias);
    }
    Ok(summary)
}

crate::walk::named_enum!(
    EstimatorId {
        Edge => "edge",
        Hybrid => "hybrid",
        HybridNoRule => "hybrid-norule",
        HybridMle => "hybrid-mle",
        HybridEm => "hybrid-em",
        Mvue => "mvue",
    }
);

impl EstimatorId {
    /// Whether the estimator uses placement samples.
    pub fn is_hybrid(&self) -> bool {
        !matches!(self, EstimatorId::Edge)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Warning {
    NotConverged,
    NoWalkSamples,
    NoNodeSamples,
    /// Variance-reduction rule skipped because M = 0.
    RuleSkipped,
}

impl Warning {
    pub fn as_str(&self) -> &'static str {
        match self {
            Warning::NotConverged => "not-converged",
            Warning::NoWalkSamples => "no-walk-samples",
            Warning::NoNodeSamples => "no-node-samples",
            Warning::RuleSkipped => "rule-skipped",
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub iterations: u64,
    /// ∞-norm of the final log-likelihood gradient.
    pub gradient_norm: Option<f64>,
    /// max_i |θ_i − (n_i+m_i)/(N + M r_i / Σ_s θ_s r_s)|.
    pub residual: Option<f64>,
    /// Labels zeroed by the variance-reduction rule.
    pub zeroed_labels: usize,
    pub converged: bool,
    /// Largest per-label difference between optimizer runs started from
    /// different points.
    pub multistart_spread: Option<f64>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mass: BTreeMap<Label, f64>,
    pub estimator: EstimatorId,
    pub diagnostics: Diagnostics,
}

impl Estimate {
    pub fn mass(&self, label: &Label) -> f64 {
        self.mass.get(label).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    fn closed_form(mass: BTreeMap<Label, f64>, estimator: EstimatorId) -> Self {
        Estimate { mass, estimator, diagnostics: Diagnostics { converged: true, ..Default::default() } }
    }
}

/// θ̂_ℓ = Σ 1{ℓ}/bias ÷ Σ 1/bias over the walk samples. Placements are
/// ignored.
pub fn edge_based_estimate(log: &SampleLog, kind: LabelKind) -> Result<Estimate> {
    edge_based_from_summary(&summarize(log, kind)?)
}

/// [`edge_based_estimate`] from counts: θ̂_ℓ = μ_ℓ / Σ 1/bias.
pub fn edge_based_from_summary(summary: &HybridSummary) -> Result<Estimate> {
    if summary.walk_samples == 0 {
        return Err(Error::NoData("edge-based estimator needs at least one walk sample".into()));
    }
    let mass = summary
        .labels
        .iter()
        .filter(|(_, c)| c.walk_samples > 0)
        .map(|(l, c)| (*l, c.inv_bias / summary.inv_bias_total))
        .collect();
    Ok(Estimate::closed_form(mass, EstimatorId::Edge))
}

/// θ̂_i = (n_i+m_i)/(N + M r_i/d̂), evaluated per label without
/// renormalization. Works for overlapping labels since d̂ is global.
pub fn hybrid_nonrecursive(summary: &HybridSummary) -> Result<Estimate> {
    let n = summary.node_samples as f64;
    let m = summary.walk_samples as f64;
    let mut diagnostics = Diagnostics { converged: true, ..Default::default() };
    let mass = match summary.mean_degree_hat() {
        Some(d_hat) => summary
            .labels
            .iter()
            .map(|(l, c)| (*l, c.observations() as f64 / (n + m * c.mean_bias() / d_hat)))
            .collect(),
        None => {
            if summary.node_samples == 0 {
                return Err(Error::NoData("no node or walk samples".into()));
            }
            diagnostics.warnings.push(Warning::NoWalkSamples);
            summary.labels.iter().map(|(l, c)| (*l, c.node_samples as f64 / n)).collect()
        }
    };
    Ok(Estimate { mass, estimator: EstimatorId::HybridNoRule, diagnostics })
}

/// Sets θ̂_i = 0 for every label without walk samples. Remaining masses
/// are left as they are. Skipped (with a warning) when the log has no walk
/// samples at all, since it would zero everything.
pub fn apply_variance_reduction(mut est: Estimate, summary: &HybridSummary) -> Estimate {
    if summary.walk_samples == 0 {
        est.diagnostics.warnings.push(Warning::RuleSkipped);
    } else {
        for (label, mass) in est.mass.iter_mut() {
            let m_i = summary.counts(label).map_or(0, |c| c.walk_samples);
            if m_i == 0 && *mass != 0.0 {
                *mass = 0.0;
                est.diagnostics.zeroed_labels += 1;
            }
        }
    }
    if est.estimator == EstimatorId::HybridNoRule {
        est.estimator = EstimatorId::Hybrid;
    }
    est
}

/// θ̄_i = (n_i+m_i)/(N + M i/d̄) for undirected-degree labels with the true
/// mean degree d̄.
pub fn mvue_degree_estimate(summary: &HybridSummary, mean_degree: f64) -> Result<Estimate> {
    if summary.kind != LabelKind::Degree {
        return Err(Error::Config("the known-mean-degree estimator needs undirected degree labels".into()));
    }
    if !(mean_degree > 0.0) {
        return Err(Error::InvalidInput(format!("mean degree {mean_degree} must be positive")));
    }
    if summary.node_samples + summary.walk_samples == 0 {
        return Err(Error::NoData("no node or walk samples".into()));
    }
    let n = summary.node_samples as f64;
    let m = summary.walk_samples as f64;
    let mass = summary
        .labels
        .iter()
        .map(|(l, c)| {
            let i = l.degree().unwrap_or(0) as f64;
            (*l, c.observations() as f64 / (n + m * i / mean_degree))
        })
        .collect();
    Ok(Estimate::closed_form(mass, EstimatorId::Mvue))
}

/// Log-likelihood of a partition label distribution given the counts, up
/// to an additive constant:
///
/// `Σ_i (n_i+m_i) ln θ_i − M ln Σ_s θ_s r_s`.
///
/// Labels are the ones with `n_i + m_i > 0`, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct Likelihood {
    labels: Vec<Label>,
    /// n_i + m_i.
    observations: Vec<f64>,
    /// r_i.
    mean_bias: Vec<f64>,
    node_samples: f64,
    walk_samples: f64,
}

impl Likelihood {
    pub fn new(summary: &HybridSummary) -> Self {
        let active: Vec<(&Label, &LabelCounts)> = summary.labels.iter().filter(|(_, c)| c.observations() > 0).collect();
        Likelihood {
            labels: active.iter().map(|(l, _)| **l).collect(),
            observations: active.iter().map(|(_, c)| c.observations() as f64).collect(),
            mean_bias: active.iter().map(|(_, c)| c.mean_bias()).collect(),
            node_samples: summary.node_samples as f64,
            walk_samples: active.iter().map(|(_, c)| c.walk_samples as f64).sum(),
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn weighted_bias(&self, theta: &[f64]) -> f64 {
        theta.iter().zip(&self.mean_bias).map(|(t, r)| t * r).sum()
    }

    pub fn value_theta(&self, theta: &[f64]) -> f64 {
        let mut value: f64 = self
            .observations
            .iter()
            .zip(theta)
            .map(|(&c, &t)| if c > 0.0 { c * math::ln(t) } else { 0.0 })
            .sum();
        if self.walk_samples > 0.0 {
            value -= self.walk_samples * math::ln(self.weighted_bias(theta));
        }
        value
    }

    pub fn value_beta(&self, beta: &[f64]) -> f64 {
        self.value_theta(&softmax(beta))
    }

    /// ∂/∂β_i = (n_i+m_i) − Nθ_i − M e^{β_i} r_i / Σ_s e^{β_s} r_s.
    pub fn gradient_beta(&self, beta: &[f64]) -> Vec<f64> {
        self.gradient_at(&softmax(beta))
    }

    fn gradient_at(&self, theta: &[f64]) -> Vec<f64> {
        let weighted = self.weighted_bias(theta);
        (0..self.len())
            .map(|i| {
                let walk = if self.walk_samples > 0.0 {
                    self.walk_samples * theta[i] * self.mean_bias[i] / weighted
                } else {
                    0.0
                };
                self.observations[i] - self.node_samples * theta[i] - walk
            })
            .collect()
    }

    /// The stationarity map θ ↦ (n_i+m_i)/(N + M r_i/Σ_s θ_s r_s).
    pub fn fixed_point_map(&self, theta: &[f64]) -> Vec<f64> {
        let weighted = self.weighted_bias(theta);
        (0..self.len())
            .map(|i| {
                let walk = if self.walk_samples > 0.0 {
                    self.walk_samples * self.mean_bias[i] / weighted
                } else {
                    0.0
                };
                self.observations[i] / (self.node_samples + walk)
            })
            .collect()
    }

    pub fn residual(&self, theta: &[f64]) -> f64 {
        self.fixed_point_map(theta).iter().zip(theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// θ_i = e^{β_i}/Σ e^{β_s}, shifted for stability.
pub fn softmax(beta: &[f64]) -> Vec<f64> {
    let top = beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = beta.iter().map(|b| math::exp(b - top)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    /// Stop when the gradient ∞-norm (gradient method) or the fixed-point
    /// residual (EM) falls below this.
    pub tol: f64,
    pub max_iter: u64,
    /// Label whose β stays at 1. Defaults to the last observed label.
    pub pin: Option<Label>,
    /// Also start from uniform θ and report the disagreement.
    pub multistart: bool,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions { tol: 1e-8, max_iter: 10_000, pin: None, multistart: true }
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: u32 = 60;

fn check_partition(summary: &HybridSummary) -> Result<Likelihood> {
    if !summary.kind.is_partition() {
        return Err(Error::Config("the likelihood estimators need single-label kinds".into()));
    }
    let lik = Likelihood::new(summary);
    if lik.is_empty() {
        return Err(Error::NoData("no node or walk samples".into()));
    }
    Ok(lik)
}

fn mle_estimate(lik: &Likelihood, theta: Vec<f64>, estimator: EstimatorId, mut diagnostics: Diagnostics) -> Estimate {
    diagnostics.residual = Some(lik.residual(&theta));
    if diagnostics.gradient_norm.is_none() {
        diagnostics.gradient_norm = Some(lik.gradient_at(&theta).iter().fold(0.0, |a: f64, g| a.max(g.abs())));
    }
    if !diagnostics.converged {
        diagnostics.warnings.push(Warning::NotConverged);
    }
    let mass = lik.labels.iter().copied().zip(theta).collect();
    Estimate { mass, estimator, diagnostics }
}

fn initial_theta(lik: &Likelihood) -> Vec<f64> {
    let total: f64 = lik.observations.iter().sum();
    lik.observations.iter().map(|c| c / total).collect()
}

/// Maximum-likelihood θ* by gradient ascent over β with one β pinned.
///
/// The log-likelihood is concave in β, so the gradient is preconditioned
/// by the inverse Hessian (a Newton step) and the step length comes from a
/// backtracking (halving, Armijo) line search.
pub fn hybrid_mle_gradient(summary: &HybridSummary, opts: &MleOptions) -> Result<Estimate> {
    let lik = check_partition(summary)?;
    let pin = match opts.pin {
        Some(label) => lik
            .labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| Error::InvalidInput(format!("pinned label {label:?} was never observed")))?,
        None => lik.len() - 1,
    };
    let start: Vec<f64> = initial_theta(&lik).iter().map(|t| math::ln(*t)).collect();
    let (theta, mut diagnostics) = gradient_ascent(&lik, start, pin, opts);
    if opts.multistart && lik.len() > 1 {
        let (other, _) = gradient_ascent(&lik, vec![0.0; lik.len()], pin, opts);
        diagnostics.multistart_spread = Some(theta.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok(mle_estimate(&lik, theta, EstimatorId::HybridMle, diagnostics))
}

fn gradient_ascent(lik: &Likelihood, mut beta: Vec<f64>, pin: usize, opts: &MleOptions) -> (Vec<f64>, Diagnostics) {
    let shift = 1.0 - beta[pin];
    beta.iter_mut().for_each(|b| *b += shift);
    let mut diagnostics = Diagnostics::default();
    let mut value = lik.value_beta(&beta);
    let mut step: f64 = 1.0;
    loop {
        let grad = lik.gradient_beta(&beta);
        let norm = grad.iter().fold(0.0, |a: f64, g| a.max(g.abs()));
        diagnostics.gradient_norm = Some(norm);
        if norm < opts.tol {
            diagnostics.converged = true;
            break;
        }
        if diagnostics.iterations >= opts.max_iter {
            break;
        }
        diagnostics.iterations += 1;
        let direction = newton_direction(lik, &beta, &grad, pin);
        let slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
        let mut t = (step * 2.0).min(1.0);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = beta.iter().zip(&direction).map(|(b, d)| b + t * d).collect();
            let v = lik.value_beta(&trial);
            if v >= value + ARMIJO * t * slope {
                accepted = Some((trial, v));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, v)) => {
                beta = trial;
                value = v;
                step = t;
            }
            None => {
                // the objective can no longer resolve an increase; the
                // gradient norm above is as small as floating point allows
                diagnostics.converged = norm < opts.tol.max(1e-6);
                break;
            }
        }
    }
    (softmax(&beta), diagnostics)
}

/// Solves (−H) d = g over the free coordinates, where the negative Hessian
/// of the log-likelihood in β is diag(Nθ + Mρ) − Nθθᵀ − Mρρᵀ with
/// ρ_i = θ_i r_i / Σ_s θ_s r_s. The rank-two part is inverted with the
/// Woodbury identity. Falls back to the diagonally scaled gradient if the
/// system is singular.
fn newton_direction(lik: &Likelihood, beta: &[f64], grad: &[f64], pin: usize) -> Vec<f64> {
    let theta = softmax(beta);
    let weighted = lik.weighted_bias(&theta);
    let rho: Vec<f64> = (0..lik.len())
        .map(|i| if weighted > 0.0 { theta[i] * lik.mean_bias[i] / weighted } else { 0.0 })
        .collect();
    let (n, m) = (lik.node_samples, lik.walk_samples);
    let diag: Vec<f64> = (0..lik.len()).map(|i| n * theta[i] + m * rho[i]).collect();
    let scaled = || (0..lik.len()).map(|i| if i == pin { 0.0 } else { grad[i] / lik.observations[i] }).collect();
    if (0..lik.len()).any(|i| i != pin && !(diag[i] > 0.0)) {
        return scaled();
    }
    let u = [theta.iter().map(|t| math::sqrt(n) * t).collect::<Vec<f64>>(), rho.iter().map(|r| math::sqrt(m) * r).collect()];
    let free = || (0..lik.len()).filter(|&i| i != pin);
    let y: Vec<f64> = (0..lik.len()).map(|i| if i == pin { 0.0 } else { grad[i] / diag[i] }).collect();
    let mut k = [[1.0, 0.0], [0.0, 1.0]];
    let mut z = [0.0; 2];
    for a in 0..2 {
        z[a] = free().map(|i| u[a][i] * y[i]).sum();
        for b in 0..2 {
            k[a][b] -= free().map(|i| u[a][i] * u[b][i] / diag[i]).sum::<f64>();
        }
    }
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    if !(det.abs() > 1e-14) {
        return scaled();
    }
    let s = [(k[1][1] * z[0] - k[0][1] * z[1]) / det, (k[0][0] * z[1] - k[1][0] * z[0]) / det];
    let d: Vec<f64> = (0..lik.len())
        .map(|i| if i == pin { 0.0 } else { y[i] + (u[0][i] * s[0] + u[1][i] * s[1]) / diag[i] })
        .collect();
    let ascent: f64 = d.iter().zip(grad).map(|(a, b)| a * b).sum();
    if ascent > 0.0 && d.iter().all(|x| x.is_finite()) {
        d
    } else {
        scaled()
    }
}

/// θ* by iterating θ_i ← (n_i+m_i)/(N + M r_i/Σ_s θ_s r_s) from
/// θ_i = (n_i+m_i)/(N+M).
pub fn hybrid_mle_em(summary: &HybridSummary, opts: &MleOptions) -> Result<Estimate> {
    let lik = check_partition(summary)?;
    let mut theta = initial_theta(&lik);
    let mut diagnostics = Diagnostics::default();
    let tol = opts.tol.min(1e-12);
    loop {
        let next = lik.fixed_point_map(&theta);
        let change = next.iter().zip(&theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        theta = next;
        diagnostics.iterations += 1;
        if change < tol {
            diagnostics.converged = true;
            break;
        }
        if diagnostics.iterations >= opts.max_iter.max(100_000) {
            break;
        }
    }
    if lik.node_samples == 0.0 {
        // without node samples the map only fixes θ up to scale
        let total: f64 = theta.iter().sum();
        theta.iter_mut().for_each(|t| *t /= total);
    }
    Ok(mle_estimate(&lik, theta, EstimatorId::HybridEm, diagnostics))
}

/// Runs the named estimator on a summary. `mean_degree` is required by
/// [`EstimatorId::Mvue`] only.
pub fn estimate(summary: &HybridSummary, id: EstimatorId, mean_degree: Option<f64>) -> Result<Estimate> {
    let mut est = match id {
        EstimatorId::Edge => edge_based_from_summary(summary),
        EstimatorId::Hybrid => hybrid_nonrecursive(summary).map(|e| apply_variance_reduction(e, summary)),
        EstimatorId::HybridNoRule => hybrid_nonrecursive(summary),
        EstimatorId::HybridMle => hybrid_mle_gradient(summary, &MleOptions::default()),
        EstimatorId::HybridEm => hybrid_mle_em(summary, &MleOptions::default()),
        EstimatorId::Mvue => {
            let d = mean_degree.ok_or_else(|| Error::Config("mvue needs the true mean degree".into()))?;
            mvue_degree_estimate(summary, d)
        }
    }?;
    if id.is_hybrid() && summary.node_samples == 0 {
        est.diagnostics.warnings.push(Warning::NoNodeSamples);
    }
    Ok(est)
}
