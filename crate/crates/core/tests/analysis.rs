use std::collections::BTreeMap;

use dufs_core::analysis::{
    analytic_edge_sampling_nrmse, analytic_node_sampling_nrmse, empirical_nrmse, fit_loglog_slope, nrmse_from_masses,
};
use dufs_core::estimate::{Diagnostics, Estimate, EstimatorId};
use dufs_core::powerlaw::TruncatedPowerLaw;
use dufs_core::{GroundTruth, Label, LabelKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn degree_truth(masses: &[f64]) -> GroundTruth {
    let total: f64 = masses.iter().sum();
    let masses: BTreeMap<Label, f64> =
        masses.iter().enumerate().map(|(i, m)| (Label::Degree(i as u32 + 1), m / total)).collect();
    let mean = masses.iter().map(|(l, m)| l.degree().unwrap() as f64 * m).sum();
    GroundTruth { kind: LabelKind::OutDegree, masses, node_count: 0, support_fraction: 1.0, mean_undirected_degree: mean }
}

#[test]
fn empirical_matches_node_sampling_formula() {
    let truth = degree_truth(&[0.5, 0.3, 0.15, 0.05]);
    let budget = 400;
    let cdf: Vec<(Label, f64)> = truth
        .masses
        .iter()
        .scan(0.0, |acc, (l, m)| {
            *acc += m;
            Some((*l, *acc))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let runs: Vec<Estimate> = (0..2000)
        .map(|_| {
            let mut mass: BTreeMap<Label, f64> = BTreeMap::new();
            for _ in 0..budget {
                let u: f64 = rng.random();
                let l = cdf.iter().find(|(_, c)| u < *c).map_or(cdf.last().unwrap().0, |(l, _)| *l);
                *mass.entry(l).or_default() += 1.0 / budget as f64;
            }
            Estimate { mass, estimator: EstimatorId::Edge, diagnostics: Diagnostics::default() }
        })
        .collect();
    let report = empirical_nrmse(&runs, &truth).unwrap();
    let analytic = analytic_node_sampling_nrmse(&truth, budget as f64).unwrap();
    for (l, v) in &analytic.per_label {
        let e = report.nrmse(l).unwrap();
        assert!((e / v - 1.0).abs() < 0.1, "{l:?}: {e} vs {v}");
    }
}

#[test]
fn power_law_slopes() {
    let law = TruncatedPowerLaw::new(2.5, 200).unwrap();
    let truth = law.ground_truth();
    let node = analytic_node_sampling_nrmse(&truth, 1e4).unwrap();
    let edge = analytic_edge_sampling_nrmse(&truth, 1e4).unwrap();
    // away from the saturated head the slopes approach β/2 and (β−1)/2
    let tail = |m: &BTreeMap<Label, f64>| m.iter().filter(|(l, _)| l.degree().unwrap() >= 20).map(|(l, v)| (*l, *v)).collect();
    assert!((fit_loglog_slope(&tail(&node.per_label)).unwrap() - 1.25).abs() < 0.05);
    assert!((fit_loglog_slope(&tail(&edge.per_label)).unwrap() - 0.75).abs() < 0.05);
}

#[test]
fn runs_can_be_permuted() {
    let truth = degree_truth(&[0.6, 0.4]);
    let a: BTreeMap<Label, f64> = [(Label::Degree(1), 0.7)].into_iter().collect();
    let b: BTreeMap<Label, f64> = [(Label::Degree(1), 0.5), (Label::Degree(2), 0.45)].into_iter().collect();
    let x = nrmse_from_masses(&[&a, &b], &truth).unwrap();
    let y = nrmse_from_masses(&[&b, &a], &truth).unwrap();
    assert_eq!(x.per_label, y.per_label);
}

proptest! {
    #[test]
    fn quadrupling_the_budget_halves_analytic_errors(weights in prop::collection::vec(0.01f64..1.0, 1..30), budget in 1.0f64..1e6) {
        let truth = degree_truth(&weights);
        for f in [analytic_node_sampling_nrmse, analytic_edge_sampling_nrmse] {
            let a = f(&truth, budget).unwrap();
            let b = f(&truth, 4.0 * budget).unwrap();
            for (l, v) in &a.per_label {
                prop_assert!((b.per_label[l] * 2.0 - v).abs() <= 1e-12 * v.max(1.0));
            }
        }
    }

    #[test]
    fn analytic_errors_decrease_with_mass(p in 0.001f64..0.5, q in 0.001f64..0.5, budget in 1.0f64..1e4) {
        prop_assume!(p < q);
        let node = |x: f64| ((1.0 / x - 1.0) / budget).sqrt();
        let truth = degree_truth(&[p, q, 1.0 - p - q]);
        let got = analytic_node_sampling_nrmse(&truth, budget).unwrap();
        prop_assert!(got.per_label[&Label::Degree(1)] > got.per_label[&Label::Degree(2)]);
        prop_assert!((got.per_label[&Label::Degree(1)] - node(p)).abs() < 1e-12);
    }
}
