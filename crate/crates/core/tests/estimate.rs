use std::collections::BTreeMap;

use dufs_core::estimate::{
    edge_based_from_summary, hybrid_mle_em, hybrid_mle_gradient, hybrid_nonrecursive, mvue_degree_estimate, summarize,
    HybridSummary, Likelihood, MleOptions,
};
use dufs_core::powerlaw::generate_powerlaw_digraph;
use dufs_core::walk::{dufs_run, Scenario, WalkConfig};
use dufs_core::{Label, LabelKind, NodeIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Raw counts: per label, node samples and walk samples per integer bias.
#[derive(Debug, Clone)]
struct Counts {
    n: Vec<u64>,
    m: Vec<BTreeMap<u32, u64>>,
}

impl Counts {
    fn summary(&self, kind: LabelKind) -> HybridSummary {
        let mut s = HybridSummary::empty(kind);
        for (i, (&n, m)) in self.n.iter().zip(&self.m).enumerate() {
            let label = [Label::Degree(i as u32 + 1)];
            for _ in 0..n {
                s.add_node_sample(&label);
            }
            for (&k, &count) in m {
                for _ in 0..count {
                    s.add_walk_sample(&label, k as f64);
                }
            }
        }
        s
    }

    fn random(rng: &mut ChaCha8Rng, labels: usize, max_bias: u32) -> Self {
        loop {
            let n: Vec<u64> = (0..labels).map(|_| rng.random_range(0..15)).collect();
            let m: Vec<BTreeMap<u32, u64>> = (0..labels)
                .map(|_| {
                    let mut per = BTreeMap::new();
                    for _ in 0..rng.random_range(0..4) {
                        *per.entry(rng.random_range(1..=max_bias)).or_insert(0) += rng.random_range(1..6);
                    }
                    per
                })
                .collect();
            let c = Counts { n, m };
            let every_label_seen = (0..labels).all(|i| c.n[i] + c.m[i].values().sum::<u64>() > 0);
            if every_label_seen && c.n.iter().sum::<u64>() > 0 && c.m.iter().flat_map(|x| x.values()).sum::<u64>() > 0 {
                return c;
            }
        }
    }

    /// Log-likelihood with the per-bias shares profiled out:
    /// Σ n_i ln θ_i + Σ_{i,k} m_{i,k} ln(θ_i (m_{i,k}/k)/μ_i · k) − M ln Σ_s θ_s m_s/μ_s.
    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        let mut value = 0.0;
        let mut denominator = 0.0;
        let mut total_m = 0.0;
        for i in 0..self.n.len() {
            if self.n[i] > 0 {
                value += self.n[i] as f64 * theta[i].ln();
            }
            let m_i: f64 = self.m[i].values().sum::<u64>() as f64;
            if m_i == 0.0 {
                continue;
            }
            let mu_i: f64 = self.m[i].iter().map(|(&k, &c)| c as f64 / k as f64).sum();
            for (&k, &c) in &self.m[i] {
                let share = (c as f64 / k as f64) / mu_i;
                value += c as f64 * (theta[i] * share * k as f64).ln();
            }
            denominator += theta[i] * m_i / mu_i;
            total_m += m_i;
        }
        value - total_m * denominator.ln()
    }
}

fn masses(est: &dufs_core::estimate::Estimate, labels: usize) -> Vec<f64> {
    (1..=labels as u32).map(|d| est.mass(&Label::Degree(d))).collect()
}

#[test]
fn two_label_mle_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases = vec![Counts { n: vec![3, 1], m: vec![BTreeMap::from([(2, 2)]), BTreeMap::from([(4, 1)])] }];
    cases.extend((0..4).map(|_| Counts::random(&mut rng, 2, 6)));
    for c in cases {
        let steps = 1_000_000;
        let best = (1..steps)
            .map(|k| k as f64 / steps as f64)
            .max_by(|a, b| c.log_likelihood(&[*a, 1.0 - a]).total_cmp(&c.log_likelihood(&[*b, 1.0 - b])))
            .unwrap();
        let est = hybrid_mle_gradient(&c.summary(LabelKind::OutDegree), &MleOptions::default()).unwrap();
        assert!((est.mass(&Label::Degree(1)) - best).abs() < 1e-4, "{c:?}: {} vs {best}", est.mass(&Label::Degree(1)));
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let labels = rng.random_range(2..=5);
        let c = Counts::random(&mut rng, labels, 6);
        let lik = Likelihood::new(&c.summary(LabelKind::OutDegree));
        let beta: Vec<f64> = (0..lik.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let softmax = |b: &[f64]| {
            let z: f64 = b.iter().map(|x| x.exp()).sum();
            b.iter().map(|x| x.exp() / z).collect::<Vec<f64>>()
        };
        let analytic = lik.gradient_beta(&beta);
        let h = 1e-5;
        for i in 0..lik.len() {
            let mut up = beta.clone();
            let mut down = beta.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (c.log_likelihood(&softmax(&up)) - c.log_likelihood(&softmax(&down))) / (2.0 * h);
            let scale = analytic[i].abs().max(1e-3);
            assert!((fd - analytic[i]).abs() / scale < 1e-5, "component {i}: {fd} vs {}", analytic[i]);
        }
    }
}

#[test]
fn gradient_and_em_agree_and_pinning_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let w = rng.random_range(2..=5);
        let c = Counts::random(&mut rng, w, 6);
        let s = c.summary(LabelKind::OutDegree);
        let grad = hybrid_mle_gradient(&s, &MleOptions::default()).unwrap();
        let em = hybrid_mle_em(&s, &MleOptions::default()).unwrap();
        let pinned_first = hybrid_mle_gradient(&s, &MleOptions { pin: Some(Label::Degree(1)), ..Default::default() }).unwrap();
        assert!(grad.diagnostics.converged && em.diagnostics.converged, "{:?} {:?}", grad.diagnostics, em.diagnostics);
        assert!(em.diagnostics.residual.unwrap() < 1e-10);
        assert!(grad.diagnostics.residual.unwrap() < 1e-8);
        assert!((grad.total() - 1.0).abs() < 1e-9);
        for (a, b) in masses(&grad, w).iter().zip(masses(&em, w)) {
            assert!((a - b).abs() < 1e-6, "{c:?}");
        }
        for (a, b) in masses(&grad, w).iter().zip(masses(&pinned_first, w)) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn nonrecursive_equals_known_degree_form_when_bias_is_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let labels = rng.random_range(1..8);
        let mut s = HybridSummary::empty(LabelKind::Degree);
        for d in 1..=labels {
            for _ in 0..rng.random_range(0..20) {
                s.add_node_sample(&[Label::Degree(d)]);
            }
            for _ in 0..rng.random_range(0..20) {
                s.add_walk_sample(&[Label::Degree(d)], d as f64);
            }
        }
        let Some(d_hat) = s.mean_degree_hat() else { continue };
        if s.node_samples == 0 {
            continue;
        }
        let a = hybrid_nonrecursive(&s).unwrap();
        let b = mvue_degree_estimate(&s, d_hat).unwrap();
        // with m_i = 0 the closed form falls back to n_i/N instead
        for (l, m) in a.mass.iter().filter(|(l, _)| s.counts(l).unwrap().walk_samples > 0) {
            let rel = (m - b.mass(l)).abs() / m.max(1e-300);
            assert!(rel < 1e-12, "{l:?}: {m} vs {}", b.mass(l));
        }
    }
}

#[test]
fn known_degree_estimator_depends_only_on_sufficient_statistics() {
    // same n_i + m_i, N, M; different split between node and walk samples
    // per label and different sample order
    let build = |node: &[(u32, u64)], walk: &[(u32, u64)], reverse: bool| {
        let mut events: Vec<(bool, u32)> = Vec::new();
        for &(d, k) in node {
            events.extend(std::iter::repeat((true, d)).take(k as usize));
        }
        for &(d, k) in walk {
            events.extend(std::iter::repeat((false, d)).take(k as usize));
        }
        if reverse {
            events.reverse();
        }
        let mut s = HybridSummary::empty(LabelKind::Degree);
        for (is_node, d) in events {
            if is_node {
                s.add_node_sample(&[Label::Degree(d)]);
            } else {
                s.add_walk_sample(&[Label::Degree(d)], d as f64);
            }
        }
        mvue_degree_estimate(&s, 2.5).unwrap()
    };
    let a = build(&[(1, 4), (2, 3), (3, 3)], &[(1, 2), (2, 5), (3, 3)], false);
    let b = build(&[(1, 1), (2, 6), (3, 3)], &[(1, 5), (2, 2), (3, 3)], true);
    assert_eq!(a.mass, b.mass);
}

#[test]
fn known_degree_estimator_is_unbiased_on_the_exact_model() {
    let theta = [0.4, 0.3, 0.2, 0.1];
    let d_bar: f64 = theta.iter().enumerate().map(|(i, t)| (i + 1) as f64 * t).sum();
    let (n, m) = (50u64, 50u64);
    let reps = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (i, &t) in theta.iter().enumerate() {
        let d = (i + 1) as f64;
        let node = Binomial::new(n, t).unwrap();
        let walk = Binomial::new(m, d * t / d_bar).unwrap();
        let draws: Vec<f64> = (0..reps)
            .map(|_| (node.sample(&mut rng) + walk.sample(&mut rng)) as f64 / (n as f64 + m as f64 * d / d_bar))
            .collect();
        let mean = draws.iter().sum::<f64>() / reps as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - t).abs() < 4.0 * se, "label {d}: {mean} vs {t}");
    }
}

#[test]
fn edge_estimator_is_scale_free_in_biases() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = Counts::random(&mut rng, 4, 6);
    let s = c.summary(LabelKind::OutDegree);
    let mut scaled = HybridSummary::empty(LabelKind::OutDegree);
    for (i, m) in c.m.iter().enumerate() {
        for (&k, &count) in m {
            for _ in 0..count {
                scaled.add_walk_sample(&[Label::Degree(i as u32 + 1)], 2.5 * k as f64);
            }
        }
    }
    let a = edge_based_from_summary(&s).unwrap();
    let b = edge_based_from_summary(&scaled).unwrap();
    for (l, m) in &a.mass {
        assert!((m - b.mass(l)).abs() < 1e-12);
    }
}

#[test]
fn summary_matches_a_second_pass_over_the_log() {
    let g = generate_powerlaw_digraph(300, 2.0, 30, 7).unwrap();
    let cfg = WalkConfig::new(200, 10, 1, 0.5).with_scenario(Scenario::Invisible);
    let log = dufs_run(&g, &cfg, 1).unwrap();
    let s = summarize(&log, LabelKind::OutDegree).unwrap();
    let mut n: BTreeMap<u32, u64> = BTreeMap::new();
    let mut m: BTreeMap<u32, (u64, f64)> = BTreeMap::new();
    for p in &log.initial {
        *n.entry(g.out_degree(p.node)).or_default() += 1;
    }
    for w in &log.walk {
        let e = m.entry(g.out_degree(w.node)).or_default();
        e.0 += 1;
        e.1 += 1.0 / w.bias;
    }
    assert_eq!(s.node_samples, log.initial.len() as u64);
    assert_eq!(s.walk_samples, log.walk.len() as u64);
    for (l, c) in &s.labels {
        let d = l.degree().unwrap();
        assert_eq!(c.node_samples, n.get(&d).copied().unwrap_or(0));
        let (count, inv) = m.get(&d).copied().unwrap_or((0, 0.0));
        assert_eq!(c.walk_samples, count);
        assert!((c.inv_bias - inv).abs() < 1e-12);
        assert_eq!(c.bias_counts.values().sum::<u64>(), count);
    }
}

#[test]
fn hybrid_error_shrinks_with_budget() {
    // exact model: half the budget on uniform nodes, half on
    // degree-proportional nodes with bias = degree
    let g = generate_powerlaw_digraph(200, 2.0, 20, 8).unwrap();
    let truth = g.ground_truth(LabelKind::Degree).unwrap();
    let nodes = g.node_count();
    let vol = g.volume() as f64;
    let mut cumulative = Vec::with_capacity(nodes);
    let mut acc = 0.0;
    for v in 0..nodes as NodeIndex {
        acc += g.degree(v) as f64 / vol;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut medians = Vec::new();
    for budget in [1_000u64, 10_000, 100_000] {
        let mut errors: Vec<f64> = (0..21)
            .map(|_| {
                let mut s = HybridSummary::empty(LabelKind::Degree);
                for _ in 0..budget / 2 {
                    let v = rng.random_range(0..nodes) as NodeIndex;
                    s.add_node_sample(&[Label::Degree(g.degree(v))]);
                    let u: f64 = rng.random();
                    let w = cumulative.partition_point(|&c| c <= u).min(nodes - 1) as NodeIndex;
                    s.add_walk_sample(&[Label::Degree(g.degree(w))], g.degree(w) as f64);
                }
                let est = hybrid_nonrecursive(&s).unwrap();
                truth.masses.iter().map(|(l, t)| (est.mass(l) - t).abs()).sum()
            })
            .collect();
        errors.sort_by(f64::total_cmp);
        medians.push(errors[10]);
    }
    assert!(medians[0] > medians[1] && medians[1] > medians[2], "{medians:?}");
}
