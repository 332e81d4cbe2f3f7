//! Truncated power-law degree model and a directed configuration-model
//! generator built on it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GroundTruth, Label, LabelKind, NodeIndex};
use crate::math;

/// Attempts allowed to repair one self-loop or duplicate pairing.
pub const REPAIR_ATTEMPTS: usize = 100;

/// θ_d = d^{-β}/Z for 1 ≤ d ≤ τ.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPowerLaw {
    pub exponent: f64,
    pub max_degree: u32,
    /// Normalizing constant Z = Σ_{d ≤ τ} d^{-β}.
    pub normalizer: f64,
    cdf: Vec<f64>,
}

impl TruncatedPowerLaw {
    pub fn new(exponent: f64, max_degree: u32) -> Result<Self> {
        if !(exponent >= 1.0) || max_degree == 0 {
            return Err(Error::InvalidInput(format!(
                "power law needs exponent >= 1 and max degree >= 1, got {exponent} and {max_degree}"
            )));
        }
        let weights: Vec<f64> = (1..=max_degree).map(|d| math::powf(d as f64, -exponent)).collect();
        let normalizer: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / normalizer;
                acc
            })
            .collect();
        *cdf.last_mut().expect("max_degree >= 1") = 1.0;
        Ok(TruncatedPowerLaw { exponent, max_degree, normalizer, cdf })
    }

    pub fn mass(&self, d: u32) -> f64 {
        if d == 0 || d > self.max_degree {
            0.0
        } else {
            math::powf(d as f64, -self.exponent) / self.normalizer
        }
    }

    pub fn cdf(&self, d: u32) -> f64 {
        match d {
            0 => 0.0,
            d if d >= self.max_degree => 1.0,
            d => self.cdf[d as usize - 1],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        (i.min(self.cdf.len() - 1) + 1) as u32
    }

    /// The model itself as a degree-labelled ground truth.
    pub fn ground_truth(&self) -> GroundTruth {
        let masses: BTreeMap<Label, f64> = (1..=self.max_degree).map(|d| (Label::Degree(d), self.mass(d))).collect();
        let mean = masses.iter().map(|(l, m)| l.degree().unwrap_or(0) as f64 * m).sum();
        GroundTruth {
            kind: LabelKind::Degree,
            masses,
            node_count: 0,
            support_fraction: 1.0,
            mean_undirected_degree: mean,
        }
    }
}

/// Directed configuration model with i.i.d. truncated power-law out- and
/// in-degrees. Stubs are paired at random; whichever side has surplus stubs
/// drops the surplus, and self-loops or duplicate pairs are repaired by
/// swapping the offending in-stub with a random other one. Nodes left with
/// no edge are removed. Original ids are the generator's node numbers.
pub fn generate_powerlaw_digraph(n: usize, exponent: f64, max_degree: u32, seed: u64) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidInput("power-law graph needs at least 2 nodes".into()));
    }
    let law = TruncatedPowerLaw::new(exponent, max_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out_degrees: Vec<u32> = (0..n).map(|_| law.sample(&mut rng)).collect();
    let in_degrees: Vec<u32> = (0..n).map(|_| law.sample(&mut rng)).collect();

    let stubs = |degrees: &[u32]| -> Vec<NodeIndex> {
        degrees.iter().enumerate().flat_map(|(v, &d)| core::iter::repeat(v as NodeIndex).take(d as usize)).collect()
    };
    let mut out_stubs = stubs(&out_degrees);
    let mut in_stubs = stubs(&in_degrees);
    out_stubs.shuffle(&mut rng);
    in_stubs.shuffle(&mut rng);
    let pairs = out_stubs.len().min(in_stubs.len());
    out_stubs.truncate(pairs);
    in_stubs.truncate(pairs);

    let mut edges: BTreeSet<(NodeIndex, NodeIndex)> = BTreeSet::new();
    for i in 0..pairs {
        let u = out_stubs[i];
        let mut attempts = 0;
        loop {
            let v = in_stubs[i];
            if u != v && !edges.contains(&(u, v)) {
                edges.insert((u, v));
                break;
            }
            attempts += 1;
            if attempts > REPAIR_ATTEMPTS {
                return Err(Error::Generation(format!(
                    "could not place stub of node {u} after {REPAIR_ATTEMPTS} repair attempts"
                )));
            }
            let j = rng.random_range(0..pairs);
            if j == i {
                continue;
            }
            if j > i {
                in_stubs.swap(i, j);
                continue;
            }
            // (uj, vj) is already placed; trade in-stubs if both new pairs are valid
            let (uj, vj) = (out_stubs[j], in_stubs[j]);
            let ok = uj != v && u != vj && (uj, v) != (u, vj) && !edges.contains(&(uj, v)) && !edges.contains(&(u, vj));
            if ok {
                edges.remove(&(uj, vj));
                edges.insert((uj, v));
                in_stubs.swap(i, j);
            }
        }
    }

    let pairs: Vec<(u64, u64)> = edges.into_iter().map(|(u, v)| (u as u64, v as u64)).collect();
    DirectedGraph::from_id_pairs(&pairs, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_masses_normalize() {
        let law = TruncatedPowerLaw::new(2.0, 100).unwrap();
        let total: f64 = (1..=100).map(|d| law.mass(d)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(law.cdf(100), 1.0);
        assert_eq!(law.mass(101), 0.0);
        let truth = law.ground_truth();
        let sum: f64 = truth.masses.values().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TruncatedPowerLaw::new(0.5, 10).is_err());
        assert!(TruncatedPowerLaw::new(2.0, 0).is_err());
        assert!(generate_powerlaw_digraph(1, 2.0, 10, 1).is_err());
    }

    #[test]
    fn cap_one_gives_unit_out_degrees() {
        let g = generate_powerlaw_digraph(10, 1.0, 1, 3).unwrap();
        assert_eq!(g.node_count(), 10);
        assert!((0..10).all(|v| g.out_degree(v) <= 1));
        assert!(g.edges().all(|(u, v)| u != v));
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate_powerlaw_digraph(300, 2.0, 30, 11).unwrap();
        let b = generate_powerlaw_digraph(300, 2.0, 30, 11).unwrap();
        assert_eq!(a, b);
        let c = generate_powerlaw_digraph(300, 2.0, 30, 12).unwrap();
        assert_ne!(a, c);
    }
}
