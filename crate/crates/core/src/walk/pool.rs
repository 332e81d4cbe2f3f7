use alloc::vec;
use alloc::vec::Vec;

use crate::graph::NodeIndex;

/// Walker locations L with selection weights w + deg(v).
///
/// Degrees live in a Fenwick tree of exact integers so a selection costs
/// O(log n) and moving one walker touches only its own entry.
#[derive(Debug, Clone)]
pub struct WalkerPool {
    locations: Vec<NodeIndex>,
    degrees: Vec<u32>,
    tree: Vec<u64>,
    degree_total: u64,
    jump_weight: f64,
}

impl WalkerPool {
    pub fn new(locations: Vec<NodeIndex>, degrees: Vec<u32>, jump_weight: f64) -> Self {
        assert_eq!(locations.len(), degrees.len());
        let n = locations.len();
        let mut pool = WalkerPool {
            locations,
            degrees: vec![0; n],
            tree: vec![0; n + 1],
            degree_total: 0,
            jump_weight,
        };
        for (i, d) in degrees.into_iter().enumerate() {
            pool.set_degree(i, d);
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[NodeIndex] {
        &self.locations
    }

    pub fn location(&self, walker: usize) -> NodeIndex {
        self.locations[walker]
    }

    pub fn degree(&self, walker: usize) -> u32 {
        self.degrees[walker]
    }

    pub fn jump_weight(&self) -> f64 {
        self.jump_weight
    }

    pub fn weight(&self, walker: usize) -> f64 {
        self.jump_weight + self.degrees[walker] as f64
    }

    /// n·w + Σ_j deg(v_j).
    pub fn total_weight(&self) -> f64 {
        self.len() as f64 * self.jump_weight + self.degree_total as f64
    }

    /// Replaces the walker's location (the walker count never changes).
    pub fn relocate(&mut self, walker: usize, node: NodeIndex, degree: u32) {
        self.locations[walker] = node;
        self.set_degree(walker, degree);
    }

    fn set_degree(&mut self, walker: usize, degree: u32) {
        let old = self.degrees[walker];
        self.degrees[walker] = degree;
        self.degree_total = self.degree_total - old as u64 + degree as u64;
        let mut i = walker + 1;
        while i < self.tree.len() {
            self.tree[i] = self.tree[i] - old as u64 + degree as u64;
            i += i & i.wrapping_neg();
        }
    }

    /// Walker whose cumulative weight interval contains `target`, for
    /// `target` in `[0, total_weight())`. Zero-weight walkers are never
    /// returned.
    pub fn select_at(&self, target: f64) -> usize {
        let n = self.len();
        let mut pos = 0usize;
        let mut rest = target;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n {
                let block = self.tree[next] as f64 + step as f64 * self.jump_weight;
                if block <= rest {
                    pos = next;
                    rest -= block;
                }
            }
            step >>= 1;
        }
        if pos < n && self.weight(pos) > 0.0 {
            return pos;
        }
        // rounding pushed us past the end; fall back to the last positive weight
        (0..n).rev().find(|&i| self.weight(i) > 0.0).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_follow_degrees_plus_jump_weight() {
        let pool = WalkerPool::new(vec![0, 1, 2], vec![2, 0, 5], 0.5);
        assert_eq!(pool.weight(0), 2.5);
        assert_eq!(pool.weight(1), 0.5);
        assert_eq!(pool.total_weight(), 8.5);
    }

    #[test]
    fn select_matches_linear_scan() {
        let degrees = vec![3, 0, 1, 7, 0, 2, 2, 9, 1];
        for &w in &[0.0, 0.25, 3.0] {
            let pool = WalkerPool::new((0..9).collect(), degrees.clone(), w);
            let total = pool.total_weight();
            for k in 0..1000 {
                let t = total * (k as f64 + 0.5) / 1000.0;
                let mut acc = 0.0;
                let expected = (0..9)
                    .find(|&i| {
                        acc += w + degrees[i] as f64;
                        acc > t
                    })
                    .unwrap();
                assert_eq!(pool.select_at(t), expected, "w={w} t={t}");
            }
        }
    }

    #[test]
    fn zero_weight_walkers_never_selected() {
        let pool = WalkerPool::new(vec![0, 1, 2], vec![0, 4, 0], 0.0);
        for k in 0..100 {
            assert_eq!(pool.select_at(4.0 * k as f64 / 100.0), 1);
        }
        assert_eq!(pool.select_at(4.0), 1);
    }

    #[test]
    fn relocate_updates_weights() {
        let mut pool = WalkerPool::new(vec![0, 1], vec![2, 2], 0.0);
        pool.relocate(0, 7, 6);
        assert_eq!(pool.locations(), &[7, 1]);
        assert_eq!(pool.total_weight(), 8.0);
        assert_eq!(pool.select_at(5.9), 0);
        assert_eq!(pool.select_at(6.0), 1);
        assert_eq!(pool.len(), 2);
    }
}
