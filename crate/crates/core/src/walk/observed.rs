use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::Scenario;
use crate::graph::{DirectedGraph, NodeIndex};

/// The crawler's undirected view G^(i) of the graph.
///
/// With visible in-edges the view is the symmetrized graph itself,
/// discovered lazily. With invisible in-edges a node's edge set is frozen
/// at its first visit: only out-edges towards unvisited nodes are added, so
/// no edge ever lands on an already visited endpoint.
#[derive(Debug, Clone)]
pub struct ObservedGraph<'g> {
    graph: &'g DirectedGraph,
    scenario: Scenario,
    visited: Vec<bool>,
    visited_count: usize,
    adjacency: Vec<Vec<NodeIndex>>,
}

impl<'g> ObservedGraph<'g> {
    pub fn new(graph: &'g DirectedGraph, scenario: Scenario) -> Self {
        let n = graph.node_count();
        let adjacency = match scenario {
            Scenario::Visible => Vec::new(),
            Scenario::Invisible => vec![Vec::new(); n],
        };
        ObservedGraph { graph, scenario, visited: vec![false; n], visited_count: 0, adjacency }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    #[inline]
    pub fn is_visited(&self, v: NodeIndex) -> bool {
        self.visited[v as usize]
    }

    pub fn visited_count(&self) -> usize {
        self.visited_count
    }

    /// Degree of `v` in the observed graph. Fixed once `v` is visited.
    #[inline]
    pub fn degree(&self, v: NodeIndex) -> u32 {
        match self.scenario {
            Scenario::Visible => self.graph.degree(v),
            Scenario::Invisible => self.adjacency[v as usize].len() as u32,
        }
    }

    #[inline]
    pub fn neighbors(&self, v: NodeIndex) -> &[NodeIndex] {
        match self.scenario {
            Scenario::Visible => self.graph.neighbors(v),
            Scenario::Invisible => &self.adjacency[v as usize],
        }
    }

    /// Registers an arrival at `v`. Returns `true` on a first visit.
    pub fn visit(&mut self, v: NodeIndex) -> bool {
        if self.visited[v as usize] {
            return false;
        }
        self.visited[v as usize] = true;
        self.visited_count += 1;
        if self.scenario == Scenario::Invisible {
            for &x in self.graph.out_neighbors(v) {
                if !self.visited[x as usize] {
                    self.adjacency[v as usize].push(x);
                    self.adjacency[x as usize].push(v);
                }
            }
        }
        true
    }

    /// Initial placement: every node in `nodes` joins S at once and E
    /// becomes the union of their out-edges (self-loops excluded).
    pub fn visit_initial(&mut self, nodes: &[NodeIndex]) {
        let mut batch: Vec<NodeIndex> = Vec::new();
        for &v in nodes {
            if !self.visited[v as usize] {
                self.visited[v as usize] = true;
                self.visited_count += 1;
                batch.push(v);
            }
        }
        if self.scenario == Scenario::Visible {
            return;
        }
        let mut inside: BTreeSet<(NodeIndex, NodeIndex)> = BTreeSet::new();
        let members: BTreeSet<NodeIndex> = batch.iter().copied().collect();
        for &v in &batch {
            for &x in self.graph.out_neighbors(v) {
                if x == v {
                    continue;
                }
                if members.contains(&x) && !inside.insert((v.min(x), v.max(x))) {
                    continue;
                }
                self.adjacency[v as usize].push(x);
                self.adjacency[x as usize].push(v);
            }
        }
    }
}
