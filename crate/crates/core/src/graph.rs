//! Ground-truth directed graphs.
//!
//! A [`DirectedGraph`] is built once and never mutated. Nodes are dense
//! indices `0..node_count()`; the original ids they were loaded from are
//! kept in a sorted remap table so results can be mapped back.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

pub type NodeIndex = u32;

/// A node label. Degree kinds share [`Label::Degree`]; which degree it is
/// depends on the [`LabelKind`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Degree(u32),
    Joint { in_degree: u32, out_degree: u32 },
    /// Interned attribute id, see [`DirectedGraph::attribute_name`].
    Attribute(u32),
    /// Marks membership in the node subset selected by
    /// [`LabelKind::TopAttribute`].
    Selected,
}

impl Label {
    /// Numeric degree carried by a [`Label::Degree`].
    pub fn degree(&self) -> Option<u32> {
        match *self {
            Label::Degree(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    OutDegree,
    InDegree,
    /// Degree in the symmetrized graph.
    Degree,
    Joint,
    Attribute,
    /// Attributes of nodes whose undirected degree is at least `threshold`,
    /// plus [`Label::Selected`] for every such node.
    TopAttribute { threshold: u32 },
}

impl LabelKind {
    /// Kinds where every node carries exactly one label.
    pub fn is_partition(&self) -> bool {
        matches!(
            self,
            LabelKind::OutDegree | LabelKind::InDegree | LabelKind::Degree | LabelKind::Joint
        )
    }

    pub fn is_degree(&self) -> bool {
        matches!(self, LabelKind::OutDegree | LabelKind::InDegree | LabelKind::Degree)
    }

    pub fn needs_attributes(&self) -> bool {
        matches!(self, LabelKind::Attribute | LabelKind::TopAttribute { .. })
    }
}

/// Everything a crawler learns about a node on its first visit. Cached so
/// that revisits never touch the graph again.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeRecord {
    pub out_degree: u32,
    pub in_degree: u32,
    pub degree: u32,
    pub attributes: Vec<u32>,
}

impl NodeRecord {
    /// Appends the labels of this node under `kind` to `out`.
    pub fn labels_into(&self, kind: LabelKind, out: &mut Vec<Label>) {
        match kind {
            LabelKind::OutDegree => out.push(Label::Degree(self.out_degree)),
            LabelKind::InDegree => out.push(Label::Degree(self.in_degree)),
            LabelKind::Degree => out.push(Label::Degree(self.degree)),
            LabelKind::Joint => out.push(Label::Joint {
                in_degree: self.in_degree,
                out_degree: self.out_degree,
            }),
            LabelKind::Attribute => out.extend(self.attributes.iter().map(|&a| Label::Attribute(a))),
            LabelKind::TopAttribute { threshold } => {
                if self.degree >= threshold {
                    out.push(Label::Selected);
                    out.extend(self.attributes.iter().map(|&a| Label::Attribute(a)));
                }
            }
        }
    }

    pub fn labels(&self, kind: LabelKind) -> Vec<Label> {
        let mut out = Vec::new();
        self.labels_into(kind, &mut out);
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeIndex>,
}

impl Csr {
    /// `lists` must already be sorted by source.
    fn from_sorted_pairs(node_count: usize, pairs: impl IntoIterator<Item = (NodeIndex, NodeIndex)>) -> Self {
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        let mut current = 0usize;
        for (src, dst) in pairs {
            while current < src as usize {
                offsets.push(targets.len());
                current += 1;
            }
            targets.push(dst);
        }
        while offsets.len() < node_count + 1 {
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    fn from_lists(lists: Vec<Vec<NodeIndex>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in lists {
            targets.extend(list);
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, v: NodeIndex) -> &[NodeIndex] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    original_ids: Vec<u64>,
    out: Csr,
    inc: Csr,
    und: Csr,
    attrs: Csr,
    attribute_names: Vec<String>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph from original-id pairs. Ids are remapped to dense
    /// indices in increasing original-id order; duplicate pairs collapse.
    pub fn from_id_pairs(pairs: &[(u64, u64)], symmetrize: bool) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("graph has no edges".into()));
        }
        let mut ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() > NodeIndex::MAX as usize {
            return Err(Error::InvalidInput("too many nodes".into()));
        }
        let index = |id: u64| ids.binary_search(&id).expect("id collected above") as NodeIndex;
        let mut edges = Vec::with_capacity(pairs.len() * if symmetrize { 2 } else { 1 });
        for &(u, v) in pairs {
            edges.push((index(u), index(v)));
            if symmetrize {
                edges.push((index(v), index(u)));
            }
        }
        Ok(Self::build(ids, edges, None))
    }

    /// Builds a graph over `0..node_count` with original ids equal to the
    /// indices. Every node must have at least one incident edge.
    pub fn from_indexed_edges(node_count: usize, edges: &[(NodeIndex, NodeIndex)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInput("graph has no nodes".into()));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u as usize >= node_count || v as usize >= node_count) {
            return Err(Error::InvalidInput(format!("edge ({u}, {v}) out of range")));
        }
        let graph = Self::build((0..node_count as u64).collect(), edges.to_vec(), None);
        if let Some(v) = (0..node_count as NodeIndex).find(|&v| graph.degree(v) == 0) {
            return Err(Error::InvalidInput(format!("node {v} has no incident edge")));
        }
        Ok(graph)
    }

    fn build(
        original_ids: Vec<u64>,
        mut edges: Vec<(NodeIndex, NodeIndex)>,
        attributes: Option<(Csr, Vec<String>)>,
    ) -> Self {
        let n = original_ids.len();
        edges.sort_unstable();
        edges.dedup();
        let edge_count = edges.len();

        let out = Csr::from_sorted_pairs(n, edges.iter().copied());
        let mut reversed: Vec<_> = edges.iter().map(|&(u, v)| (v, u)).collect();
        reversed.sort_unstable();
        let inc = Csr::from_sorted_pairs(n, reversed.iter().copied());

        let mut und: Vec<(NodeIndex, NodeIndex)> = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in &edges {
            und.push((u, v));
            if u != v {
                und.push((v, u));
            }
        }
        und.sort_unstable();
        und.dedup();
        let und = Csr::from_sorted_pairs(n, und);

        let (attrs, attribute_names) =
            attributes.unwrap_or_else(|| (Csr::from_sorted_pairs(n, core::iter::empty()), Vec::new()));
        DirectedGraph { original_ids, out, inc, und, attrs, attribute_names, edge_count }
    }

    /// Attaches attribute labels keyed by original node id. Names are
    /// interned so that id order is numeric names first (by value), then
    /// the rest lexicographically. Returns the graph and how many entries
    /// named unknown nodes (those are skipped).
    pub fn with_attributes(self, entries: &[(u64, Vec<String>)]) -> (Self, usize) {
        let names: BTreeSet<&str> = entries.iter().flat_map(|(_, l)| l.iter().map(String::as_str)).collect();
        let mut names: Vec<&str> = names.into_iter().collect();
        names.sort_by(|a, b| attribute_order(a, b));
        let mut lists: Vec<Vec<NodeIndex>> = (0..self.node_count()).map(|_| Vec::new()).collect();
        let mut skipped = 0;
        for (id, labels) in entries {
            match self.index_of(*id) {
                Some(v) => {
                    for l in labels {
                        let a = names.iter().position(|n| n == l).expect("interned") as u32;
                        lists[v as usize].push(a);
                    }
                }
                None => skipped += 1,
            }
        }
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
        }
        let names = names.into_iter().map(String::from).collect();
        let graph = DirectedGraph { attrs: Csr::from_lists(lists), attribute_names: names, ..self };
        (graph, skipped)
    }

    pub fn node_count(&self) -> usize {
        self.original_ids.len()
    }

    /// Number of distinct ordered pairs, |E_d|.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn original_id(&self, v: NodeIndex) -> u64 {
        self.original_ids[v as usize]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn index_of(&self, original: u64) -> Option<NodeIndex> {
        self.original_ids.binary_search(&original).ok().map(|i| i as NodeIndex)
    }

    #[inline]
    pub fn out_neighbors(&self, v: NodeIndex) -> &[NodeIndex] {
        self.out.row(v)
    }

    #[inline]
    pub fn in_neighbors(&self, v: NodeIndex) -> &[NodeIndex] {
        self.inc.row(v)
    }

    /// Neighbors in the symmetrized graph G; a self-loop appears once.
    #[inline]
    pub fn neighbors(&self, v: NodeIndex) -> &[NodeIndex] {
        self.und.row(v)
    }

    #[inline]
    pub fn out_degree(&self, v: NodeIndex) -> u32 {
        self.out.row(v).len() as u32
    }

    #[inline]
    pub fn in_degree(&self, v: NodeIndex) -> u32 {
        self.inc.row(v).len() as u32
    }

    /// Undirected degree deg(v) in the symmetrized graph.
    #[inline]
    pub fn degree(&self, v: NodeIndex) -> u32 {
        self.und.row(v).len() as u32
    }

    pub fn volume(&self) -> u64 {
        (0..self.node_count() as NodeIndex).map(|v| self.degree(v) as u64).sum()
    }

    pub fn attributes(&self, v: NodeIndex) -> &[u32] {
        self.attrs.row(v)
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn attribute_name(&self, id: u32) -> Option<&str> {
        self.attribute_names.get(id as usize).map(String::as_str)
    }

    pub fn has_attributes(&self) -> bool {
        !self.attribute_names.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.node_count() as NodeIndex)
            .all(|u| self.out_neighbors(u).iter().all(|&v| self.out_neighbors(v).binary_search(&u).is_ok()))
    }

    pub fn node_record(&self, v: NodeIndex) -> NodeRecord {
        NodeRecord {
            out_degree: self.out_degree(v),
            in_degree: self.in_degree(v),
            degree: self.degree(v),
            attributes: self.attributes(v).to_vec(),
        }
    }

    /// Iterates the ordered pairs of E_d as dense indices.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIndex, NodeIndex)> + '_ {
        (0..self.node_count() as NodeIndex).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Induced subgraph on the largest strongly connected component. Ties
    /// between equally large components go to the one holding the smallest
    /// original id.
    pub fn largest_scc(&self) -> DirectedGraph {
        let components = strongly_connected_components(self);
        let best = components
            .iter()
            .max_by(|a, b| {
                a.len().cmp(&b.len()).then_with(|| {
                    let min_a = a.iter().map(|&v| self.original_id(v)).min();
                    let min_b = b.iter().map(|&v| self.original_id(v)).min();
                    // smaller minimum id wins, so it must compare as greater
                    min_b.cmp(&min_a)
                })
            })
            .expect("graph has at least one node");
        let mut members = best.clone();
        members.sort_unstable();
        self.induced_subgraph(&members)
    }

    /// `members` sorted ascending.
    fn induced_subgraph(&self, members: &[NodeIndex]) -> DirectedGraph {
        let mut new_index = alloc::vec![NodeIndex::MAX; self.node_count()];
        for (i, &v) in members.iter().enumerate() {
            new_index[v as usize] = i as NodeIndex;
        }
        let mut edges = Vec::new();
        for &u in members {
            for &v in self.out_neighbors(u) {
                if new_index[v as usize] != NodeIndex::MAX {
                    edges.push((new_index[u as usize], new_index[v as usize]));
                }
            }
        }
        let ids = members.iter().map(|&v| self.original_id(v)).collect();
        let attrs = Csr::from_lists(members.iter().map(|&v| self.attributes(v).to_vec()).collect());
        Self::build(ids, edges, Some((attrs, self.attribute_names.clone())))
    }

    /// Exact label distribution by full enumeration.
    pub fn ground_truth(&self, kind: LabelKind) -> Result<GroundTruth> {
        if kind.needs_attributes() && !self.has_attributes() {
            return Err(Error::InvalidInput("attribute labels requested on an unlabeled graph".into()));
        }
        let n = self.node_count();
        let mut counts: BTreeMap<Label, u64> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut selected = 0u64;
        for v in 0..n as NodeIndex {
            labels.clear();
            self.node_record(v).labels_into(kind, &mut labels);
            for &l in &labels {
                if l == Label::Selected {
                    selected += 1;
                } else {
                    *counts.entry(l).or_insert(0) += 1;
                }
            }
        }
        let denominator = match kind {
            LabelKind::TopAttribute { .. } => {
                if selected == 0 {
                    return Err(Error::InvalidInput("no node reaches the degree threshold".into()));
                }
                selected
            }
            _ => n as u64,
        };
        let masses = counts.into_iter().map(|(l, c)| (l, c as f64 / denominator as f64)).collect();
        Ok(GroundTruth {
            kind,
            masses,
            node_count: n,
            support_fraction: denominator as f64 / n as f64,
            mean_undirected_degree: self.volume() as f64 / n as f64,
        })
    }
}

/// Numeric names by value first, then the rest lexicographically.
fn attribute_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Iterative Tarjan over out-edges.
fn strongly_connected_components(g: &DirectedGraph) -> Vec<Vec<NodeIndex>> {
    const UNSEEN: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = alloc::vec![UNSEEN; n];
    let mut lowlink = alloc::vec![0u32; n];
    let mut on_stack = alloc::vec![false; n];
    let mut stack: Vec<NodeIndex> = Vec::new();
    let mut call: Vec<(NodeIndex, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut components = Vec::new();

    for root in 0..n as NodeIndex {
        if index[root as usize] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        lowlink[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = g.out_neighbors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w as usize] == UNSEEN {
                    index[w as usize] = next_index;
                    lowlink[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
            }
            if lowlink[v as usize] == index[v as usize] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w as usize] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}

/// Exact node-label distribution θ of a graph (or of a model).
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub kind: LabelKind,
    /// θ_ℓ for every label with positive mass.
    pub masses: BTreeMap<Label, f64>,
    pub node_count: usize,
    /// Fraction of V the masses are conditioned on (1 except for
    /// [`LabelKind::TopAttribute`]).
    pub support_fraction: f64,
    /// d̄ = vol(V)/|V|.
    pub mean_undirected_degree: f64,
}

impl GroundTruth {
    pub fn mass(&self, label: &Label) -> f64 {
        self.masses.get(label).copied().unwrap_or(0.0)
    }

    /// Mean of the degree carried by the labels, Σ d θ_d. `None` unless the
    /// kind is a degree kind.
    pub fn mean_label_degree(&self) -> Option<f64> {
        if !self.kind.is_degree() {
            return None;
        }
        Some(self.masses.iter().filter_map(|(l, &m)| l.degree().map(|d| d as f64 * m)).sum())
    }

    /// Edge-sampling probabilities π_d = d θ_d / Σ d θ_d for degree kinds.
    pub fn edge_sampling_masses(&self) -> Option<BTreeMap<Label, f64>> {
        let mean = self.mean_label_degree()?;
        if mean <= 0.0 {
            return None;
        }
        Some(
            self.masses
                .iter()
                .filter_map(|(l, &m)| l.degree().map(|d| (*l, d as f64 * m / mean)))
                .collect(),
        )
    }
}

/// Smallest degree value present such that at most `fraction·|V|` nodes
/// have at least that degree. When no present value qualifies (heavy ties)
/// the maximum degree is returned and the selected set is everything at
/// that degree.
pub fn degree_threshold_top_fraction(g: &DirectedGraph, fraction: f64) -> Result<u32> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("fraction {fraction} outside (0, 1]")));
    }
    let n = g.node_count();
    let mut degrees: Vec<u32> = (0..n as NodeIndex).map(|v| g.degree(v)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let allowed = crate::math::floor(fraction * n as f64 + 1e-9) as usize;
    // degrees[k - 1] is the k-th largest; a value d qualifies iff the number
    // of entries >= d is at most `allowed`
    let mut best = degrees[0];
    let mut i = 0;
    while i < n {
        let d = degrees[i];
        let mut j = i;
        while j < n && degrees[j] == d {
            j += 1;
        }
        if j <= allowed {
            best = d;
        } else {
            break;
        }
        i = j;
    }
    Ok(best)
}
