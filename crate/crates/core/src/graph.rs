//! Undirected simple graphs, edge-set algebra and explanations.
//!
//! Edges are stored canonically as `(u, v)` with `u < v` in a sorted,
//! duplicate-free vector, so set operations are linear merges and two graphs
//! with the same vertex count, edges and features compare equal regardless of
//! how they were built.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// Feature width used when a graph is created without explicit features.
pub const DEFAULT_FEATURE_DIM: usize = 10;

/// An undirected edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: u32,
    v: u32,
}

impl Edge {
    /// Builds the canonical form of `{a, b}`. Self-loops are rejected.
    pub fn new(a: u32, b: u32) -> Result<Self> {
        match a.cmp(&b) {
            Ordering::Less => Ok(Edge { u: a, v: b }),
            Ordering::Greater => Ok(Edge { u: b, v: a }),
            Ordering::Equal => invalid(format!("self-loop on vertex {a}")),
        }
    }

    pub fn u(self) -> u32 {
        self.u
    }

    pub fn v(self) -> u32 {
        self.v
    }

    pub fn endpoints(self) -> (u32, u32) {
        (self.u, self.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// A sorted set of canonical edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSet(Vec<Edge>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet(Vec::new())
    }

    /// Builds a set from raw vertex pairs, canonicalizing and deduplicating.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let edges = pairs
            .into_iter()
            .map(|(a, b)| Edge::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(edges.into_iter().collect())
    }

    /// Wraps a vector that is already sorted and duplicate-free.
    pub(crate) fn from_sorted_unchecked(edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        EdgeSet(edges)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Edge> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Edge] {
        &self.0
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.0.binary_search(e).is_ok()
    }

    /// Largest endpoint appearing in the set, if any.
    pub fn max_vertex(&self) -> Option<u32> {
        self.0.iter().map(|e| e.v).max()
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut theirs = other.0.iter();
        'outer: for e in &self.0 {
            for o in theirs.by_ref() {
                match o.cmp(e) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = Vec::with_capacity(self.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() {
            if j >= other.0.len() {
                out.extend_from_slice(&self.0[i..]);
                break;
            }
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                Ordering::Greater => j += 1,
            }
        }
        EdgeSet(out)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        EdgeSet(out)
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        EdgeSet(out)
    }

    /// Cardinality of the symmetric difference.
    pub fn symmetric_difference_len(&self, other: &EdgeSet) -> usize {
        let common = {
            let (mut i, mut j, mut n) = (0, 0, 0);
            while i < self.0.len() && j < other.0.len() {
                match self.0[i].cmp(&other.0[j]) {
                    Ordering::Less => i += 1,
                    Ordering::Greater => j += 1,
                    Ordering::Equal => {
                        n += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
            n
        };
        self.len() + other.len() - 2 * common
    }

    /// Distinct endpoints of the edges, ascending.
    pub fn vertices(&self) -> BTreeSet<u32> {
        self.0.iter().flat_map(|e| [e.u, e.v]).collect()
    }

    /// Subset selected by positions into the sorted order.
    pub(crate) fn select(&self, mut positions: Vec<usize>) -> EdgeSet {
        positions.sort_unstable();
        EdgeSet(positions.into_iter().map(|p| self.0[p]).collect())
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut v: Vec<Edge> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        EdgeSet(v)
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a Edge;
    type IntoIter = std::slice::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Symmetric-difference edit distance between two edge sets.
pub fn edit_distance(a: &EdgeSet, b: &EdgeSet) -> usize {
    a.symmetric_difference_len(b)
}

/// Row-major node feature matrix, shared between graphs derived from one another.
#[derive(Clone, Debug)]
pub struct Features(Arc<FeatureMatrix>);

#[derive(Debug, PartialEq)]
struct FeatureMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Features {
    pub fn ones(rows: usize, dim: usize) -> Self {
        Features(Arc::new(FeatureMatrix {
            rows,
            dim,
            data: vec![1.0; rows * dim],
        }))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("feature rows have unequal widths");
        }
        Ok(Features(Arc::new(FeatureMatrix {
            rows: rows.len(),
            dim,
            data: rows.iter().flatten().copied().collect(),
        })))
    }

    pub fn rows(&self) -> usize {
        self.0.rows
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.0.data[i * self.0.dim..(i + 1) * self.0.dim]
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.data.iter().all(|&x| x == 1.0)
    }

    /// New matrix made of the given rows, in order.
    pub fn gather(&self, rows: &[usize]) -> Features {
        let dim = self.dim();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Features(Arc::new(FeatureMatrix {
            rows: rows.len(),
            dim,
            data,
        }))
    }
}

impl PartialEq for Features {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// An undirected simple graph with node features.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    edges: EdgeSet,
    features: Features,
}

impl Graph {
    pub fn new(num_nodes: usize, edges: EdgeSet, features: Features) -> Result<Self> {
        if let Some(m) = edges.max_vertex() {
            if m as usize >= num_nodes {
                return invalid(format!(
                    "edge endpoint {m} out of range for {num_nodes} nodes"
                ));
            }
        }
        if features.rows() != num_nodes {
            return invalid(format!(
                "feature matrix has {} rows for {num_nodes} nodes",
                features.rows()
            ));
        }
        Ok(Graph {
            num_nodes,
            edges,
            features,
        })
    }

    /// Graph with all-ones features of the default width.
    pub fn from_edges(num_nodes: usize, edges: EdgeSet) -> Result<Self> {
        Graph::new(
            num_nodes,
            edges,
            Features::ones(num_nodes, DEFAULT_FEATURE_DIM),
        )
    }

    pub fn from_pairs<I>(num_nodes: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        Graph::from_edges(num_nodes, EdgeSet::from_pairs(pairs)?)
    }

    pub fn empty(num_nodes: usize) -> Self {
        Graph {
            num_nodes,
            edges: EdgeSet::new(),
            features: Features::ones(num_nodes, DEFAULT_FEATURE_DIM),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn features(&self) -> &Features {
        &self.features
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        Edge::new(a, b).is_ok_and(|e| self.edges.contains(&e))
    }

    /// Same vertices and features, different edge set.
    ///
    /// Callers must guarantee the endpoints are in range.
    pub(crate) fn with_edges_unchecked(&self, edges: EdgeSet) -> Graph {
        debug_assert!(edges.max_vertex().is_none_or(|m| (m as usize) < self.num_nodes));
        Graph {
            num_nodes: self.num_nodes,
            edges,
            features: self.features.clone(),
        }
    }

    pub fn with_edges(&self, edges: EdgeSet) -> Result<Graph> {
        Graph::new(self.num_nodes, edges, self.features.clone())
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for e in &self.edges {
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }
}

/// A graph together with its class label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub label: usize,
}

impl LabeledGraph {
    pub fn new(graph: Graph, label: usize) -> Self {
        LabeledGraph { graph, label }
    }
}

/// An explanation: a subset of a host graph's edges. Its vertex set is the
/// set of endpoints of those edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Explanation {
    edges: EdgeSet,
    host_num_nodes: usize,
}

impl Explanation {
    pub fn new(edges: EdgeSet, host_num_nodes: usize) -> Result<Self> {
        if let Some(m) = edges.max_vertex() {
            if m as usize >= host_num_nodes {
                return invalid(format!(
                    "explanation endpoint {m} out of range for {host_num_nodes} nodes"
                ));
            }
        }
        Ok(Explanation {
            edges,
            host_num_nodes,
        })
    }

    pub fn empty(host_num_nodes: usize) -> Self {
        Explanation {
            edges: EdgeSet::new(),
            host_num_nodes,
        }
    }

    /// The explanation consisting of every edge of `g`.
    pub fn whole(g: &Graph) -> Self {
        Explanation {
            edges: g.edges().clone(),
            host_num_nodes: g.num_nodes(),
        }
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn host_num_nodes(&self) -> usize {
        self.host_num_nodes
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<u32> {
        self.edges.vertices()
    }

    pub fn is_bound_to(&self, g: &Graph) -> bool {
        self.host_num_nodes == g.num_nodes() && self.edges.is_subset(g.edges())
    }

    pub fn ensure_bound_to(&self, g: &Graph) -> Result<()> {
        if self.is_bound_to(g) {
            Ok(())
        } else {
            invalid("explanation is not a subset of its graph's edges")
        }
    }

    /// The explanation-only graph: the host's vertices and features with
    /// only the explanation's edges.
    pub fn as_graph(&self, host: &Graph) -> Result<Graph> {
        self.ensure_bound_to(host)?;
        Ok(host.with_edges_unchecked(self.edges.clone()))
    }
}

/// `g` with the explanation's edges deleted. Vertices are kept.
pub fn remove_edges(g: &Graph, e: &Explanation) -> Result<Graph> {
    e.ensure_bound_to(g)?;
    Ok(g.with_edges_unchecked(g.edges().difference(e.edges())))
}

/// `g` with `extra` edges added over the same vertex set.
pub fn union_edges(g: &Graph, extra: &EdgeSet) -> Result<Graph> {
    g.with_edges(g.edges().union(extra))
}
