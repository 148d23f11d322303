//! Seeded synthetic benchmark generators with ground-truth explanations.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{cycle_edges, typicality_threshold};
use crate::error::{invalid, Result};
use crate::graph::{Edge, EdgeSet, Explanation, Graph, LabeledGraph};
use crate::rng::StreamRng;
use crate::samplers::check_prob;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    GraphClassification,
    NodeClassification,
}

/// Per-node annotations of a node-classification dataset. The host graph is
/// stored as the dataset's only graph.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTask {
    pub node_labels: Vec<usize>,
    /// Vertex list of each planted motif.
    pub motifs: Vec<Vec<u32>>,
    /// Edge set of each planted motif.
    pub motif_edges: Vec<EdgeSet>,
}

impl NodeTask {
    /// Motif index of each node, if it belongs to one.
    pub fn membership(&self, num_nodes: usize) -> Vec<Option<usize>> {
        let mut m = vec![None; num_nodes];
        for (i, vs) in self.motifs.iter().enumerate() {
            for &v in vs {
                m[v as usize] = Some(i);
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub task: Task,
    pub num_classes: usize,
    pub graphs: Vec<LabeledGraph>,
    /// Parallel to `graphs`; empty where a graph has no motif.
    pub gt_explanations: Vec<Explanation>,
    pub node_task: Option<NodeTask>,
}

impl Dataset {
    pub fn validate(&self) -> Result<()> {
        if self.graphs.len() != self.gt_explanations.len() {
            return invalid(format!(
                "{} graphs but {} ground-truth explanations",
                self.graphs.len(),
                self.gt_explanations.len()
            ));
        }
        for (i, (lg, gt)) in self.graphs.iter().zip(&self.gt_explanations).enumerate() {
            if lg.label >= self.num_classes {
                return invalid(format!("graph {i}: label {} ≥ {} classes", lg.label, self.num_classes));
            }
            if !gt.is_bound_to(&lg.graph) {
                return invalid(format!("graph {i}: ground truth is not a subset of the graph"));
            }
        }
        if let Some(nt) = &self.node_task {
            let host = self.graphs.first().map(|g| &g.graph);
            let n = host.map_or(0, Graph::num_nodes);
            if self.graphs.len() != 1 || nt.node_labels.len() != n {
                return invalid("node task needs one host graph and one label per node");
            }
            if nt.motifs.len() != nt.motif_edges.len() {
                return invalid("motif vertex and edge lists differ in length");
            }
            if nt.node_labels.iter().any(|&y| y >= self.num_classes) {
                return invalid("node label out of range");
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Graph/explanation pairs in order.
    pub fn pairs(&self) -> Vec<(LabeledGraph, Explanation)> {
        self.graphs.iter().cloned().zip(self.gt_explanations.iter().cloned()).collect()
    }
}

/// Vertices of the house motif, relative to its first vertex: square
/// 0-1-2-3 with roof vertex 4 on the edge 2-3.
const HOUSE: [(u32, u32); 6] = [(0, 1), (1, 2), (2, 3), (0, 3), (2, 4), (3, 4)];
const CYCLE5: [(u32, u32); 5] = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)];

pub const BA_BASE_NODES: usize = 20;

fn shifted(edges: &[(u32, u32)], offset: u32) -> EdgeSet {
    EdgeSet::from_pairs(edges.iter().map(|&(a, b)| (a + offset, b + offset))).expect("motif edges are valid")
}

/// The house motif on vertices 20..24, in the id space of a BA-2motifs graph.
pub fn ba_house_motif() -> Graph {
    Graph::from_edges(BA_BASE_NODES + 5, shifted(&HOUSE, BA_BASE_NODES as u32)).expect("in range")
}

/// The 5-cycle motif on vertices 20..24, in the id space of a BA-2motifs graph.
pub fn ba_cycle_motif() -> Graph {
    Graph::from_edges(BA_BASE_NODES + 5, shifted(&CYCLE5, BA_BASE_NODES as u32)).expect("in range")
}

/// Barabási–Albert tree with one edge per new node: starts from the edge
/// 0-1, and each later node links to an existing node chosen with
/// probability proportional to its degree.
pub fn barabasi_albert_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(u32, u32)> {
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n < 2 {
        return edges;
    }
    // Each edge contributes both endpoints, so a uniform pick from this list
    // is a degree-proportional pick.
    let mut ends: Vec<u32> = vec![0, 1];
    edges.push((0, 1));
    for v in 2..n as u32 {
        let t = ends[rng.random_range(0..ends.len())];
        edges.push((t, v));
        ends.push(t);
        ends.push(v);
    }
    edges
}

pub fn gen_ba2motifs(count: usize, seed: u64) -> Result<Dataset> {
    if count == 0 || count % 2 == 1 {
        return invalid(format!("count must be even and positive, got {count}"));
    }
    let mut rng = StreamRng::new(seed);
    let n = BA_BASE_NODES + 5;
    let base = BA_BASE_NODES as u32;
    let mut graphs = Vec::with_capacity(count);
    let mut gts = Vec::with_capacity(count);
    for i in 0..count {
        let house = i % 2 == 0;
        let mut pairs = barabasi_albert_tree(BA_BASE_NODES, &mut rng);
        let motif = if house { shifted(&HOUSE, base) } else { shifted(&CYCLE5, base) };
        let anchor = rng.random_range(0..base);
        pairs.push((anchor, base));
        pairs.extend(motif.iter().map(|e| e.endpoints()));
        let g = Graph::from_pairs(n, pairs)?;
        gts.push(Explanation::new(motif, n)?);
        graphs.push(LabeledGraph::new(g, usize::from(house)));
    }
    Ok(Dataset {
        name: "ba2motifs".into(),
        task: Task::GraphClassification,
        num_classes: 2,
        graphs,
        gt_explanations: gts,
        node_task: None,
    })
}

pub const TREE_DEPTH: u32 = 8;

fn balanced_tree_edges(depth: u32) -> (usize, Vec<(u32, u32)>) {
    let n = (1usize << (depth + 1)) - 1;
    let edges = (1..n as u32).map(|c| ((c - 1) / 2, c)).collect();
    (n, edges)
}

/// Motif shape on vertices 0..k, used by the tree datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeMotif {
    /// Cycle of the given length.
    Cycle(u32),
    /// r × c grid.
    Grid(u32, u32),
}

impl TreeMotif {
    pub fn num_nodes(self) -> u32 {
        match self {
            TreeMotif::Cycle(k) => k,
            TreeMotif::Grid(r, c) => r * c,
        }
    }

    pub fn edges(self) -> Vec<(u32, u32)> {
        match self {
            TreeMotif::Cycle(k) => (0..k).map(|i| (i, (i + 1) % k)).collect(),
            TreeMotif::Grid(r, c) => {
                let mut e = Vec::new();
                for i in 0..r {
                    for j in 0..c {
                        let v = i * c + j;
                        if j + 1 < c {
                            e.push((v, v + 1));
                        }
                        if i + 1 < r {
                            e.push((v, v + c));
                        }
                    }
                }
                e
            }
        }
    }
}

/// Balanced binary tree of the given depth with `num_motifs` motifs, each
/// joined to a uniformly chosen tree node by one bridge edge from the
/// motif's first vertex.
pub fn gen_tree_motifs(name: &str, motif: TreeMotif, num_motifs: usize, seed: u64) -> Result<Dataset> {
    if num_motifs == 0 {
        return invalid("num_motifs must be at least 1");
    }
    let mut rng = StreamRng::new(seed);
    let (base_n, mut pairs) = balanced_tree_edges(TREE_DEPTH);
    let k = motif.num_nodes();
    let shape = motif.edges();
    let total = base_n + num_motifs * k as usize;
    let mut labels = vec![0usize; base_n];
    let mut motifs = Vec::with_capacity(num_motifs);
    let mut motif_edges = Vec::with_capacity(num_motifs);
    for m in 0..num_motifs {
        let off = (base_n + m * k as usize) as u32;
        let anchor = rng.random_range(0..base_n as u32);
        pairs.push((anchor, off));
        let me = shifted(&shape, off);
        pairs.extend(me.iter().map(|e| e.endpoints()));
        motifs.push((off..off + k).collect());
        motif_edges.push(me);
        labels.extend(std::iter::repeat_n(1, k as usize));
    }
    let g = Graph::from_pairs(total, pairs)?;
    Ok(Dataset {
        name: name.into(),
        task: Task::NodeClassification,
        num_classes: 2,
        graphs: vec![LabeledGraph::new(g, 0)],
        gt_explanations: vec![Explanation::new(
            motif_edges.iter().fold(EdgeSet::new(), |a, b| a.union(b)),
            total,
        )?],
        node_task: Some(NodeTask { node_labels: labels, motifs, motif_edges }),
    })
}

pub fn gen_tree_cycles(num_motifs: usize, seed: u64) -> Result<Dataset> {
    gen_tree_motifs("tree-cycles", TreeMotif::Cycle(6), num_motifs, seed)
}

pub fn gen_tree_grid(num_motifs: usize, seed: u64) -> Result<Dataset> {
    gen_tree_motifs("tree-grid", TreeMotif::Grid(3, 3), num_motifs, seed)
}

/// Erdős–Rényi G(n, p).
pub fn gen_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_prob("p", p)?;
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.random_bool(p) {
                edges.push(Edge::new(a, b)?);
            }
        }
    }
    Graph::from_edges(n, EdgeSet::from_sorted_unchecked(edges))
}

/// ER(n, p) graphs, each unioned with the n-cycle with probability q.
/// Label 1 iff the cycle was planted and the graph has at least n²p/4
/// edges; ground truth is the cycle when planted.
pub fn gen_appendix_b(n: usize, p: f64, q: f64, count: usize, seed: u64) -> Result<Dataset> {
    if n < 3 {
        return invalid(format!("n must be at least 3, got {n}"));
    }
    check_prob("p", p)?;
    check_prob("q", q)?;
    let mut rng = StreamRng::new(seed);
    let cycle = cycle_edges(n);
    let threshold = typicality_threshold(n, p);
    let mut graphs = Vec::with_capacity(count);
    let mut gts = Vec::with_capacity(count);
    for _ in 0..count {
        let base = gen_er(n, p, &mut rng)?;
        let planted = rng.random_bool(q);
        let g = if planted { base.with_edges(base.edges().union(&cycle))? } else { base };
        let label = usize::from(planted && g.num_edges() as f64 >= threshold);
        gts.push(if planted { Explanation::new(cycle.clone(), n)? } else { Explanation::empty(n) });
        graphs.push(LabeledGraph::new(g, label));
    }
    Ok(Dataset {
        name: "appendix-b".into(),
        task: Task::GraphClassification,
        num_classes: 2,
        graphs,
        gt_explanations: gts,
        node_task: None,
    })
}

/// Induced subgraph on the vertices within `k` hops of `center`. Returns
/// the subgraph and, for each new id, the original id. New ids follow the
/// original order.
pub fn ego_subgraph(g: &Graph, center: u32, k: usize) -> Result<(Graph, Vec<u32>)> {
    if center as usize >= g.num_nodes() {
        return invalid(format!("center {center} out of range for {} nodes", g.num_nodes()));
    }
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.num_nodes()];
    dist[center as usize] = 0;
    let mut queue = VecDeque::from([center]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        if d == k {
            continue;
        }
        for &w in &adj[v as usize] {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }
    let kept: Vec<u32> = (0..g.num_nodes() as u32).filter(|&v| dist[v as usize] != usize::MAX).collect();
    let new_id: BTreeMap<u32, u32> = kept.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let edges: EdgeSet = g
        .edges()
        .iter()
        .filter_map(|e| {
            let (a, b) = (new_id.get(&e.u())?, new_id.get(&e.v())?);
            Some(Edge::new(*a, *b).expect("distinct endpoints"))
        })
        .collect();
    let rows: Vec<usize> = kept.iter().map(|&v| v as usize).collect();
    let sub = Graph::new(kept.len(), edges, g.features().gather(&rows))?;
    Ok((sub, kept))
}

/// Turns a node-classification dataset into a graph-level one: one `k`-hop
/// ego graph per sampled motif node (at most `max_nodes`, chosen with
/// `seed`), labelled with the node's label, with ground truth the node's
/// motif edges that fall inside the ego graph.
pub fn evaluation_instances(data: &Dataset, k: usize, max_nodes: usize, seed: u64) -> Result<Dataset> {
    let Some(nt) = &data.node_task else {
        return Ok(data.clone());
    };
    let host = &data.graphs[0].graph;
    let membership = nt.membership(host.num_nodes());
    let motif_nodes: Vec<u32> = (0..host.num_nodes() as u32).filter(|&v| membership[v as usize].is_some()).collect();
    let chosen: Vec<u32> = if motif_nodes.len() <= max_nodes {
        motif_nodes
    } else {
        let mut rng = StreamRng::new(seed);
        let mut idx = index::sample(&mut rng, motif_nodes.len(), max_nodes).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| motif_nodes[i]).collect()
    };
    let mut graphs = Vec::with_capacity(chosen.len());
    let mut gts = Vec::with_capacity(chosen.len());
    for v in chosen {
        let (sub, ids) = ego_subgraph(host, v, k)?;
        let new_id: BTreeMap<u32, u32> = ids.iter().enumerate().map(|(i, &o)| (o, i as u32)).collect();
        let m = membership[v as usize].expect("motif node");
        let gt: EdgeSet = nt.motif_edges[m]
            .iter()
            .filter_map(|e| Some(Edge::new(*new_id.get(&e.u())?, *new_id.get(&e.v())?).expect("distinct")))
            .collect();
        gts.push(Explanation::new(gt, sub.num_nodes())?);
        graphs.push(LabeledGraph::new(sub, nt.node_labels[v as usize]));
    }
    Ok(Dataset {
        name: format!("{}-ego{k}", data.name),
        task: Task::GraphClassification,
        num_classes: data.num_classes,
        graphs,
        gt_explanations: gts,
        node_task: None,
    })
}

/// Seeded 8:1:1 train/validation/test split of `0..n`.
pub fn split_indices(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut rng = StreamRng::new(seed);
    let perm = index::sample(&mut rng, n, n).into_vec();
    let n_train = (n * 8) / 10;
    let n_val = (n - n_train) / 2;
    let mut train = perm[..n_train].to_vec();
    let mut val = perm[n_train..n_train + n_val].to_vec();
    let mut test = perm[n_train + n_val..].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    (train, val, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{contains_subgraph, Containment};

    fn connected(g: &Graph) -> bool {
        let (sub, _) = ego_subgraph(g, 0, g.num_nodes()).unwrap();
        sub.num_nodes() == g.num_nodes()
    }

    #[test]
    fn ba2motifs_shape() {
        let d = gen_ba2motifs(1000, 7).unwrap();
        d.validate().unwrap();
        assert_eq!(d.len(), 1000);
        assert_eq!(d.graphs.iter().filter(|g| g.label == 1).count(), 500);
        for (lg, gt) in d.graphs.iter().zip(&d.gt_explanations) {
            assert_eq!(lg.graph.num_nodes(), 25);
            // 19 tree edges, one bridge, motif edges.
            assert_eq!(lg.graph.num_edges(), 20 + gt.len());
            assert_eq!(gt.len(), if lg.label == 1 { 6 } else { 5 });
            let motif = gt.as_graph(&lg.graph).unwrap();
            assert!(contains_subgraph(&lg.graph, &motif, Containment::FixedIds).unwrap());
            assert!(connected(&lg.graph));
            let deg: usize = lg.graph.degrees().iter().sum();
            assert_eq!(deg, 2 * lg.graph.num_edges());
            assert!(lg.graph.features().is_all_ones());
            assert_eq!(lg.graph.features().dim(), 10);
        }
    }

    #[test]
    fn ba2motifs_rejects_bad_counts() {
        assert!(gen_ba2motifs(0, 1).is_err());
        assert!(gen_ba2motifs(3, 1).is_err());
        let d = gen_ba2motifs(2, 1).unwrap();
        assert_eq!(d.gt_explanations[0].len(), 6);
        assert_eq!(d.gt_explanations[1].len(), 5);
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_ba2motifs(20, 3).unwrap(), gen_ba2motifs(20, 3).unwrap());
        assert_ne!(gen_ba2motifs(20, 3).unwrap(), gen_ba2motifs(20, 4).unwrap());
        assert_eq!(gen_tree_grid(5, 3).unwrap(), gen_tree_grid(5, 3).unwrap());
    }

    #[test]
    fn tree_cycles_shape() {
        let d = gen_tree_cycles(80, 1).unwrap();
        d.validate().unwrap();
        let g = &d.graphs[0].graph;
        assert_eq!(g.num_nodes(), 511 + 480);
        let nt = d.node_task.as_ref().unwrap();
        assert!(nt.node_labels[..511].iter().all(|&y| y == 0));
        assert!(nt.node_labels[511..].iter().all(|&y| y == 1));
        assert_eq!(nt.motifs.len(), 80);
        assert!(nt.motif_edges.iter().all(|e| e.len() == 6));
        assert_eq!(g.num_edges(), 510 + 80 * 7);
        assert!(connected(g));
    }

    #[test]
    fn tree_grid_shape() {
        let d = gen_tree_grid(10, 1).unwrap();
        d.validate().unwrap();
        let g = &d.graphs[0].graph;
        let nt = d.node_task.as_ref().unwrap();
        assert!(nt.motif_edges.iter().all(|e| e.len() == 12));
        for e in &nt.motif_edges {
            let m = Graph::from_edges(g.num_nodes(), e.clone()).unwrap();
            assert!(contains_subgraph(g, &m, Containment::FixedIds).unwrap());
        }
        assert_eq!(TreeMotif::Grid(3, 3).edges().len(), 2 * 3 * 2);
    }

    #[test]
    fn er_extremes_and_mean() {
        let mut rng = StreamRng::new(5);
        assert_eq!(gen_er(10, 0.0, &mut rng).unwrap().num_edges(), 0);
        assert_eq!(gen_er(10, 1.0, &mut rng).unwrap().num_edges(), 45);
        let trials = 1000;
        let total: usize = (0..trials).map(|_| gen_er(100, 0.3, &mut rng).unwrap().num_edges()).sum();
        let mean = total as f64 / trials as f64;
        let sd_mean = (4950.0 * 0.3 * 0.7 / trials as f64).sqrt();
        assert!((mean - 1485.0).abs() < 3.0 * sd_mean, "mean {mean}");
    }

    #[test]
    fn appendix_b_examples() {
        let d = gen_appendix_b(10, 0.0, 1.0, 20, 1).unwrap();
        d.validate().unwrap();
        for lg in &d.graphs {
            assert_eq!(lg.graph.edges(), &cycle_edges(10));
            assert_eq!(lg.label, 1);
        }
        let d = gen_appendix_b(10, 0.3, 0.0, 50, 1).unwrap();
        assert!(d.graphs.iter().all(|g| g.label == 0));
        assert!(d.gt_explanations.iter().all(Explanation::is_empty));

        let d = gen_appendix_b(8, 0.2, 0.75, 4000, 2).unwrap();
        let planted = d.gt_explanations.iter().filter(|e| !e.is_empty()).count() as f64 / 4000.0;
        let se = (0.75 * 0.25 / 4000.0f64).sqrt();
        assert!((planted - 0.75).abs() < 3.0 * se, "planted fraction {planted}");
    }

    #[test]
    fn ego_examples() {
        let path = Graph::from_pairs(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (g0, ids0) = ego_subgraph(&path, 2, 0).unwrap();
        assert_eq!((g0.num_nodes(), g0.num_edges(), ids0), (1, 0, vec![2]));
        let (g1, ids1) = ego_subgraph(&path, 1, 1).unwrap();
        assert_eq!(ids1, vec![0, 1, 2]);
        assert_eq!(g1.edges(), &EdgeSet::from_pairs([(0, 1), (1, 2)]).unwrap());
        let two = Graph::from_pairs(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let (g, ids) = ego_subgraph(&two, 0, 10).unwrap();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(g.num_edges(), 2);
        assert!(ego_subgraph(&path, 4, 1).is_err());
    }

    #[test]
    fn evaluation_instances_are_bound() {
        let d = gen_tree_cycles(30, 2).unwrap();
        let inst = evaluation_instances(&d, 3, 100, 9).unwrap();
        inst.validate().unwrap();
        assert_eq!(inst.len(), 100);
        assert!(inst.graphs.iter().all(|g| g.label == 1));
        // From any node of a 6-cycle, 3 hops reach the whole cycle.
        assert!(inst.gt_explanations.iter().all(|e| e.len() == 6));
    }

    #[test]
    fn split_is_a_partition() {
        let (a, b, c) = split_indices(1000, 4);
        assert_eq!((a.len(), b.len(), c.len()), (800, 100, 100));
        let mut all: Vec<usize> = a.into_iter().chain(b).chain(c).collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
    }
}
