//! Exact conditional mutual information over enumerable graph distributions.
//!
//! Support graphs share one vertex set, so edge sets are bitmasks over the
//! union of support edges. Sums over the event "g_exp ⊆ G" become superset
//! sums, computed for all masks at once.

use std::collections::HashMap;

use crate::classifiers::{ClassDistribution, Classifier};
use crate::error::{invalid, Error, Result};
use crate::graph::{Edge, EdgeSet, Graph};
use crate::rng::StreamRng;

/// Largest edge universe handled by the dense transforms.
pub const MAX_UNIVERSE_EDGES: usize = 22;

const PROB_TOLERANCE: f64 = 1e-12;

/// A finite distribution over graphs on a common vertex set, with the
/// conditional label distribution of each support graph.
#[derive(Clone, Debug)]
pub struct GraphDistribution {
    support: Vec<Graph>,
    probs: Vec<f64>,
    labels: Vec<ClassDistribution>,
    num_classes: usize,
}

impl GraphDistribution {
    pub fn new<F>(support: Vec<(Graph, f64)>, label_rule: F) -> Result<Self>
    where
        F: Fn(&Graph) -> Result<ClassDistribution>,
    {
        if support.is_empty() {
            return invalid("empty support");
        }
        let n = support[0].0.num_nodes();
        let mut seen = std::collections::HashSet::new();
        let mut total = 0.0;
        for (g, p) in &support {
            if g.num_nodes() != n {
                return invalid("support graphs must share one vertex set");
            }
            if p.is_nan() || *p < 0.0 {
                return invalid(format!("negative probability {p}"));
            }
            if !seen.insert(g.edges().clone()) {
                return invalid("support graphs must be distinct");
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return invalid(format!("support probabilities sum to {total}"));
        }
        let labels = support.iter().map(|(g, _)| label_rule(g)).collect::<Result<Vec<_>>>()?;
        let num_classes = labels[0].num_classes();
        if labels.iter().any(|l| l.num_classes() != num_classes) {
            return invalid("label rule changed the number of classes");
        }
        let (support, probs) = support.into_iter().unzip();
        Ok(GraphDistribution { support, probs, labels, num_classes })
    }

    /// Every graph on `n` vertices, each edge present independently with
    /// probability `edge_prob`.
    pub fn independent_edges<F>(n: usize, edge_prob: f64, label_rule: F) -> Result<Self>
    where
        F: Fn(&Graph) -> Result<ClassDistribution>,
    {
        crate::samplers::check_prob("edge_prob", edge_prob)?;
        let slots = all_pairs(n);
        if slots.len() > MAX_UNIVERSE_EDGES {
            return Err(Error::TooLarge(format!("{} edge slots exceed {MAX_UNIVERSE_EDGES}", slots.len())));
        }
        let m = slots.len();
        let support = (0u64..1 << m)
            .map(|mask| {
                let k = mask.count_ones() as i32;
                let p = edge_prob.powi(k) * (1.0 - edge_prob).powi(m as i32 - k);
                (Graph::from_edges(n, mask_to_edges(&slots, mask)).expect("valid edges"), p)
            })
            .filter(|(_, p)| *p > 0.0)
            .collect();
        Self::new(support, label_rule)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_nodes(&self) -> usize {
        self.support[0].num_nodes()
    }

    pub fn graph(&self, i: usize) -> &Graph {
        &self.support[i]
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn label(&self, i: usize) -> &ClassDistribution {
        &self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Graph, f64, &ClassDistribution)> {
        self.support.iter().zip(&self.probs).zip(&self.labels).map(|((g, p), l)| (g, *p, l))
    }
}

fn all_pairs(n: usize) -> Vec<Edge> {
    let n = n as u32;
    (0..n).flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v).expect("u < v"))).collect()
}

fn mask_to_edges(slots: &[Edge], mask: u64) -> EdgeSet {
    slots.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| *e).collect()
}

/// Ψ as a finitely supported distribution over explanations per support graph.
#[derive(Clone, Debug)]
pub enum ExplanationFunction {
    /// Outputs and their probabilities, indexed like the support.
    Table(Vec<Vec<(EdgeSet, f64)>>),
    /// A uniformly random edge subset of at least `min_size` edges; the
    /// whole edge set when the graph has fewer edges than that.
    UniformSubsets { min_size: usize },
}

impl ExplanationFunction {
    pub fn from_fn<F>(dist: &GraphDistribution, f: F) -> Result<Self>
    where
        F: Fn(&Graph) -> Vec<(EdgeSet, f64)>,
    {
        let mut table = Vec::with_capacity(dist.len());
        for g in &dist.support {
            let outs = f(g);
            let total: f64 = outs.iter().map(|(_, p)| p).sum();
            if (total - 1.0).abs() > PROB_TOLERANCE || outs.iter().any(|(_, p)| p.is_nan() || *p < 0.0) {
                return invalid(format!("explanation probabilities sum to {total}"));
            }
            if outs.iter().any(|(e, _)| !e.is_subset(g.edges())) {
                return invalid("an explanation is not a subgraph of its input");
            }
            table.push(outs);
        }
        Ok(ExplanationFunction::Table(table))
    }

    pub fn deterministic<F>(dist: &GraphDistribution, f: F) -> Result<Self>
    where
        F: Fn(&Graph) -> EdgeSet,
    {
        Self::from_fn(dist, |g| vec![(f(g), 1.0)])
    }

    fn check(&self, dist: &GraphDistribution) -> Result<()> {
        match self {
            ExplanationFunction::Table(t) if t.len() != dist.len() => {
                invalid(format!("table has {} rows for a support of {}", t.len(), dist.len()))
            }
            _ => Ok(()),
        }
    }

    /// The output distribution for support graph `i`.
    pub fn outputs(&self, dist: &GraphDistribution, i: usize) -> Result<Vec<(EdgeSet, f64)>> {
        self.check(dist)?;
        match self {
            ExplanationFunction::Table(t) => Ok(t[i].clone()),
            ExplanationFunction::UniformSubsets { min_size } => {
                let g = dist.graph(i);
                let l = g.num_edges();
                if l > MAX_UNIVERSE_EDGES {
                    return Err(Error::TooLarge(format!("{l} edges to enumerate")));
                }
                let masks = large_submasks((1u64 << l) - 1, *min_size);
                let w = 1.0 / masks.len() as f64;
                Ok(masks
                    .into_iter()
                    .map(|m| (g.edges().select((0..l).filter(|b| m >> b & 1 == 1).collect()), w))
                    .collect())
            }
        }
    }

    /// Deterministic when every support graph has exactly one output.
    pub fn deterministic_outputs(&self, dist: &GraphDistribution) -> Result<Vec<EdgeSet>> {
        self.check(dist)?;
        match self {
            ExplanationFunction::Table(t) => t
                .iter()
                .map(|outs| match outs.iter().filter(|(_, p)| *p > 0.0).collect::<Vec<_>>()[..] {
                    [(e, _)] => Ok(e.clone()),
                    _ => invalid("explanation function is stochastic"),
                })
                .collect(),
            ExplanationFunction::UniformSubsets { .. } => invalid("explanation function is stochastic"),
        }
    }
}

/// Submasks of `full` with at least `min` bits, or `full` alone if none.
fn large_submasks(full: u64, min: usize) -> Vec<u64> {
    if (full.count_ones() as usize) < min {
        return vec![full];
    }
    let mut out = Vec::new();
    let mut s = full;
    loop {
        if s.count_ones() as usize >= min {
            out.push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & full;
    }
    out.reverse();
    out
}

/// Which label the information is measured about.
#[derive(Clone, Copy)]
pub enum MiTarget<'a> {
    TrueLabel,
    /// Ŷ with the classifier's output distribution per graph.
    Classifier(&'a dyn Classifier),
}

fn target_labels(dist: &GraphDistribution, target: MiTarget<'_>) -> Result<Vec<ClassDistribution>> {
    match target {
        MiTarget::TrueLabel => Ok(dist.labels.clone()),
        MiTarget::Classifier(f) => dist
            .support
            .iter()
            .enumerate()
            .map(|(i, g)| f.classify(g, &mut StreamRng::substream(0, &[i as u64])))
            .collect(),
    }
}

struct Universe {
    index: HashMap<Edge, usize>,
    masks: Vec<u64>,
    bits: usize,
}

fn universe(dist: &GraphDistribution) -> Result<Universe> {
    let mut all = EdgeSet::default();
    for g in &dist.support {
        all = all.union(g.edges());
    }
    if all.len() > MAX_UNIVERSE_EDGES {
        return Err(Error::TooLarge(format!(
            "{} distinct edges in the support exceed {MAX_UNIVERSE_EDGES}",
            all.len()
        )));
    }
    let index: HashMap<Edge, usize> = all.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let masks = dist.support.iter().map(|g| g.edges().iter().fold(0u64, |m, e| m | 1 << index[e])).collect();
    Ok(Universe { index, masks, bits: all.len() })
}

impl Universe {
    fn mask_of(&self, e: &EdgeSet) -> u64 {
        e.iter().fold(0u64, |m, x| m | 1 << self.index[x])
    }
}

fn superset_sum(a: &mut [f64], bits: usize) {
    for b in 0..bits {
        let bit = 1usize << b;
        for m in 0..a.len() {
            if m & bit == 0 {
                a[m] += a[m | bit];
            }
        }
    }
}

fn entropy(ps: impl Iterator<Item = f64>) -> f64 {
    ps.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// I(T; G | 1_{Ψ(G)}) = Σ_{g_exp} P_Ψ(g_exp) · I(T; G | g_exp ⊆ G), in nats,
/// where T is the true label or the classifier's prediction.
pub fn conditional_mi(dist: &GraphDistribution, psi: &ExplanationFunction, target: MiTarget<'_>) -> Result<f64> {
    psi.check(dist)?;
    let labels = target_labels(dist, target)?;
    let k = labels[0].num_classes();
    let u = universe(dist)?;
    let size = 1usize << u.bits;

    let mut weight = vec![0.0; size];
    let mut joint = vec![vec![0.0; size]; k];
    let mut cond_entropy = vec![0.0; size];
    for (i, &m) in u.masks.iter().enumerate() {
        let p = dist.probs[i];
        let m = m as usize;
        weight[m] += p;
        for (y, a) in joint.iter_mut().enumerate() {
            a[m] += p * labels[i].prob(y);
        }
        cond_entropy[m] += p * entropy(labels[i].probs().iter().copied());
    }
    superset_sum(&mut weight, u.bits);
    for a in &mut joint {
        superset_sum(a, u.bits);
    }
    superset_sum(&mut cond_entropy, u.bits);

    // P_Ψ(g_exp) as a dense array over masks.
    let mut p_out = vec![0.0; size];
    for (i, &gm) in u.masks.iter().enumerate() {
        let p = dist.probs[i];
        match psi {
            ExplanationFunction::Table(t) => {
                for (e, q) in &t[i] {
                    p_out[u.mask_of(e) as usize] += p * q;
                }
            }
            ExplanationFunction::UniformSubsets { min_size } => {
                let subs = large_submasks(gm, *min_size);
                let w = p / subs.len() as f64;
                for s in subs {
                    p_out[s as usize] += w;
                }
            }
        }
    }

    let mut total = 0.0;
    for e in 0..size {
        let z = weight[e];
        if p_out[e] <= 0.0 || z <= 0.0 {
            continue;
        }
        let h_y = entropy(joint.iter().map(|a| a[e] / z));
        let info = (h_y - cond_entropy[e] / z).max(0.0);
        total += p_out[e] * info;
    }
    Ok(total)
}

/// I(T; G | Ψ(G)): the information left once the explanation itself is
/// known, rather than only the event that it is contained in G. Equals
/// [`conditional_mi`] when Ψ satisfies Condition 1.
pub fn output_conditional_mi(dist: &GraphDistribution, psi: &ExplanationFunction, target: MiTarget<'_>) -> Result<f64> {
    psi.check(dist)?;
    let labels = target_labels(dist, target)?;
    let k = labels[0].num_classes();
    let u = universe(dist)?;
    let size = 1usize << u.bits;
    // Per output e: P(Ψ = e), P(T = y, Ψ = e) and E[H(T | G) ; Ψ = e].
    let mut weight = vec![0.0; size];
    let mut joint = vec![vec![0.0; size]; k];
    let mut cond_entropy = vec![0.0; size];
    for (i, &gm) in u.masks.iter().enumerate() {
        let p = dist.probs[i];
        let h = entropy(labels[i].probs().iter().copied());
        let mut add = |e: usize, w: f64| {
            weight[e] += w;
            for (y, a) in joint.iter_mut().enumerate() {
                a[e] += w * labels[i].prob(y);
            }
            cond_entropy[e] += w * h;
        };
        match psi {
            ExplanationFunction::Table(t) => {
                for (e, q) in &t[i] {
                    add(u.mask_of(e) as usize, p * q);
                }
            }
            ExplanationFunction::UniformSubsets { min_size } => {
                let subs = large_submasks(gm, *min_size);
                let w = p / subs.len() as f64;
                for s in subs {
                    add(s as usize, w);
                }
            }
        }
    }
    let mut total = 0.0;
    for e in 0..size {
        let z = weight[e];
        if z <= 0.0 {
            continue;
        }
        let h_y = entropy(joint.iter().map(|a| a[e] / z));
        total += z * (h_y - cond_entropy[e] / z).max(0.0);
    }
    Ok(total)
}

/// Classical fidelities as exact expectations over the graph distribution,
/// the label distribution and Ψ's randomness.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ExactFidelity {
    pub plus: f64,
    pub minus: f64,
    pub delta: f64,
}

pub fn exact_fidelity(dist: &GraphDistribution, psi: &ExplanationFunction, f: &dyn Classifier) -> Result<ExactFidelity> {
    let (mut plus, mut minus) = (0.0, 0.0);
    let mut rng = StreamRng::new(0);
    for i in 0..dist.len() {
        let g = dist.graph(i);
        let full = f.classify(g, &mut rng)?;
        let label = dist.label(i);
        let reading = |d: &ClassDistribution| -> f64 { (0..label.num_classes()).map(|y| label.prob(y) * d.prob(y)).sum() };
        let base = reading(&full);
        for (e, q) in psi.outputs(dist, i)? {
            if q == 0.0 {
                continue;
            }
            let removed = g.with_edges(g.edges().difference(&e))?;
            let kept = g.with_edges(e)?;
            plus += dist.prob(i) * q * (base - reading(&f.classify(&removed, &mut rng)?));
            minus += dist.prob(i) * q * (base - reading(&f.classify(&kept, &mut rng)?));
        }
    }
    Ok(ExactFidelity { plus, minus, delta: plus - minus })
}
