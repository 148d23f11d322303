//! Classifiers f: graph → distribution over classes.

pub mod bridge;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{edit_distance, Graph};
use crate::matching::{contains_subgraph, Containment};
use crate::rng::StreamRng;

pub use bridge::BridgeClassifier;

const SUM_TOL: f64 = 1e-9;

/// A probability vector over class indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ClassDistribution(Vec<f64>);

impl ClassDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("class distribution is empty");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return invalid(format!("class probabilities must be finite and non-negative: {probs:?}"));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return invalid(format!("class probabilities sum to {s}, not 1"));
        }
        Ok(ClassDistribution(probs))
    }

    pub fn one_hot(class: usize, num_classes: usize) -> Self {
        assert!(class < num_classes, "class {class} out of range for {num_classes} classes");
        let mut v = vec![0.0; num_classes];
        v[class] = 1.0;
        ClassDistribution(v)
    }

    pub fn uniform(num_classes: usize) -> Self {
        assert!(num_classes > 0);
        ClassDistribution(vec![1.0 / num_classes as f64; num_classes])
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn prob(&self, class: usize) -> f64 {
        self.0.get(class).copied().unwrap_or(0.0)
    }

    /// Index of the largest probability; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}

impl TryFrom<Vec<f64>> for ClassDistribution {
    type Error = crate::error::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ClassDistribution::new(v)
    }
}

impl From<ClassDistribution> for Vec<f64> {
    fn from(d: ClassDistribution) -> Self {
        d.0
    }
}

/// A graph classifier. Implementations must tolerate concurrent calls.
///
/// Stochastic classifiers draw from the supplied stream; deterministic ones
/// ignore it.
pub trait Classifier: Send + Sync {
    fn num_classes(&self) -> usize;

    fn classify(&self, g: &Graph, rng: &mut StreamRng) -> Result<ClassDistribution>;

    /// Classifies several graphs, one stream each. Transports with latency
    /// override this to keep many requests in flight.
    fn classify_batch(&self, graphs: &[Graph], rngs: &mut [StreamRng]) -> Result<Vec<ClassDistribution>> {
        assert_eq!(graphs.len(), rngs.len());
        graphs
            .iter()
            .zip(rngs.iter_mut())
            .map(|(g, r)| self.classify(g, r))
            .collect()
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn num_classes(&self) -> usize {
        (**self).num_classes()
    }
    fn classify(&self, g: &Graph, rng: &mut StreamRng) -> Result<ClassDistribution> {
        (**self).classify(g, rng)
    }
    fn classify_batch(&self, graphs: &[Graph], rngs: &mut [StreamRng]) -> Result<Vec<ClassDistribution>> {
        (**self).classify_batch(graphs, rngs)
    }
    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn num_classes(&self) -> usize {
        (**self).num_classes()
    }
    fn classify(&self, g: &Graph, rng: &mut StreamRng) -> Result<ClassDistribution> {
        (**self).classify(g, rng)
    }
    fn classify_batch(&self, graphs: &[Graph], rngs: &mut [StreamRng]) -> Result<Vec<ClassDistribution>> {
        (**self).classify_batch(graphs, rngs)
    }
    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
}

/// Returns the same distribution for every input.
#[derive(Clone, Debug)]
pub struct Constant(pub ClassDistribution);

impl Classifier for Constant {
    fn num_classes(&self) -> usize {
        self.0.num_classes()
    }

    fn classify(&self, _: &Graph, _: &mut StreamRng) -> Result<ClassDistribution> {
        Ok(self.0.clone())
    }
}

/// One motif per class plus class priors.
#[derive(Clone, Debug)]
pub struct MotifRule {
    motifs: Vec<Graph>,
    priors: ClassDistribution,
    mode: Containment,
}

impl MotifRule {
    pub fn new(motifs: Vec<Graph>, priors: ClassDistribution, mode: Containment) -> Result<Self> {
        if motifs.len() != priors.num_classes() {
            return invalid(format!(
                "{} motifs for {} classes",
                motifs.len(),
                priors.num_classes()
            ));
        }
        if motifs.len() < 2 {
            return invalid("a motif rule needs at least two classes");
        }
        Ok(MotifRule { motifs, priors, mode })
    }

    pub fn num_classes(&self) -> usize {
        self.motifs.len()
    }

    pub fn motifs(&self) -> &[Graph] {
        &self.motifs
    }

    pub fn priors(&self) -> &ClassDistribution {
        &self.priors
    }

    pub fn mode(&self) -> Containment {
        self.mode
    }

    /// Classes whose motif is contained in `g`.
    pub fn present(&self, g: &Graph) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (y, m) in self.motifs.iter().enumerate() {
            if contains_subgraph(g, m, self.mode)? {
                out.push(y);
            }
        }
        Ok(out)
    }

    /// The only class whose motif is present, if exactly one is.
    pub fn unique_motif(&self, g: &Graph) -> Result<Option<usize>> {
        let p = self.present(g)?;
        Ok(if p.len() == 1 { Some(p[0]) } else { None })
    }
}

/// P(Y | G): certain when exactly one motif is present, uniform otherwise.
pub fn motif_conditional(rule: &MotifRule, g: &Graph) -> Result<ClassDistribution> {
    Ok(match rule.unique_motif(g)? {
        Some(y) => ClassDistribution::one_hot(y, rule.num_classes()),
        None => ClassDistribution::uniform(rule.num_classes()),
    })
}

/// The Bayes classifier f*: the unique present motif's class, else the
/// most probable class a priori (lowest index on ties).
pub fn bayes_classify(rule: &MotifRule, g: &Graph) -> Result<ClassDistribution> {
    let y = match rule.unique_motif(g)? {
        Some(y) => y,
        None => rule.priors.argmax(),
    };
    Ok(ClassDistribution::one_hot(y, rule.num_classes()))
}

/// Deterministic classifier wrapping [`bayes_classify`].
#[derive(Clone, Debug)]
pub struct MotifBayes(pub MotifRule);

impl Classifier for MotifBayes {
    fn num_classes(&self) -> usize {
        self.0.num_classes()
    }

    fn classify(&self, g: &Graph, _: &mut StreamRng) -> Result<ClassDistribution> {
        bayes_classify(&self.0, g)
    }
}

/// A finite set of graphs on a common vertex set.
#[derive(Clone, Debug)]
pub struct TypicalSet {
    members: Vec<Graph>,
}

impl TypicalSet {
    pub fn new(members: Vec<Graph>) -> Result<Self> {
        let Some(first) = members.first() else {
            return invalid("typical set is empty");
        };
        let n = first.num_nodes();
        if members.iter().any(|m| m.num_nodes() != n) {
            return invalid("typical set members differ in vertex count");
        }
        Ok(TypicalSet { members })
    }

    pub fn members(&self) -> &[Graph] {
        &self.members
    }

    pub fn num_nodes(&self) -> usize {
        self.members[0].num_nodes()
    }
}

/// Distance from `g` to the nearest member, in edge differences.
pub fn typical_distance(ts: &TypicalSet, g: &Graph) -> Result<usize> {
    if g.num_nodes() != ts.num_nodes() {
        return invalid(format!(
            "graph has {} nodes, typical set members have {}",
            g.num_nodes(),
            ts.num_nodes()
        ));
    }
    Ok(ts
        .members
        .iter()
        .map(|m| edit_distance(m.edges(), g.edges()))
        .min()
        .expect("typical set is non-empty"))
}

/// f_δ: agrees with f* with probability (1/(d+1))^δ where d is the distance
/// to the typical set, and otherwise names a uniformly random other class.
#[derive(Clone, Debug)]
pub struct NoisyClassifier {
    rule: MotifRule,
    typical: TypicalSet,
    delta: f64,
}

impl NoisyClassifier {
    pub fn new(rule: MotifRule, typical: TypicalSet, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return invalid(format!("delta must be non-negative, got {delta}"));
        }
        Ok(NoisyClassifier { rule, typical, delta })
    }

    pub fn agreement_probability(&self, g: &Graph) -> Result<f64> {
        let d = typical_distance(&self.typical, g)?;
        Ok((1.0 / (d as f64 + 1.0)).powf(self.delta))
    }
}

pub fn noisy_classify(
    rule: &MotifRule,
    ts: &TypicalSet,
    delta: f64,
    g: &Graph,
    rng: &mut StreamRng,
) -> Result<ClassDistribution> {
    NoisyClassifier::new(rule.clone(), ts.clone(), delta)?.classify(g, rng)
}

impl Classifier for NoisyClassifier {
    fn num_classes(&self) -> usize {
        self.rule.num_classes()
    }

    fn classify(&self, g: &Graph, rng: &mut StreamRng) -> Result<ClassDistribution> {
        let best = bayes_classify(&self.rule, g)?;
        let agree = self.agreement_probability(g)?;
        // Always draw, so the stream position does not depend on the branch.
        let u: f64 = rng.random();
        let k = self.num_classes();
        let other = rng.random_range(0..k - 1);
        if u < agree {
            return Ok(best);
        }
        let y = best.argmax();
        let wrong = if other >= y { other + 1 } else { other };
        Ok(ClassDistribution::one_hot(wrong, k))
    }

    fn is_deterministic(&self) -> bool {
        self.delta == 0.0
    }
}

/// Class 1 iff the cycle 0-1-…-(n−1)-0 is present and the graph has at
/// least n²p/4 edges; class 0 otherwise.
#[derive(Clone, Debug)]
pub struct AppendixBClassifier {
    n: usize,
    p: f64,
    cycle: crate::graph::EdgeSet,
}

impl AppendixBClassifier {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 3 {
            return invalid(format!("cycle needs at least 3 vertices, got {n}"));
        }
        crate::samplers::check_prob("p", p)?;
        Ok(AppendixBClassifier { n, p, cycle: cycle_edges(n) })
    }

    /// The edge count below which a graph is considered atypical.
    pub fn threshold(&self) -> f64 {
        typicality_threshold(self.n, self.p)
    }

    pub fn cycle(&self) -> &crate::graph::EdgeSet {
        &self.cycle
    }
}

pub(crate) fn typicality_threshold(n: usize, p: f64) -> f64 {
    (n * n) as f64 * p / 4.0
}

pub(crate) fn cycle_edges(n: usize) -> crate::graph::EdgeSet {
    let n = n as u32;
    crate::graph::EdgeSet::from_pairs((0..n).map(|i| (i, (i + 1) % n))).expect("n ≥ 3")
}

pub fn appendix_b_classify(n: usize, p: f64, g: &Graph) -> Result<ClassDistribution> {
    AppendixBClassifier::new(n, p)?.classify(g, &mut StreamRng::new(0))
}

impl Classifier for AppendixBClassifier {
    fn num_classes(&self) -> usize {
        2
    }

    fn classify(&self, g: &Graph, _: &mut StreamRng) -> Result<ClassDistribution> {
        if g.num_nodes() != self.n {
            return invalid(format!("expected {} nodes, got {}", self.n, g.num_nodes()));
        }
        let typical = g.num_edges() as f64 >= self.threshold();
        let y = usize::from(typical && self.cycle.is_subset(g.edges()));
        Ok(ClassDistribution::one_hot(y, 2))
    }
}

/// Class 1 iff the motif is contained in the input.
#[derive(Clone, Debug)]
pub struct ContainmentIndicator {
    pub motif: Graph,
    pub mode: Containment,
}

impl Classifier for ContainmentIndicator {
    fn num_classes(&self) -> usize {
        2
    }

    fn classify(&self, g: &Graph, _: &mut StreamRng) -> Result<ClassDistribution> {
        let y = usize::from(contains_subgraph(g, &self.motif, self.mode)?);
        Ok(ClassDistribution::one_hot(y, 2))
    }
}
