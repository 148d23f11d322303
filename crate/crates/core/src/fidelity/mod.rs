//! Fidelity estimators: the classical Fid+/Fid−/FidΔ, their sampled
//! generalizations Fid_{α1,+}/Fid_{α2,−}/Fid_{α1,α2,Δ}, accuracy-based
//! variants, and an exact enumeration of the typical-set estimator.

mod exact;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassDistribution, Classifier};
use crate::error::{invalid, Result};
use crate::graph::{remove_edges, Explanation, Graph, LabeledGraph};
use crate::rng::StreamRng;
use crate::samplers::{check_prob, sample_edges_unchecked, SampleMode};

pub use exact::{admissible_sizes, fid_alpha_exact, fid_typical_exact, Side as ExactSide, DEFAULT_ENUMERATION_CAP};

/// What a single fidelity term measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Drop in the probability assigned to the reference label.
    #[default]
    Probability,
    /// |1(argmax f(G) = y) − 1(argmax f(G') = y)|.
    Accuracy,
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "probability" => Ok(Metric::Probability),
            "accuracy" => Ok(Metric::Accuracy),
            other => Err(format!("unknown metric `{other}` (expected probability or accuracy)")),
        }
    }
}

/// Which label the probability terms read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelSource {
    #[default]
    TrueLabel,
    /// The class the classifier predicts on the unperturbed graph.
    Predicted,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub samples: usize,
    pub mode: SampleMode,
    pub metric: Metric,
    pub seed: u64,
    #[serde(default)]
    pub label_source: LabelSource,
}

impl Default for FidelityConfig {
    fn default() -> Self {
        FidelityConfig {
            alpha1: 0.1,
            alpha2: 0.9,
            samples: 50,
            mode: SampleMode::Ratio,
            metric: Metric::Probability,
            seed: 0,
            label_source: LabelSource::TrueLabel,
        }
    }
}

impl FidelityConfig {
    pub fn validate(&self) -> Result<()> {
        check_prob("alpha1", self.alpha1)?;
        check_prob("alpha2", self.alpha2)?;
        if self.samples == 0 {
            return invalid("samples must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Original,
    Sampled,
    TypicalExact,
}

/// Per-graph means and the standard deviation of the per-sample terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphFidelity {
    pub plus: f64,
    pub minus: f64,
    pub plus_std: f64,
    pub minus_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub estimator: Estimator,
    pub config: FidelityConfig,
    pub fid_plus: f64,
    pub fid_minus: f64,
    pub fid_delta: f64,
    pub per_graph: Vec<GraphFidelity>,
}

impl FidelityReport {
    fn from_per_graph(estimator: Estimator, config: FidelityConfig, per_graph: Vec<GraphFidelity>) -> Self {
        let fid_plus = mean(per_graph.iter().map(|g| g.plus));
        let fid_minus = mean(per_graph.iter().map(|g| g.minus));
        FidelityReport {
            estimator,
            config,
            fid_plus,
            fid_minus,
            fid_delta: fid_plus - fid_minus,
            per_graph,
        }
    }
}

/// One side of a sampled estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SideEstimate {
    pub value: f64,
    pub per_graph: Vec<f64>,
    pub per_graph_std: Vec<f64>,
}

/// Plus, minus, or both accuracy reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyFidelity {
    pub original: FidelityReport,
    pub sampled: FidelityReport,
}

/// Running mean and variance. A constant input sequence keeps the mean
/// bit-exact.
#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0).sqrt()
        }
    }
}

pub(crate) fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let mut w = Welford::default();
    xs.for_each(|x| w.push(x));
    w.mean
}

// Stream tags. Paths are [seed; graph, tag, sample].
const TAG_ORIGINAL: u64 = 0;
const TAG_PLUS_SAMPLE: u64 = 1;
const TAG_PLUS_CLASSIFY: u64 = 2;
const TAG_MINUS_SAMPLE: u64 = 3;
const TAG_MINUS_CLASSIFY: u64 = 4;
const TAG_REMOVED: u64 = 5;
const TAG_ISOLATED: u64 = 6;
pub(crate) const TAG_EXACT_PLUS: u64 = 7;
pub(crate) const TAG_EXACT_MINUS: u64 = 8;

pub(crate) fn stream(seed: u64, graph: usize, tag: u64, sample: u64) -> StreamRng {
    StreamRng::substream(seed, &[graph as u64, tag, sample])
}

/// The classifier's view of the unperturbed graph.
#[derive(Clone, Debug)]
pub(crate) struct Reference {
    pub dist: ClassDistribution,
    pub label: usize,
    pub metric: Metric,
}

impl Reference {
    pub fn new(
        f: &dyn Classifier,
        lg: &LabeledGraph,
        index: usize,
        seed: u64,
        metric: Metric,
        source: LabelSource,
    ) -> Result<Self> {
        let dist = f.classify(&lg.graph, &mut stream(seed, index, TAG_ORIGINAL, 0))?;
        if dist.num_classes() != f.num_classes() {
            return invalid(format!(
                "classifier returned {} classes, declared {}",
                dist.num_classes(),
                f.num_classes()
            ));
        }
        let label = match source {
            LabelSource::TrueLabel => lg.label,
            LabelSource::Predicted => dist.argmax(),
        };
        if label >= f.num_classes() {
            return invalid(format!("label {label} out of range for {} classes", f.num_classes()));
        }
        Ok(Reference { dist, label, metric })
    }

    /// The fidelity term for one perturbed prediction.
    pub fn term(&self, perturbed: &ClassDistribution) -> f64 {
        match self.metric {
            Metric::Probability => self.dist.prob(self.label) - perturbed.prob(self.label),
            Metric::Accuracy => {
                let a = f64::from(u8::from(self.dist.argmax() == self.label));
                let b = f64::from(u8::from(perturbed.argmax() == self.label));
                (a - b).abs()
            }
        }
    }
}

fn check_pairs(data: &[(LabeledGraph, Explanation)]) -> Result<()> {
    for (i, (lg, e)) in data.iter().enumerate() {
        if !e.is_bound_to(&lg.graph) {
            return invalid(format!("explanation {i} is not a subset of its graph's edges"));
        }
    }
    Ok(())
}

/// Classifies the perturbed graphs; graphs equal to the original reuse the
/// original prediction so that "nothing changed" contributes exactly 0.
pub(crate) fn terms_for(
    f: &dyn Classifier,
    reference: &Reference,
    original: &Graph,
    perturbed: Vec<Graph>,
    mut rngs: Vec<StreamRng>,
) -> Result<Vec<f64>> {
    let mut changed = Vec::new();
    let mut changed_rngs = Vec::new();
    let mut slots = Vec::with_capacity(perturbed.len());
    for (g, r) in perturbed.into_iter().zip(rngs.drain(..)) {
        if g == *original {
            slots.push(None);
        } else {
            slots.push(Some(changed.len()));
            changed.push(g);
            changed_rngs.push(r);
        }
    }
    let dists = if changed.is_empty() { Vec::new() } else { f.classify_batch(&changed, &mut changed_rngs)? };
    Ok(slots
        .into_iter()
        .map(|s| match s {
            None => 0.0,
            Some(k) => reference.term(&dists[k]),
        })
        .collect())
}

/// Graphs for the plus side: the original minus a sample of explanation edges.
fn plus_graphs(lg: &LabeledGraph, e: &Explanation, i: usize, cfg: &FidelityConfig) -> (Vec<Graph>, Vec<StreamRng>) {
    (0..cfg.samples as u64)
        .map(|m| {
            let removed = sample_edges_unchecked(
                e.edges(),
                cfg.alpha1,
                cfg.mode,
                &mut stream(cfg.seed, i, TAG_PLUS_SAMPLE, m),
            );
            let g = lg.graph.with_edges_unchecked(lg.graph.edges().difference(&removed));
            (g, stream(cfg.seed, i, TAG_PLUS_CLASSIFY, m))
        })
        .unzip()
}

/// Graphs for the minus side: the explanation plus a sample of the other edges.
fn minus_graphs(lg: &LabeledGraph, e: &Explanation, i: usize, cfg: &FidelityConfig) -> (Vec<Graph>, Vec<StreamRng>) {
    let outside = lg.graph.edges().difference(e.edges());
    (0..cfg.samples as u64)
        .map(|m| {
            let kept = sample_edges_unchecked(
                &outside,
                cfg.alpha2,
                cfg.mode,
                &mut stream(cfg.seed, i, TAG_MINUS_SAMPLE, m),
            );
            let g = lg.graph.with_edges_unchecked(kept.union(e.edges()));
            (g, stream(cfg.seed, i, TAG_MINUS_CLASSIFY, m))
        })
        .unzip()
}

fn summarize(terms: &[f64]) -> (f64, f64) {
    let mut w = Welford::default();
    terms.iter().for_each(|&x| w.push(x));
    (w.mean, w.std())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sides {
    Plus,
    Minus,
    Both,
}

fn sampled(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
    sides: Sides,
) -> Result<Vec<GraphFidelity>> {
    cfg.validate()?;
    check_pairs(data)?;
    data.par_iter()
        .enumerate()
        .map(|(i, (lg, e))| {
            let reference = Reference::new(f, lg, i, cfg.seed, cfg.metric, cfg.label_source)?;
            let mut out = GraphFidelity::default();
            if sides != Sides::Minus {
                let (gs, rs) = plus_graphs(lg, e, i, cfg);
                (out.plus, out.plus_std) = summarize(&terms_for(f, &reference, &lg.graph, gs, rs)?);
            }
            if sides != Sides::Plus {
                let (gs, rs) = minus_graphs(lg, e, i, cfg);
                (out.minus, out.minus_std) = summarize(&terms_for(f, &reference, &lg.graph, gs, rs)?);
            }
            Ok(out)
        })
        .collect()
}

/// Fid+, Fid− and FidΔ: the explanation removed outright, and the
/// explanation alone on the original vertex set. Uses `cfg.metric`,
/// `cfg.seed` and `cfg.label_source`; the sampling fields are ignored.
pub fn fid_original(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
) -> Result<FidelityReport> {
    check_pairs(data)?;
    let per_graph = data
        .par_iter()
        .enumerate()
        .map(|(i, (lg, e))| {
            let reference = Reference::new(f, lg, i, cfg.seed, cfg.metric, cfg.label_source)?;
            let removed = remove_edges(&lg.graph, e)?;
            let isolated = e.as_graph(&lg.graph)?;
            let plus = terms_for(f, &reference, &lg.graph, vec![removed], vec![stream(cfg.seed, i, TAG_REMOVED, 0)])?[0];
            let minus =
                terms_for(f, &reference, &lg.graph, vec![isolated], vec![stream(cfg.seed, i, TAG_ISOLATED, 0)])?[0];
            Ok(GraphFidelity { plus, minus, plus_std: 0.0, minus_std: 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityReport::from_per_graph(Estimator::Original, *cfg, per_graph))
}

fn side(per_graph: &[GraphFidelity], plus: bool) -> SideEstimate {
    let pick = |g: &GraphFidelity| if plus { (g.plus, g.plus_std) } else { (g.minus, g.minus_std) };
    SideEstimate {
        value: mean(per_graph.iter().map(|g| pick(g).0)),
        per_graph: per_graph.iter().map(|g| pick(g).0).collect(),
        per_graph_std: per_graph.iter().map(|g| pick(g).1).collect(),
    }
}

/// Fid_{α1,+}: the mean over M samples of f(G)_y − f(G − E_{α1}(Ψ(G)))_y.
pub fn fid_alpha_plus(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
) -> Result<SideEstimate> {
    Ok(side(&sampled(f, data, cfg, Sides::Plus)?, true))
}

/// Fid_{α2,−}: the mean over M samples of f(G)_y − f(E_{α2}(G − Ψ(G)) + Ψ(G))_y.
pub fn fid_alpha_minus(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
) -> Result<SideEstimate> {
    Ok(side(&sampled(f, data, cfg, Sides::Minus)?, false))
}

/// Fid_{α1,+}, Fid_{α2,−} and their difference.
pub fn fid_alpha_delta(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
) -> Result<FidelityReport> {
    let per_graph = sampled(f, data, cfg, Sides::Both)?;
    Ok(FidelityReport::from_per_graph(Estimator::Sampled, *cfg, per_graph))
}

/// Accuracy-based classical and sampled fidelities.
pub fn fid_accuracy_variants(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
) -> Result<AccuracyFidelity> {
    let cfg = FidelityConfig { metric: Metric::Accuracy, ..*cfg };
    Ok(AccuracyFidelity {
        original: fid_original(f, data, &cfg)?,
        sampled: fid_alpha_delta(f, data, &cfg)?,
    })
}

#[cfg(test)]
mod tests;
