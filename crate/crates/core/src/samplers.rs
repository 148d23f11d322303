//! The edge sampler E_α and the explanation perturbation generator.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{EdgeSet, Explanation, Graph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// Each edge kept independently with probability α.
    Bernoulli,
    /// A uniform subset of exactly round(α·|E|) edges.
    #[default]
    Ratio,
}

impl std::str::FromStr for SampleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bernoulli" => Ok(SampleMode::Bernoulli),
            "ratio" => Ok(SampleMode::Ratio),
            other => Err(format!("unknown sample mode `{other}` (expected bernoulli or ratio)")),
        }
    }
}

/// round(α·n) with halves rounded up, clamped to [0, n].
///
/// The small guard absorbs representation error such as 0.1·40 = 4.000000000000001
/// or 0.7·10 = 6.999999999999999.
pub fn round_count(alpha: f64, n: usize) -> usize {
    let x = (alpha * n as f64 + 0.5 + 1e-9).floor();
    (x.max(0.0) as usize).min(n)
}

pub(crate) fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        invalid(format!("{name} must lie in [0, 1], got {p}"))
    }
}

pub fn sample_edges<R: Rng + ?Sized>(
    edges: &EdgeSet,
    alpha: f64,
    mode: SampleMode,
    rng: &mut R,
) -> Result<EdgeSet> {
    check_prob("alpha", alpha)?;
    Ok(sample_edges_unchecked(edges, alpha, mode, rng))
}

pub(crate) fn sample_edges_unchecked<R: Rng + ?Sized>(
    edges: &EdgeSet,
    alpha: f64,
    mode: SampleMode,
    rng: &mut R,
) -> EdgeSet {
    match mode {
        SampleMode::Bernoulli => {
            if alpha >= 1.0 {
                return edges.clone();
            }
            if alpha <= 0.0 {
                return EdgeSet::new();
            }
            edges.iter().copied().filter(|_| rng.random_bool(alpha)).collect()
        }
        SampleMode::Ratio => uniform_subset(edges, round_count(alpha, edges.len()), rng),
    }
}

/// A uniformly random subset of `edges` with exactly `k` elements.
pub fn uniform_subset<R: Rng + ?Sized>(edges: &EdgeSet, k: usize, rng: &mut R) -> EdgeSet {
    let n = edges.len();
    if k >= n {
        return edges.clone();
    }
    if k == 0 {
        return EdgeSet::new();
    }
    edges.select(index::sample(rng, n, k).into_vec())
}

/// Removes round(β1·|gt|) ground-truth edges and adds round(β2·|E∖gt|)
/// non-ground-truth edges, each chosen uniformly.
pub fn perturb_explanation<R: Rng + ?Sized>(
    g: &Graph,
    gt: &Explanation,
    beta1: f64,
    beta2: f64,
    rng: &mut R,
) -> Result<Explanation> {
    check_prob("beta1", beta1)?;
    check_prob("beta2", beta2)?;
    gt.ensure_bound_to(g)?;
    let keep = gt.len() - round_count(beta1, gt.len());
    let kept = uniform_subset(gt.edges(), keep, rng);
    let outside = g.edges().difference(gt.edges());
    let added = uniform_subset(&outside, round_count(beta2, outside.len()), rng);
    Explanation::new(kept.union(&added), g.num_nodes())
}
