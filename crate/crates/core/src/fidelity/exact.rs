//! Exact evaluation of the typical-set estimator by subset enumeration.
//!
//! For a graph with ℓ candidate edges, every subset whose size k lies in
//! [ℓ(α−ε), ℓ(α+ε)] is visited once and the fidelity terms are averaged
//! with equal weight per subset. With ε = 0 and αℓ an integer this is the
//! expectation of the ratio-mode sampler.

use rayon::prelude::*;

use super::{stream, FidelityConfig, FidelityReport, GraphFidelity, LabelSource, Metric, Reference, TAG_EXACT_MINUS, TAG_EXACT_PLUS};
use crate::classifiers::Classifier;
use crate::error::{invalid, Error, Result};
use crate::graph::{EdgeSet, Explanation, Graph, LabeledGraph};
use crate::samplers::check_prob;

/// Largest ℓ enumerated by default (2^20 subsets).
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

const SIZE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Integer sizes k with ℓ(α−ε) ≤ k ≤ ℓ(α+ε), clamped to [0, ℓ].
pub fn admissible_sizes(l: usize, alpha: f64, eps: f64) -> std::ops::RangeInclusive<usize> {
    let lo = (l as f64 * (alpha - eps) - SIZE_SLACK).ceil().max(0.0) as usize;
    let hi = ((l as f64 * (alpha + eps) + SIZE_SLACK).floor().max(-1.0) as i64).min(l as i64);
    if hi < lo as i64 {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    lo..=hi as usize
}

/// Visits every k-subset of 0..l as a bitmask, in increasing numeric order.
fn for_each_subset(l: usize, k: usize, mut visit: impl FnMut(u32)) {
    if k == 0 {
        visit(0);
        return;
    }
    if k > l {
        return;
    }
    let limit: u64 = 1u64 << l;
    let mut x: u64 = (1u64 << k) - 1;
    while x < limit {
        visit(x as u32);
        // Gosper's hack: next integer with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
}

fn subset_of(edges: &EdgeSet, mask: u32) -> EdgeSet {
    edges.select((0..edges.len()).filter(|&b| mask >> b & 1 == 1).collect())
}

#[allow(clippy::too_many_arguments)]
fn exact_side(
    f: &dyn Classifier,
    lg: &LabeledGraph,
    expl: &Explanation,
    reference: &Reference,
    index: usize,
    seed: u64,
    alpha: f64,
    side: Side,
    eps: f64,
    cap: usize,
) -> Result<f64> {
    check_prob("alpha", alpha)?;
    if eps.is_nan() || eps < 0.0 {
        return invalid(format!("epsilon must be non-negative, got {eps}"));
    }
    expl.ensure_bound_to(&lg.graph)?;
    let outside = lg.graph.edges().difference(expl.edges());
    let pool = match side {
        Side::Plus => expl.edges(),
        Side::Minus => &outside,
    };
    let l = pool.len();
    if l > cap || l > 30 {
        return Err(Error::TooLarge(format!("{l} candidate edges exceed the enumeration cap of {cap}")));
    }
    let sizes = admissible_sizes(l, alpha, eps);
    if sizes.is_empty() {
        return invalid(format!("no subset size of {l} edges lies within α={alpha} ± ε={eps}"));
    }
    let tag = match side {
        Side::Plus => TAG_EXACT_PLUS,
        Side::Minus => TAG_EXACT_MINUS,
    };
    let mut masks = Vec::new();
    for k in sizes {
        for_each_subset(l, k, |m| masks.push(m));
    }
    let build = |mask: u32| -> Graph {
        let s = subset_of(pool, mask);
        match side {
            Side::Plus => lg.graph.with_edges_unchecked(lg.graph.edges().difference(&s)),
            Side::Minus => lg.graph.with_edges_unchecked(s.union(expl.edges())),
        }
    };
    let mut total = 0.0;
    for chunk in masks.chunks(4096) {
        let graphs: Vec<Graph> = chunk.iter().map(|&m| build(m)).collect();
        let rngs = chunk.iter().map(|&m| stream(seed, index, tag, u64::from(m))).collect();
        let terms = super::terms_for(f, reference, &lg.graph, graphs, rngs)?;
        total += terms.iter().sum::<f64>();
    }
    Ok(total / masks.len() as f64)
}

/// The typical-set estimate for one graph and one side, by enumeration.
///
/// The plus side enumerates removed subsets of the explanation; the minus
/// side enumerates kept subsets of the non-explanation edges, always adding
/// the explanation back. Fails with [`Error::TooLarge`] beyond `cap` edges.
pub fn fid_alpha_exact(
    f: &dyn Classifier,
    lg: &LabeledGraph,
    expl: &Explanation,
    alpha: f64,
    side: Side,
    eps: f64,
    cap: usize,
) -> Result<f64> {
    let reference = Reference::new(f, lg, 0, 0, Metric::Probability, LabelSource::TrueLabel)?;
    exact_side(f, lg, expl, &reference, 0, 0, alpha, side, eps, cap)
}

/// Dataset-level typical-set estimator for both sides. Sampling fields of
/// `cfg` other than the α's are ignored.
pub fn fid_typical_exact(
    f: &dyn Classifier,
    data: &[(LabeledGraph, Explanation)],
    cfg: &FidelityConfig,
    eps: f64,
    cap: usize,
) -> Result<FidelityReport> {
    let per_graph = data
        .par_iter()
        .enumerate()
        .map(|(i, (lg, e))| {
            let reference = Reference::new(f, lg, i, cfg.seed, cfg.metric, cfg.label_source)?;
            let plus = exact_side(f, lg, e, &reference, i, cfg.seed, cfg.alpha1, Side::Plus, eps, cap)?;
            let minus = exact_side(f, lg, e, &reference, i, cfg.seed, cfg.alpha2, Side::Minus, eps, cap)?;
            Ok(GraphFidelity { plus, minus, plus_std: 0.0, minus_std: 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityReport::from_per_graph(super::Estimator::TypicalExact, *cfg, per_graph))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration_counts() {
        for l in 0..10 {
            for k in 0..=l {
                let mut seen = Vec::new();
                for_each_subset(l, k, |m| seen.push(m));
                let binom = (0..k).fold(1u64, |a, i| a * (l - i) as u64 / (i as u64 + 1));
                assert_eq!(seen.len() as u64, binom, "l={l} k={k}");
                assert!(seen.iter().all(|m| m.count_ones() as usize == k && (*m as u64) < 1 << l));
                assert!(seen.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn admissible_ranges() {
        assert_eq!(admissible_sizes(4, 0.5, 0.0), 2..=2);
        assert_eq!(admissible_sizes(10, 0.3, 0.1), 2..=4);
        assert!(admissible_sizes(5, 0.5, 0.0).is_empty());
        assert_eq!(admissible_sizes(5, 0.5, 0.1), 2..=3);
        assert!(admissible_sizes(5, 0.5, 0.05).is_empty());
        assert_eq!(admissible_sizes(5, 0.5, 0.11), 2..=3);
        assert_eq!(admissible_sizes(6, 0.0, 0.0), 0..=0);
        assert_eq!(admissible_sizes(6, 1.0, 0.5), 3..=6);
        assert_eq!(admissible_sizes(0, 0.5, 0.0), 0..=0);
    }
}
