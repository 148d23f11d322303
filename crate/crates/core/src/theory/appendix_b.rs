//! The distribution-shift example: ER(n, p) graphs with a planted n-cycle.
//!
//! Ψ1 explains with the cycle when it is present. Ψ2 returns a uniformly
//! random subset of more than n²p/4 edges, which says nothing about the
//! cycle. FidΔ is estimated on sampled graphs; the conditional information
//! is computed exactly on a small instance.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::Serialize;

use super::mi::{conditional_mi, output_conditional_mi, ExplanationFunction, GraphDistribution, MiTarget};
use crate::classifiers::{cycle_edges, typicality_threshold, AppendixBClassifier, ClassDistribution};
use crate::datasets::gen_appendix_b;
use crate::error::{invalid, Result};
use crate::fidelity::{fid_original, FidelityConfig, FidelityReport};
use crate::graph::{EdgeSet, Explanation};
use crate::rng::StreamRng;
use crate::samplers::{check_prob, uniform_subset};

const TAG_PSI2: u64 = 0xB2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixBResult {
    pub psi1: FidelityReport,
    pub psi2: FidelityReport,
    pub fid_delta_psi1: f64,
    pub fid_delta_psi2: f64,
    /// Fraction of sampled graphs with label 1.
    pub positive_rate: f64,
}

fn ln_binomial(m: usize, s: usize) -> f64 {
    (1..=s).map(|i| ((m - s + i) as f64 / i as f64).ln()).sum()
}

/// A uniformly random subset of more than `threshold` edges: the size is
/// drawn with weight C(|E|, s), then a subset of that size. Graphs with too
/// few edges give all of E.
pub fn large_random_subset(edges: &EdgeSet, threshold: f64, rng: &mut StreamRng) -> EdgeSet {
    let m = edges.len();
    let min = (threshold.floor() as usize).saturating_add(1);
    if min > m {
        return edges.clone();
    }
    let logs: Vec<f64> = (min..=m).map(|s| ln_binomial(m, s)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let s = min + WeightedIndex::new(&weights).expect("positive weights").sample(rng);
    uniform_subset(edges, s, rng)
}

/// FidΔ of Ψ1 and Ψ2 on `num_graphs` sampled graphs with the classical
/// estimator and the true labels.
pub fn appendix_b_experiment(n: usize, p: f64, q: f64, num_graphs: usize, seed: u64) -> Result<AppendixBResult> {
    if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
        return invalid(format!("p and q must lie in (0, 1), got p={p}, q={q}"));
    }
    let data = gen_appendix_b(n, p, q, num_graphs, seed)?;
    let f = AppendixBClassifier::new(n, p)?;
    let cycle = cycle_edges(n);
    let threshold = typicality_threshold(n, p);
    let mut with_psi1 = Vec::with_capacity(data.len());
    let mut with_psi2 = Vec::with_capacity(data.len());
    for (i, lg) in data.graphs.iter().enumerate() {
        let e1 = if cycle.is_subset(lg.graph.edges()) { cycle.clone() } else { EdgeSet::default() };
        let mut rng = StreamRng::substream(seed, &[TAG_PSI2, i as u64]);
        let e2 = large_random_subset(lg.graph.edges(), threshold, &mut rng);
        with_psi1.push((lg.clone(), Explanation::new(e1, n)?));
        with_psi2.push((lg.clone(), Explanation::new(e2, n)?));
    }
    let cfg = FidelityConfig { seed, ..FidelityConfig::default() };
    let psi1 = fid_original(&f, &with_psi1, &cfg)?;
    let psi2 = fid_original(&f, &with_psi2, &cfg)?;
    let positives = data.graphs.iter().filter(|g| g.label == 1).count();
    Ok(AppendixBResult {
        fid_delta_psi1: psi1.fid_delta,
        fid_delta_psi2: psi2.fid_delta,
        psi1,
        psi2,
        positive_rate: positives as f64 / data.len().max(1) as f64,
    })
}

/// The example's distribution on `n` vertices, enumerated exactly. Labels
/// carry P(planted | g) when g has at least n²p/4 edges and are 0 otherwise.
pub fn appendix_b_distribution(n: usize, p: f64, q: f64) -> Result<GraphDistribution> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    let cycle = cycle_edges(n);
    let slots = n * (n - 1) / 2;
    let free = slots - cycle.len();
    let threshold = typicality_threshold(n, p);
    let er = |k: usize, total: usize| p.powi(k as i32) * (1.0 - p).powi((total - k) as i32);
    let base = GraphDistribution::independent_edges(n, p, |_| Ok(ClassDistribution::uniform(2)))?;
    let mut support = Vec::with_capacity(base.len());
    let mut planted_post = Vec::with_capacity(base.len());
    for (g, _, _) in base.iter() {
        let unplanted = (1.0 - q) * er(g.num_edges(), slots);
        let planted = if cycle.is_subset(g.edges()) { q * er(g.num_edges() - cycle.len(), free) } else { 0.0 };
        let total = unplanted + planted;
        support.push((g.clone(), total));
        planted_post.push((g.edges().clone(), planted / total));
    }
    let post: std::collections::HashMap<EdgeSet, f64> = planted_post.into_iter().collect();
    GraphDistribution::new(support, |g| {
        let r = if g.num_edges() as f64 >= threshold { post[g.edges()] } else { 0.0 };
        ClassDistribution::new(vec![1.0 - r, r])
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AppendixBMi {
    pub n: usize,
    /// I(Ŷ; G | 1_Ψ) with Ŷ the example's classifier.
    pub mi_psi1: f64,
    pub mi_psi2: f64,
    /// The same with the true label.
    pub mi_true_psi1: f64,
    pub mi_true_psi2: f64,
    /// I(Ŷ; G | Ψ(G)), conditioning on the explanation itself.
    pub output_mi_psi1: f64,
    pub output_mi_psi2: f64,
}

/// Conditional information of Ψ1 and Ψ2 on the exact small-n distribution.
pub fn appendix_b_mi(n: usize, p: f64, q: f64) -> Result<AppendixBMi> {
    let dist = appendix_b_distribution(n, p, q)?;
    let f = AppendixBClassifier::new(n, p)?;
    let cycle = cycle_edges(n);
    let psi1 = ExplanationFunction::deterministic(&dist, |g| {
        if cycle.is_subset(g.edges()) {
            cycle.clone()
        } else {
            EdgeSet::default()
        }
    })?;
    let psi2 = ExplanationFunction::UniformSubsets { min_size: typicality_threshold(n, p).floor() as usize + 1 };
    Ok(AppendixBMi {
        n,
        mi_psi1: conditional_mi(&dist, &psi1, MiTarget::Classifier(&f))?,
        mi_psi2: conditional_mi(&dist, &psi2, MiTarget::Classifier(&f))?,
        mi_true_psi1: conditional_mi(&dist, &psi1, MiTarget::TrueLabel)?,
        mi_true_psi2: conditional_mi(&dist, &psi2, MiTarget::TrueLabel)?,
        output_mi_psi1: output_conditional_mi(&dist, &psi1, MiTarget::Classifier(&f))?,
        output_mi_psi2: output_conditional_mi(&dist, &psi2, MiTarget::Classifier(&f))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_sizes_exceed_threshold() {
        let edges = EdgeSet::from_pairs((0..12).map(|i| (i, i + 1))).unwrap();
        for s in 0..50 {
            let mut rng = StreamRng::new(s);
            let e = large_random_subset(&edges, 4.5, &mut rng);
            assert!(e.len() >= 5 && e.is_subset(&edges));
        }
        let mut rng = StreamRng::new(0);
        assert_eq!(large_random_subset(&edges, 20.0, &mut rng), edges);
    }

    #[test]
    fn size_weights_match_subset_counts() {
        // Over 4 edges with threshold 1.5, sizes 2, 3, 4 have 6, 4, 1 subsets.
        let edges = EdgeSet::from_pairs([(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut counts = [0usize; 5];
        for s in 0..22_000 {
            counts[large_random_subset(&edges, 1.5, &mut StreamRng::new(s)).len()] += 1;
        }
        for (k, want) in [(2, 6.0 / 11.0), (3, 4.0 / 11.0), (4, 1.0 / 11.0)] {
            let got = counts[k] as f64 / 22_000.0;
            assert!((got - want).abs() < 0.015, "size {k}: {got} vs {want}");
        }
    }

    #[test]
    fn psi1_is_near_zero_and_psi2_is_not_two_q_minus_one() {
        // Derived value for the literal construction: both terms are 1 on
        // label-1 graphs and 0 elsewhere for both explanations, so the two
        // FidΔ values are both close to 0.
        let r = appendix_b_experiment(30, 0.3, 0.75, 400, 5).unwrap();
        assert!(r.fid_delta_psi1.abs() < 0.05, "{}", r.fid_delta_psi1);
        assert!(r.fid_delta_psi2.abs() < 0.05, "{}", r.fid_delta_psi2);
        assert!((r.positive_rate - 0.75).abs() < 0.1);
    }

    #[test]
    fn small_distribution_is_normalized() {
        let d = appendix_b_distribution(5, 0.3, 0.75).unwrap();
        assert_eq!(d.len(), 1024);
        let planted_mass: f64 = d.iter().map(|(_, p, l)| p * l.prob(1)).sum();
        assert!(planted_mass > 0.0 && planted_mass < 0.75);
    }

    #[test]
    fn information_values_are_finite() {
        let m = appendix_b_mi(5, 0.3, 0.75).unwrap();
        for v in [m.mi_psi1, m.mi_psi2, m.mi_true_psi1, m.mi_true_psi2, m.output_mi_psi1, m.output_mi_psi2] {
            assert!(v.is_finite() && (0.0..=2f64.ln() + 1e-12).contains(&v));
        }
    }
}
