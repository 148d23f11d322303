//! Monotonicity of Fid_{α1,α2,Δ} in the reliability p of a stochastic Ψ.
//!
//! Ψ_p outputs the unique present motif with probability p and ∅ otherwise.
//! Graphs are drawn from the typical set, labels from the motif conditional,
//! and predictions come from f_δ. The same uniform decides Ψ_p for every p
//! and the samplers' streams do not depend on Ψ, so the p-grid shares its
//! random numbers.

use rand::Rng;
use serde::Serialize;

use crate::classifiers::{motif_conditional, ClassDistribution, MotifRule, NoisyClassifier, TypicalSet};
use crate::datasets::gen_er;
use crate::error::{invalid, Result};
use crate::fidelity::{fid_alpha_delta, FidelityConfig, LabelSource, Metric};
use crate::graph::{Explanation, Graph, LabeledGraph};
use crate::matching::Containment;
use crate::rng::StreamRng;
use crate::samplers::{check_prob, SampleMode};

/// Largest isotonic residual still read as monotone.
pub const PROP4_TOLERANCE: f64 = 0.01;

const TAG_DRAW: u64 = 0;
const TAG_PSI: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop4Row {
    pub p: f64,
    pub fid_plus: f64,
    pub fid_minus: f64,
    pub fid_delta: f64,
    /// Standard error of the FidΔ estimate over trials.
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop4Table {
    pub alpha1: f64,
    pub alpha2: f64,
    pub rows: Vec<Prop4Row>,
    /// Non-decreasing least-squares fit of FidΔ over the grid.
    pub isotonic_fit: Vec<f64>,
    pub max_violation: f64,
    pub non_decreasing: bool,
}

/// α1 = k/(2n²) and α2 = 1 − α1.
pub fn prop4_alphas(n: usize, k: usize) -> (f64, f64) {
    let a1 = k as f64 / (2.0 * (n * n) as f64);
    (a1, 1.0 - a1)
}

/// Pool-adjacent-violators fit of a non-decreasing sequence, equal weights.
pub fn isotonic_increasing(ys: &[f64]) -> Vec<f64> {
    // Blocks of (sum, count).
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(ys.len());
    for &y in ys {
        blocks.push((y, 1));
        while blocks.len() > 1 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 <= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    blocks.into_iter().flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c)).collect()
}

/// The default motif task: a 6-cycle on vertices 0..5 for class 0, a house
/// on 6..10 for class 1, equal priors and fixed-id containment. The typical
/// set holds `members` ER(n, edge_prob) graphs, alternately carrying one of
/// the motifs, with every eighth member left motif-free.
pub fn prop4_setup(n: usize, edge_prob: f64, members: usize, seed: u64) -> Result<(MotifRule, TypicalSet)> {
    if n < 11 {
        return invalid(format!("the default motifs need 11 vertices, got {n}"));
    }
    if members == 0 {
        return invalid("typical set needs at least one member");
    }
    let cycle = Graph::from_pairs(n, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)])?;
    let house = Graph::from_pairs(n, [(6, 7), (7, 8), (8, 9), (6, 9), (8, 10), (9, 10)])?;
    let rule = MotifRule::new(
        vec![cycle.clone(), house.clone()],
        ClassDistribution::uniform(2),
        Containment::FixedIds,
    )?;
    let mut rng = StreamRng::new(seed);
    let mut out = Vec::with_capacity(members);
    for j in 0..members {
        let base = gen_er(n, edge_prob, &mut rng)?;
        let g = match (j % 8 == 7, j % 2) {
            (true, _) => base,
            (false, 0) => base.with_edges(base.edges().union(cycle.edges()))?,
            (false, _) => base.with_edges(base.edges().union(house.edges()))?,
        };
        out.push(g);
    }
    Ok((rule, TypicalSet::new(out)?))
}

#[allow(clippy::too_many_arguments)]
pub fn prop4_monotonicity(
    rule: &MotifRule,
    ts: &TypicalSet,
    delta: f64,
    n: usize,
    k: usize,
    p_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Prop4Table> {
    if rule.mode() != Containment::FixedIds {
        return invalid("the explanation family needs fixed-id motifs");
    }
    if ts.num_nodes() != n {
        return invalid(format!("typical set has {} vertices, expected {n}", ts.num_nodes()));
    }
    let s1 = rule.motifs().iter().map(Graph::num_edges).min().unwrap_or(0);
    if k >= s1 {
        return invalid(format!("k = {k} must be below the smallest motif size {s1}"));
    }
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    for &p in p_grid {
        check_prob("p", p)?;
    }
    let (alpha1, alpha2) = prop4_alphas(n, k);
    let f = NoisyClassifier::new(rule.clone(), ts.clone(), delta)?;

    // Draw the trials once: graph, label, unique motif and Ψ's uniform.
    let mut draws = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = StreamRng::substream(seed, &[TAG_DRAW, t as u64]);
        let g = ts.members()[rng.random_range(0..ts.members().len())].clone();
        let cond = motif_conditional(rule, &g)?;
        let y = sample_class(&cond, &mut rng);
        let motif = rule.unique_motif(&g)?;
        let u: f64 = StreamRng::substream(seed, &[TAG_PSI, t as u64]).random();
        draws.push((LabeledGraph::new(g, y), motif, u));
    }

    let cfg = FidelityConfig {
        alpha1,
        alpha2,
        samples: 1,
        mode: SampleMode::Bernoulli,
        metric: Metric::Probability,
        seed,
        label_source: LabelSource::TrueLabel,
    };
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let data = draws
            .iter()
            .map(|(lg, motif, u)| {
                let e = match motif {
                    Some(y) if *u < p => Explanation::new(rule.motifs()[*y].edges().clone(), n)?,
                    _ => Explanation::empty(n),
                };
                Ok((lg.clone(), e))
            })
            .collect::<Result<Vec<_>>>()?;
        let report = fid_alpha_delta(&f, &data, &cfg)?;
        let deltas: Vec<f64> = report.per_graph.iter().map(|g| g.plus - g.minus).collect();
        let m = report.fid_delta;
        let var = deltas.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (deltas.len().max(2) - 1) as f64;
        rows.push(Prop4Row {
            p,
            fid_plus: report.fid_plus,
            fid_minus: report.fid_minus,
            fid_delta: m,
            std_err: (var / deltas.len() as f64).sqrt(),
        });
    }
    let ys: Vec<f64> = rows.iter().map(|r| r.fid_delta).collect();
    let isotonic_fit = isotonic_increasing(&ys);
    let max_violation = ys.iter().zip(&isotonic_fit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Prop4Table {
        alpha1,
        alpha2,
        rows,
        isotonic_fit,
        max_violation,
        non_decreasing: max_violation <= PROP4_TOLERANCE,
    })
}

fn sample_class(d: &ClassDistribution, rng: &mut StreamRng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (y, p) in d.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return y;
        }
    }
    d.num_classes() - 1
}
