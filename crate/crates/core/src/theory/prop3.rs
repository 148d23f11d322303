//! Well-behavedness of FidΔ on a deterministic motif task, by enumeration.

use std::collections::BTreeMap;

use serde::Serialize;

use super::checks::{check_well_behaved_tol, WellBehaved};
use super::mi::{conditional_mi, exact_fidelity, ExplanationFunction, GraphDistribution, MiTarget};
use crate::classifiers::{ClassDistribution, ContainmentIndicator};
use crate::error::{invalid, Error, Result};
use crate::graph::{EdgeSet, Graph};
use crate::matching::Containment;
use crate::samplers::check_prob;

pub const PROP3_MAX_NODES: usize = 5;

/// Comparison slack for the biconditional; enumeration sums are exact to
/// far below this.
const ORDER_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop3Row {
    pub p: f64,
    pub fid_plus: f64,
    pub fid_minus: f64,
    pub fid_delta: f64,
    pub mi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop3Table {
    pub rows: Vec<Prop3Row>,
    /// P(Y = 1), the probability that the motif is present.
    pub p_positive: f64,
    pub well_behaved: bool,
    /// Grid indices of the first pair breaking the biconditional.
    pub violation: Option<(usize, usize)>,
}

/// Ψ_p on a motif task: the motif with probability p when present, ∅ otherwise.
pub fn psi_p(dist: &GraphDistribution, motif: &EdgeSet, p: f64) -> Result<ExplanationFunction> {
    ExplanationFunction::from_fn(dist, |g| {
        if !motif.is_subset(g.edges()) {
            vec![(EdgeSet::default(), 1.0)]
        } else if p >= 1.0 {
            vec![(motif.clone(), 1.0)]
        } else if p <= 0.0 {
            vec![(EdgeSet::default(), 1.0)]
        } else {
            vec![(motif.clone(), p), (EdgeSet::default(), 1.0 - p)]
        }
    })
}

/// Independent edges on `n ≤ 5` vertices with Y = 1 iff the motif (fixed ids)
/// is present and the classifier equal to that rule. For each p, exact
/// FidΔ and I(Ŷ; G | 1_{Ψ_p(G)}).
pub fn prop3_enumerate(n: usize, edge_prob: f64, motif: &Graph, p_grid: &[f64]) -> Result<Prop3Table> {
    if n > PROP3_MAX_NODES {
        return Err(Error::TooLarge(format!("n = {n} exceeds {PROP3_MAX_NODES}")));
    }
    if motif.num_nodes() > n {
        return invalid(format!("motif has {} vertices, graphs have {n}", motif.num_nodes()));
    }
    if motif.num_edges() == 0 {
        return invalid("motif has no edges");
    }
    for &p in p_grid {
        check_prob("p", p)?;
    }
    let motif = Graph::from_edges(n, motif.edges().clone())?;
    let edges = motif.edges().clone();
    let dist = GraphDistribution::independent_edges(n, edge_prob, |g| {
        Ok(ClassDistribution::one_hot(usize::from(edges.is_subset(g.edges())), 2))
    })?;
    let f = ContainmentIndicator { motif: motif.clone(), mode: Containment::FixedIds };
    let p_positive = dist.iter().map(|(_, p, l)| p * l.prob(1)).sum();

    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let psi = psi_p(&dist, &edges, p)?;
        let fid = exact_fidelity(&dist, &psi, &f)?;
        let mi = conditional_mi(&dist, &psi, MiTarget::Classifier(&f))?;
        rows.push(Prop3Row { p, fid_plus: fid.plus, fid_minus: fid.minus, fid_delta: fid.delta, mi });
    }
    let fid: BTreeMap<usize, f64> = rows.iter().map(|r| r.fid_delta).enumerate().collect();
    let mi: BTreeMap<usize, f64> = rows.iter().map(|r| r.mi).enumerate().collect();
    let WellBehaved { holds, violation } = check_well_behaved_tol(&fid, &mi, ORDER_TOL)?;
    Ok(Prop3Table { rows, p_positive, well_behaved: holds, violation })
}
