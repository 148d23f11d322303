//! Condition 1 and the well-behavedness biconditional.

use std::collections::BTreeMap;

use serde::Serialize;

use super::mi::{ExplanationFunction, GraphDistribution};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition1 {
    pub holds: bool,
    /// Support indices (i, j) with Ψ(g_i) ⊆ g_j but Ψ(g_j) ≠ Ψ(g_i).
    pub counterexample: Option<(usize, usize)>,
}

/// Whether Ψ(g) ⊆ g′ implies Ψ(g′) = Ψ(g) for every pair in the support.
pub fn check_condition1(psi: &ExplanationFunction, dist: &GraphDistribution) -> Result<Condition1> {
    let outs = psi.deterministic_outputs(dist)?;
    for (i, e) in outs.iter().enumerate() {
        for (j, other) in outs.iter().enumerate() {
            if e.is_subset(dist.graph(j).edges()) && other != e {
                return Ok(Condition1 { holds: false, counterexample: Some((i, j)) });
            }
        }
    }
    Ok(Condition1 { holds: true, counterexample: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WellBehaved<K> {
    pub holds: bool,
    pub violation: Option<(K, K)>,
}

/// True iff for every ordered pair, mi(a) ≤ mi(b) exactly when fid(b) ≤ fid(a).
pub fn check_well_behaved<K: Ord + Clone>(fid: &BTreeMap<K, f64>, mi: &BTreeMap<K, f64>) -> Result<WellBehaved<K>> {
    check_well_behaved_tol(fid, mi, 0.0)
}

/// As [`check_well_behaved`], with x ≤ y read as x ≤ y + tol on both sides.
pub fn check_well_behaved_tol<K: Ord + Clone>(
    fid: &BTreeMap<K, f64>,
    mi: &BTreeMap<K, f64>,
    tol: f64,
) -> Result<WellBehaved<K>> {
    if !fid.keys().eq(mi.keys()) {
        return invalid("fidelity and information maps have different keys");
    }
    for (a, &mi_a) in mi {
        for (b, &mi_b) in mi {
            if a == b {
                continue;
            }
            let better_info = mi_a <= mi_b + tol;
            let better_fid = fid[b] <= fid[a] + tol;
            if better_info != better_fid {
                return Ok(WellBehaved { holds: false, violation: Some((a.clone(), b.clone())) });
            }
        }
    }
    Ok(WellBehaved { holds: true, violation: None })
}
