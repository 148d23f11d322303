//! Rank statistics.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::graph::{Edge, EdgeSet};

/// 1-based ranks, tied values sharing their mean rank.
pub fn mean_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's coefficient: Pearson correlation of mean ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return invalid(format!("length mismatch: {} vs {}", xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return invalid("need at least two observations");
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return invalid("NaN in input");
    }
    pearson(&mean_ranks(xs), &mean_ranks(ys))
        .ok_or_else(|| Error::UndefinedCorrelation("one side is constant".into()))
}

/// The probability that a random positive edge outscores a random negative
/// one, ties counting one half. Edges missing from `scores` score 0.
pub fn auc_edges(scores: &BTreeMap<Edge, f64>, positives: &EdgeSet, universe: &EdgeSet) -> Result<f64> {
    if !positives.is_subset(universe) {
        return invalid("positives must lie inside the universe");
    }
    let n_pos = positives.len();
    let n_neg = universe.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc(format!("{n_pos} positive and {n_neg} negative edges")));
    }
    let values: Vec<f64> = universe.iter().map(|e| scores.get(e).copied().unwrap_or(0.0)).collect();
    let ranks = mean_ranks(&values);
    let rank_sum: f64 = universe.iter().zip(&ranks).filter(|(e, _)| positives.contains(e)).map(|(_, r)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

/// AUC of a hard edge selection: selected edges score 1, the rest 0.
pub fn auc_selection(selected: &EdgeSet, positives: &EdgeSet, universe: &EdgeSet) -> Result<f64> {
    let scores = selected.iter().map(|e| (*e, 1.0)).collect();
    auc_edges(&scores, positives, universe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap() + 0.5).abs() < 1e-12);
        assert!(matches!(spearman(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(spearman(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ties_share_ranks() {
        assert_eq!(mean_ranks(&[5.0, 1.0, 5.0, 3.0]), vec![3.5, 1.0, 3.5, 2.0]);
        // Textbook value with ties: ranks x = (1, 2.5, 2.5, 4), y = (1, 2, 3, 4).
        let r = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((r - 4.5 / (4.5f64 * 5.0).sqrt()).abs() < 1e-12);
    }

    fn edges(pairs: &[(u32, u32)]) -> EdgeSet {
        EdgeSet::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn auc_examples() {
        let uni = edges(&[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let pos = edges(&[(0, 1), (1, 2)]);
        let score = |v: [f64; 4]| -> BTreeMap<Edge, f64> { uni.iter().copied().zip(v).collect() };
        assert_eq!(auc_edges(&score([0.9, 0.8, 0.1, 0.2]), &pos, &uni).unwrap(), 1.0);
        assert_eq!(auc_edges(&score([0.5; 4]), &pos, &uni).unwrap(), 0.5);
        assert_eq!(auc_edges(&score([0.9, 0.3, 0.5, 0.1]), &pos, &uni).unwrap(), 0.75);
        assert!(matches!(auc_edges(&score([0.0; 4]), &uni, &uni), Err(Error::UndefinedAuc(_))));
        assert!(auc_edges(&BTreeMap::new(), &edges(&[(7, 8)]), &uni).is_err());
        assert_eq!(auc_selection(&pos, &pos, &uni).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn spearman_is_rank_invariant(xs in proptest::collection::vec(-5.0f64..5.0, 3..12), seed in any::<u64>()) {
            let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| (x * 3.1 + (i as f64) * ((seed % 7) as f64)).sin()).collect();
            if let Ok(r) = spearman(&xs, &ys) {
                prop_assert!((-1.0..=1.0).contains(&r));
                let tx: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
                let ty: Vec<f64> = ys.iter().map(|y| 2.0 * y + 1.0).collect();
                prop_assert!((spearman(&tx, &ty).unwrap() - r).abs() < 1e-12);
            }
        }

        #[test]
        fn auc_flips_with_sign(vals in proptest::collection::vec(-3i32..3, 6)) {
            let uni = edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
            let pos = edges(&[(0, 1), (2, 3)]);
            let s: BTreeMap<Edge, f64> = uni.iter().copied().zip(vals.iter().map(|&v| v as f64)).collect();
            let neg: BTreeMap<Edge, f64> = s.iter().map(|(e, v)| (*e, -v)).collect();
            let a = auc_edges(&s, &pos, &uni).unwrap();
            prop_assert!((a + auc_edges(&neg, &pos, &uni).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
