use super::*;
use crate::classifiers::{Constant, ContainmentIndicator, MotifBayes, MotifRule};
use crate::datasets::{ba_cycle_motif, ba_house_motif, gen_ba2motifs};
use crate::graph::EdgeSet;
use crate::matching::Containment;
use crate::rng::StreamRng;
use proptest::prelude::*;

/// Soft, deterministic classifier: P(class 1) rises with the number of
/// edges among vertices 0..4.
struct Soft;

impl Classifier for Soft {
    fn num_classes(&self) -> usize {
        2
    }

    fn classify(&self, g: &Graph, _: &mut StreamRng) -> Result<ClassDistribution> {
        let k = g.edges().iter().filter(|e| e.v() < 4).count() as f64;
        let p = 1.0 / (1.0 + (-(k - 2.0)).exp());
        ClassDistribution::new(vec![1.0 - p, p])
    }
}

fn ba_bayes() -> MotifBayes {
    let rule = MotifRule::new(
        vec![ba_cycle_motif(), ba_house_motif()],
        ClassDistribution::uniform(2),
        Containment::FixedIds,
    )
    .unwrap();
    MotifBayes(rule)
}

fn lg(n: usize, pairs: &[(u32, u32)], label: usize) -> LabeledGraph {
    LabeledGraph::new(Graph::from_pairs(n, pairs.iter().copied()).unwrap(), label)
}

fn expl(n: usize, pairs: &[(u32, u32)]) -> Explanation {
    Explanation::new(EdgeSet::from_pairs(pairs.iter().copied()).unwrap(), n).unwrap()
}

fn ratio(alpha1: f64, alpha2: f64, samples: usize) -> FidelityConfig {
    FidelityConfig { alpha1, alpha2, samples, mode: SampleMode::Ratio, ..FidelityConfig::default() }
}

#[test]
fn constant_classifier_scores_zero() {
    let data = gen_ba2motifs(10, 1).unwrap().pairs();
    let f = Constant(ClassDistribution::new(vec![0.3, 0.7]).unwrap());
    let r = fid_original(&f, &data, &FidelityConfig::default()).unwrap();
    assert_eq!((r.fid_plus, r.fid_minus, r.fid_delta), (0.0, 0.0, 0.0));
    let r = fid_alpha_delta(&f, &data, &FidelityConfig::default()).unwrap();
    assert_eq!((r.fid_plus, r.fid_minus, r.fid_delta), (0.0, 0.0, 0.0));
    let acc = fid_accuracy_variants(&f, &data, &FidelityConfig::default()).unwrap();
    assert_eq!(acc.original.fid_delta, 0.0);
    assert_eq!(acc.sampled.fid_plus, 0.0);
}

#[test]
fn deterministic_containment_task() {
    // Y = 1 iff the triangle 0-1-2 is present; f is the same indicator.
    let tri = [(0, 1), (1, 2), (0, 2)];
    let f = ContainmentIndicator { motif: Graph::from_pairs(4, tri).unwrap(), mode: Containment::FixedIds };
    let data = vec![
        (lg(4, &[(0, 1), (1, 2), (0, 2), (2, 3)], 1), expl(4, &tri)),
        (lg(4, &[(0, 1), (1, 2), (0, 2)], 1), expl(4, &tri)),
        (lg(4, &[(0, 1), (2, 3)], 0), expl(4, &[])),
        (lg(4, &[(0, 1)], 0), expl(4, &[])),
    ];
    let r = fid_original(&f, &data, &FidelityConfig::default()).unwrap();
    assert_eq!(r.fid_plus, 0.5);
    assert_eq!(r.fid_minus, 0.0);
    let acc = fid_accuracy_variants(&f, &data, &FidelityConfig::default()).unwrap();
    assert_eq!(acc.original.fid_plus, 0.5);
    assert_eq!(acc.original.fid_minus, 0.0);
}

#[test]
fn two_graph_toy_by_hand() {
    let f = ba_bayes();
    let d = gen_ba2motifs(2, 3).unwrap();
    // Graph 0 is a house (label 1), graph 1 a cycle (label 0). The
    // explanation of the house drops its roof; the cycle's is empty.
    let (g0, g1) = (d.graphs[0].clone(), d.graphs[1].clone());
    let e0 = expl(25, &[(20, 21), (21, 22), (22, 23), (20, 23)]);
    let e1 = Explanation::empty(25);
    let data = vec![(g0, e0), (g1, e1)];
    // House: f(G)=1. G−Ψ lacks the square so no motif, prior tie → class 0,
    // term 1. Ψ alone is the square: no motif → class 0, term 1.
    // Cycle: f(G)=0 reads label 0 with prob 1. G−∅ = G, term 0. Ψ alone is
    // empty: class 0, term 0.
    let r = fid_original(&f, &data, &FidelityConfig::default()).unwrap();
    assert_eq!(r.per_graph[0].plus, 1.0);
    assert_eq!(r.per_graph[0].minus, 1.0);
    assert_eq!(r.per_graph[1].plus, 0.0);
    assert_eq!(r.per_graph[1].minus, 0.0);
    assert_eq!((r.fid_plus, r.fid_minus, r.fid_delta), (0.5, 0.5, 0.0));
}

#[test]
fn degenerate_alphas() {
    let data = gen_ba2motifs(20, 5).unwrap().pairs();
    for f in [&Soft as &dyn Classifier, &ba_bayes()] {
        for mode in [SampleMode::Ratio, SampleMode::Bernoulli] {
            let cfg = FidelityConfig { mode, ..ratio(0.0, 1.0, 7) };
            let r = fid_alpha_delta(f, &data, &cfg).unwrap();
            assert_eq!((r.fid_plus, r.fid_minus, r.fid_delta), (0.0, 0.0, 0.0));
        }
        let orig = fid_original(f, &data, &FidelityConfig::default()).unwrap();
        let full = fid_alpha_delta(f, &data, &ratio(1.0, 0.0, 5)).unwrap();
        assert_eq!(full.fid_plus, orig.fid_plus);
        assert_eq!(full.fid_minus, orig.fid_minus);
        assert_eq!(full.fid_delta, orig.fid_delta);
        assert_eq!(fid_alpha_plus(f, &data, &ratio(1.0, 0.0, 3)).unwrap().value, orig.fid_plus);
        assert_eq!(fid_alpha_minus(f, &data, &ratio(1.0, 0.0, 3)).unwrap().value, orig.fid_minus);
    }
}

#[test]
fn empty_explanation_contributes_zero_plus() {
    let data = vec![(lg(6, &[(0, 1), (1, 2), (2, 3)], 1), Explanation::empty(6))];
    let r = fid_alpha_delta(&Soft, &data, &ratio(0.5, 0.5, 20)).unwrap();
    assert_eq!(r.per_graph[0].plus, 0.0);
}

#[test]
fn unbound_explanations_are_rejected() {
    let data = vec![(lg(4, &[(0, 1)], 0), expl(4, &[(2, 3)]))];
    assert!(fid_original(&Soft, &data, &FidelityConfig::default()).is_err());
    assert!(fid_alpha_delta(&Soft, &data, &FidelityConfig::default()).is_err());
    assert!(fid_alpha_delta(&Soft, &[], &FidelityConfig { samples: 0, ..Default::default() }).is_err());
}

#[test]
fn accuracy_always_right_then_always_wrong() {
    // Right on any graph with an edge among 0..4, wrong on the rest; the
    // explanation holds every such edge.
    let data = vec![
        (lg(6, &[(0, 1), (1, 2), (2, 3), (4, 5)], 1), expl(6, &[(0, 1), (1, 2), (2, 3)])),
        (lg(6, &[(0, 2), (1, 3), (3, 4)], 1), expl(6, &[(0, 2), (1, 3)])),
    ];
    struct Any;
    impl Classifier for Any {
        fn num_classes(&self) -> usize {
            2
        }
        fn classify(&self, g: &Graph, _: &mut StreamRng) -> Result<ClassDistribution> {
            let y = usize::from(g.edges().iter().any(|e| e.v() < 4));
            Ok(ClassDistribution::one_hot(y, 2))
        }
    }
    let acc = fid_accuracy_variants(&Any, &data, &FidelityConfig::default()).unwrap();
    assert_eq!(acc.original.fid_plus, 1.0);
    assert_eq!(acc.original.fid_minus, 0.0);
}

/// Literal average over all removed subsets of one size.
fn brute_plus(f: &dyn Classifier, lg: &LabeledGraph, e: &Explanation, k: usize) -> f64 {
    let edges: Vec<_> = e.edges().iter().copied().collect();
    let mut rng = StreamRng::new(0);
    let base = f.classify(&lg.graph, &mut rng).unwrap().prob(lg.label);
    let (mut sum, mut count) = (0.0, 0);
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let removed: EdgeSet = (0..edges.len()).filter(|b| mask >> b & 1 == 1).map(|b| edges[b]).collect();
        let g = lg.graph.with_edges(lg.graph.edges().difference(&removed)).unwrap();
        sum += base - f.classify(&g, &mut rng).unwrap().prob(lg.label);
        count += 1;
    }
    sum / count as f64
}

#[test]
fn exact_oracle_matches_brute_force() {
    let g = lg(6, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 4), (4, 5)], 1);
    let e = expl(6, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
    let v = fid_alpha_exact(&Soft, &g, &e, 0.5, ExactSide::Plus, 0.0, 20).unwrap();
    assert!((v - brute_plus(&Soft, &g, &e, 2)).abs() < 1e-15);
    assert_eq!(fid_alpha_exact(&Soft, &g, &e, 0.0, ExactSide::Plus, 0.0, 20).unwrap(), 0.0);
    let orig = fid_original(&Soft, &[(g.clone(), e.clone())], &FidelityConfig::default()).unwrap();
    assert_eq!(fid_alpha_exact(&Soft, &g, &e, 1.0, ExactSide::Plus, 0.0, 20).unwrap(), orig.fid_plus);
    assert_eq!(fid_alpha_exact(&Soft, &g, &e, 0.0, ExactSide::Minus, 0.0, 20).unwrap(), orig.fid_minus);
    assert_eq!(fid_alpha_exact(&Soft, &g, &e, 1.0, ExactSide::Minus, 0.0, 20).unwrap(), 0.0);
    assert!(matches!(
        fid_alpha_exact(&Soft, &g, &e, 0.5, ExactSide::Plus, 0.0, 3),
        Err(crate::Error::TooLarge(_))
    ));
    // Sizes 1..=3 of 4: weights are per subset, 4 + 6 + 4 = 14 subsets.
    let mixed = fid_alpha_exact(&Soft, &g, &e, 0.5, ExactSide::Plus, 0.25, 20).unwrap();
    let by_hand = (4.0 * brute_plus(&Soft, &g, &e, 1) + 6.0 * brute_plus(&Soft, &g, &e, 2) + 4.0 * brute_plus(&Soft, &g, &e, 3)) / 14.0;
    assert!((mixed - by_hand).abs() < 1e-15);
}

#[test]
fn monte_carlo_tracks_exact() {
    let g = lg(7, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3), (3, 4), (4, 5), (5, 6)], 1);
    let e = expl(7, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)]);
    let data = vec![(g.clone(), e.clone())];
    let m = 4000;
    let r = fid_alpha_delta(&Soft, &data, &ratio(0.5, 2.0 / 3.0, m)).unwrap();
    let exact_plus = fid_alpha_exact(&Soft, &g, &e, 0.5, ExactSide::Plus, 0.0, 20).unwrap();
    let exact_minus = fid_alpha_exact(&Soft, &g, &e, 2.0 / 3.0, ExactSide::Minus, 0.0, 20).unwrap();
    let pg = r.per_graph[0];
    assert!((pg.plus - exact_plus).abs() <= 3.0 * pg.plus_std / (m as f64).sqrt() + 1e-12);
    assert!((pg.minus - exact_minus).abs() <= 3.0 * pg.minus_std / (m as f64).sqrt() + 1e-12);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let data = gen_ba2motifs(16, 2).unwrap().pairs();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fid_alpha_delta(&Soft, &data, &FidelityConfig { mode: SampleMode::Bernoulli, ..ratio(0.3, 0.6, 25) }).unwrap())
    };
    assert_eq!(run(1), run(4));
}

fn arb_case() -> impl Strategy<Value = (LabeledGraph, Explanation)> {
    (proptest::collection::vec((0u32..8, 0u32..8), 1..20), any::<u32>(), 0usize..2).prop_map(|(pairs, mask, y)| {
        let edges = EdgeSet::from_pairs(pairs.into_iter().filter(|(a, b)| a != b)).unwrap();
        let chosen: EdgeSet = edges.iter().enumerate().filter(|(i, _)| mask >> (i % 32) & 1 == 1).map(|(_, e)| *e).collect();
        let g = Graph::from_edges(8, edges).unwrap();
        (LabeledGraph::new(g, y), Explanation::new(chosen, 8).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_identities_hold(data in proptest::collection::vec(arb_case(), 1..6), seed: u64) {
        let orig = fid_original(&Soft, &data, &FidelityConfig { seed, ..Default::default() }).unwrap();
        let full = fid_alpha_delta(&Soft, &data, &FidelityConfig { seed, ..ratio(1.0, 0.0, 3) }).unwrap();
        prop_assert_eq!(full.fid_plus, orig.fid_plus);
        prop_assert_eq!(full.fid_minus, orig.fid_minus);
        let none = fid_alpha_delta(&Soft, &data, &FidelityConfig { seed, ..ratio(0.0, 1.0, 3) }).unwrap();
        prop_assert_eq!(none.fid_delta, 0.0);
    }

    #[test]
    fn values_are_in_range(data in proptest::collection::vec(arb_case(), 1..6), a1 in 0.0f64..=1.0, a2 in 0.0f64..=1.0) {
        let cfg = ratio(a1, a2, 5);
        let r = fid_alpha_delta(&Soft, &data, &cfg).unwrap();
        prop_assert_eq!(r.fid_delta, r.fid_plus - r.fid_minus);
        for v in [r.fid_plus, r.fid_minus] {
            prop_assert!((-1.0..=1.0).contains(&v));
        }
        let acc = fid_accuracy_variants(&Soft, &data, &cfg).unwrap();
        for v in [acc.original.fid_plus, acc.original.fid_minus, acc.sampled.fid_plus, acc.sampled.fid_minus] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
