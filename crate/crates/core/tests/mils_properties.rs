use mils_core::bdm::{bdm, complexity, BinaryObject, EstimatorConfig};
use mils_core::graph::generators::{gnm, path};
use mils_core::graph::Graph;
use mils_core::mils::{
    info_contribution, info_rank, mils, mils_sequential, subset_search, EdgeDeletion, Execution, MilsError, NodeDeletion, NeutralityMode, Perturbable,
};
use mils_core::rng::seeded;
use proptest::prelude::*;

fn adjacency_bits(g: &Graph, cfg: &EstimatorConfig) -> f64 {
    complexity(&BinaryObject::Matrix(g.adjacency()), cfg).unwrap()
}

fn graph_strategy() -> impl Strategy<Value = (Graph, usize)> {
    (2usize..14, 0.1f64..0.9, any::<u64>(), 0.0f64..1.0).prop_map(|(n, density, seed, keep)| {
        let max = n * (n - 1) / 2;
        let g = gnm(n, ((density * max as f64) as usize).max(1), &mut seeded(seed));
        let target = (keep * g.edge_count() as f64) as usize;
        (g, target)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serial_and_parallel_agree((g, target) in graph_strategy()) {
        let cfg = EstimatorConfig::bundled();
        let a = mils(EdgeDeletion::new(g.clone(), &cfg), target, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap();
        let b = mils(EdgeDeletion::new(g, &cfg), target, &cfg, NeutralityMode::min_loss(), Execution::Parallel).unwrap();
        prop_assert_eq!(&a.trace, &b.trace);
        prop_assert_eq!(a.object.graph(), b.object.graph());
    }

    #[test]
    fn sweeps_shrink_the_graph((g, target) in graph_strategy()) {
        let cfg = EstimatorConfig::bundled();
        let m = g.edge_count();
        let out = mils(EdgeDeletion::new(g.clone(), &cfg), target, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap();
        prop_assert!(out.final_count() <= target);
        prop_assert!(out.trace.len() <= m - target);
        let mut alive = m;
        for (step, ranking) in out.trace.iter().zip(&out.rankings) {
            // the ranking covers exactly the surviving edges, least informative first
            prop_assert_eq!(ranking.len(), alive);
            prop_assert!(ranking.entries().windows(2).all(|w| w[0].bits <= w[1].bits));
            // all edges tied at the minimum go together, and nothing else
            let min = ranking.entries()[0].bits;
            let mut tied: Vec<usize> = ranking.entries().iter().filter(|e| e.bits == min).map(|e| e.id).collect();
            tied.sort_unstable();
            prop_assert_eq!(&step.deleted, &tied);
            prop_assert_eq!(step.contribution_bits, min);
            alive -= step.deleted.len();
        }
        prop_assert_eq!(alive, out.final_count());
        let kept = out.object.graph();
        prop_assert!(kept.edges().iter().all(|&(u, v)| g.has_edge(u, v)));
        prop_assert_eq!(kept.node_count(), g.node_count());
    }

    #[test]
    fn contributions_are_complexity_differences((g, _) in graph_strategy()) {
        let cfg = EstimatorConfig::bundled();
        let obj = EdgeDeletion::new(g.clone(), &cfg);
        let full = adjacency_bits(&g, &cfg);
        let ranking = info_rank(&obj, &cfg, Execution::Serial).unwrap();
        for e in ranking.entries() {
            let without = g.filter_edges(|id| id != e.id);
            let expected = full - adjacency_bits(&without, &cfg);
            prop_assert!((e.bits - expected).abs() < 1e-9, "{} vs {}", e.bits, expected);
        }
    }

    #[test]
    fn sequential_removes_one_smallest_edge_per_step((g, target) in graph_strategy()) {
        let cfg = EstimatorConfig::bundled();
        let out = mils_sequential(EdgeDeletion::new(g.clone(), &cfg), target, &cfg, Execution::Serial).unwrap();
        prop_assert_eq!(out.final_count(), target);
        prop_assert_eq!(out.trace.len(), g.edge_count() - target);
        for (step, ranking) in out.trace.iter().zip(&out.rankings) {
            let min = ranking.entries()[0].bits;
            let first = ranking.entries().iter().filter(|e| e.bits == min).map(|e| e.id).min().unwrap();
            prop_assert_eq!(&step.deleted, &vec![first]);
        }
    }

    #[test]
    fn any_estimator_plugs_in((g, target) in graph_strategy()) {
        let cfg = EstimatorConfig::block_entropy();
        let obj = EdgeDeletion::new(g.clone(), &cfg);
        let full = adjacency_bits(&g, &cfg);
        for id in 0..g.edge_count() {
            let expected = full - adjacency_bits(&g.filter_edges(|e| e != id), &cfg);
            prop_assert!((info_contribution(&obj, id, &cfg).unwrap() - expected).abs() < 1e-9);
        }
        let out = mils(obj, target, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap();
        prop_assert!(out.final_count() <= target);
    }
}

#[test]
fn path_of_three_keeps_the_more_informative_edge() {
    let cfg = EstimatorConfig::bundled();
    let g = path(3);
    let c = |h: &Graph| bdm(&BinaryObject::Matrix(h.adjacency()), &cfg).unwrap();
    let full = c(&g);
    let loss: Vec<f64> = (0..2).map(|id| full - c(&g.filter_edges(|e| e != id))).collect();
    let out = mils_sequential(EdgeDeletion::new(g.clone(), &cfg), 1, &cfg, Execution::Serial).unwrap();
    let expected = if loss[1] < loss[0] { 1 } else { 0 };
    assert_eq!(out.trace[0].deleted, vec![expected]);
    assert_eq!(out.trace[0].contribution_bits, loss[expected]);
    assert_eq!(out.object.graph().edge_count(), 1);
}

#[test]
fn subset_search_never_loses_more_than_single_deletions() {
    let cfg = EstimatorConfig::bundled();
    let mut rng = seeded(41);
    for _ in 0..30 {
        let g = gnm(6, 8, &mut rng);
        let obj = EdgeDeletion::new(g.clone(), &cfg);
        let base = obj.complexity(&cfg).unwrap();
        let single = info_rank(&obj, &cfg, Execution::Serial).unwrap().entries()[0].bits;
        let out = subset_search(EdgeDeletion::new(g, &cfg), 4, &cfg).unwrap();
        let first = &out.trace[0];
        let loss = base - obj.complexity_without(&first.deleted, &cfg).unwrap();
        assert!(loss <= single);
        assert_eq!(first.contribution_bits, loss);
        assert!(out.final_count() == 4);
    }
    let big = gnm(8, 13, &mut rng);
    assert!(matches!(subset_search(EdgeDeletion::new(big, &cfg), 1, &cfg), Err(MilsError::TooManyElements(13))));
}

#[test]
fn node_deletion_ranks_nodes() {
    let cfg = EstimatorConfig::bundled();
    let g = gnm(7, 12, &mut seeded(3));
    let obj = NodeDeletion::new(g.clone());
    assert_eq!(obj.element_ids(), (0..7).collect::<Vec<_>>());
    let out = mils(obj, 3, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap();
    assert!(out.final_count() <= 3);
}

#[test]
fn targets_beyond_the_edge_count_are_rejected() {
    let cfg = EstimatorConfig::bundled();
    let g = path(4);
    let err = mils(EdgeDeletion::new(g, &cfg), 4, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap_err();
    assert!(matches!(err, MilsError::TargetTooLarge { target: 4, count: 3 }));
}
