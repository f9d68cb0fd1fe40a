use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exact::dreyfus_wagner;
use crate::generator::{generate_pool, GeneratorConfig, Provenance};
use crate::graph::{graph_union, Edge, WeightedGraph};
use crate::synth;

fn instance(n: usize, edges: &[(usize, usize, u64)], terminals: &[usize]) -> SteinerInstance {
    let g = WeightedGraph::with_vertex_count(n, edges.iter().map(|&(u, v, w)| Edge::new(u, v, w))).unwrap();
    SteinerInstance::new(g, terminals.iter().copied()).unwrap()
}

fn tree(inst: &SteinerInstance, pairs: &[(usize, usize)]) -> SteinerSolution {
    let ids = pairs
        .iter()
        .map(|&(u, v)| inst.graph().edge_between(u, v).unwrap())
        .collect();
    SteinerSolution::new(inst, ids).unwrap()
}

fn pool_of(trees: Vec<SteinerSolution>) -> SolutionPool {
    SolutionPool::new(trees.into_iter().enumerate().map(|(i, t)| {
        (
            t,
            Provenance {
                run: i,
                iteration: 0,
                seed: 0,
            },
        )
    }))
}

/// Two weight-9 trees whose union holds a weight-2 tree.
fn crossing_pair() -> (SteinerInstance, SolutionPool) {
    let inst = instance(
        5,
        &[(0, 1, 1), (0, 3, 4), (3, 2, 4), (0, 4, 4), (4, 1, 4), (1, 2, 1)],
        &[0, 1, 2],
    );
    let a = tree(&inst, &[(0, 1), (0, 3), (3, 2)]);
    let b = tree(&inst, &[(0, 4), (4, 1), (1, 2)]);
    (inst, pool_of(vec![a, b]))
}

#[test]
fn identical_trees_are_all_accepted() {
    let inst = SteinerInstance::new(synth::path_graph(5), [0, 4]).unwrap();
    let t = tree(&inst, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    // the pool drops repeats, so feed the same index several times
    let pool = pool_of(vec![t.clone()]);
    let sel = greedy_steiner_union(&inst, &pool, &[0, 0, 0], 1);
    assert_eq!(sel.accepted, vec![0, 0, 0]);
    assert_eq!(sel.edges, t.edges());
    assert_eq!(sel.width(), 1);
}

#[test]
fn second_spanning_tree_of_k4_breaks_width_two() {
    let g = synth::complete_graph(4);
    let inst = SteinerInstance::new(g, 0..4).unwrap();
    let a = tree(&inst, &[(0, 1), (1, 2), (2, 3)]);
    let b = tree(&inst, &[(1, 3), (0, 3), (0, 2)]);
    let pool = pool_of(vec![a, b]);
    let sel = greedy_steiner_union(&inst, &pool, &[0, 1], 2);
    assert_eq!(sel.accepted, vec![0]);
    let sel = greedy_steiner_union(&inst, &pool, &[0, 1], 3);
    assert_eq!(sel.accepted, vec![0, 1]);
    assert_eq!(sel.width(), 3);
    assert_eq!(sel.edges.len(), 6);
}

#[test]
fn no_ranking_rounds_keep_original_values() {
    let (inst, pool) = crossing_pair();
    let cfg = MergeConfig {
        r: 0,
        ..Default::default()
    };
    let out = ranking_procedure(&inst, &pool, &cfg).unwrap();
    for i in 0..pool.len() {
        assert_eq!(out.state.observations(i), &[pool.get(i).weight()]);
        assert_eq!(out.state.adjusted(i), pool.get(i).weight() as f64);
    }
    assert!(out.incumbent.is_none());
}

#[test]
fn good_unions_lower_adjusted_values() {
    let (inst, pool) = crossing_pair();
    let cfg = MergeConfig {
        r: 3,
        ..Default::default()
    };
    let out = ranking_procedure(&inst, &pool, &cfg).unwrap();
    for i in 0..2 {
        // Z = {9, 2, 2, 2}
        assert_eq!(out.state.observations(i), &[9, 2, 2, 2]);
        assert_eq!(out.state.adjusted_fraction(i), (15, 4));
    }
    assert_eq!(out.incumbent.as_ref().unwrap().0.weight(), 2);
    assert!(out.iterations.iter().all(|it| it.trees == 2 && it.value == Some(2)));
}

#[test]
fn adjusted_comparison_is_exact() {
    let (_, pool) = crossing_pair();
    let mut state = RankingState::new(&pool);
    // 9+1+1 over 3 against 9+2 over 2: 11/3 < 11/2
    state.record(&[0], 1);
    state.record(&[0], 1);
    state.record(&[1], 2);
    assert_eq!(state.cmp_adjusted(0, 1), std::cmp::Ordering::Less);
    assert_eq!(state.sorted_order(), vec![0, 1]);
    // equal means fall back to weight, then index
    let mut tied = RankingState::new(&pool);
    tied.record(&[0, 1], 3);
    assert_eq!(tied.sorted_order(), vec![0, 1]);
}

#[test]
fn single_tree_pool_is_returned_unchanged() {
    let inst = SteinerInstance::new(synth::path_graph(4), [0, 3]).unwrap();
    let t = tree(&inst, &[(0, 1), (1, 2), (2, 3)]);
    let report = run_smh(&inst, &pool_of(vec![t.clone()]), &MergeConfig::default()).unwrap();
    assert_eq!(report.solution, t);
    assert_eq!(report.trees_used(), 1);
    assert!(!report.improved());
}

#[test]
fn crossing_pair_merges_to_the_optimum() {
    let (inst, pool) = crossing_pair();
    let report = run_smh(&inst, &pool, &MergeConfig::default()).unwrap();
    assert_eq!(report.weight, 2);
    assert_eq!(report.source, SolutionSource::FinalDp);
    assert_eq!(report.trees_used(), 2);
    assert!(report.improved());
}

#[test]
fn whole_graph_union_gives_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let inst = synth::random_connected_instance(&mut rng, 10, 16, 10, 1..=20);
        let g = inst.graph();
        // one spanning tree through each edge covers the whole graph
        let trees: Vec<SteinerSolution> = (0..g.num_edges())
            .map(|e| {
                let mut ids: Vec<usize> = (0..g.num_edges()).collect();
                ids.retain(|&x| x != e);
                let mut forced = vec![e];
                forced.extend(ids);
                let mut dsu = crate::dsu::Dsu::new(g.universe());
                forced.retain(|&id| dsu.union(g.edge(id).u, g.edge(id).v));
                SteinerSolution::new(&inst, forced).unwrap()
            })
            .collect();
        let pool = pool_of(trees);
        let cfg = MergeConfig {
            r: 2,
            ..Default::default()
        };
        let report = run_smh(&inst, &pool, &cfg).unwrap();
        assert_eq!(report.final_step.union_edges, g.num_edges());
        assert_eq!(report.weight, dreyfus_wagner(&inst, 12).unwrap().weight());
    }
}

#[test]
fn rank_cap_above_final_cap_is_rejected() {
    let (inst, pool) = crossing_pair();
    let cfg = MergeConfig {
        k: 11,
        m: 10,
        ..Default::default()
    };
    assert_eq!(
        run_smh(&inst, &pool, &cfg).unwrap_err(),
        MergeError::RankWidthAboveFinal { k: 11, m: 10 }
    );
    let cfg = MergeConfig {
        k: 8,
        m: 24,
        ..Default::default()
    };
    assert!(matches!(cfg.validate(), Err(MergeError::WidthTooLarge { .. })));
}

#[test]
fn capacity_failure_falls_back_to_the_pool() {
    let (inst, pool) = crossing_pair();
    let cfg = MergeConfig {
        max_entries: 3,
        ..Default::default()
    };
    let report = run_smh(&inst, &pool, &cfg).unwrap();
    assert!(report.capacity_fallback);
    assert_eq!(report.final_step.status, DpStatus::Capacity);
    assert!(report.iterations.iter().all(|it| it.status == DpStatus::Capacity));
    assert_eq!(report.weight, 9);
    assert_eq!(report.source, SolutionSource::Pool { index: 0 });
}

#[test]
fn expired_deadline_still_reports_the_pool_best() {
    let (inst, pool) = crossing_pair();
    let cfg = MergeConfig {
        deadline: Some(Instant::now()),
        ..Default::default()
    };
    let report = run_smh(&inst, &pool, &cfg).unwrap();
    assert!(report.timed_out);
    assert!(report.iterations.is_empty());
    assert_eq!(report.weight, 9);
}

#[test]
fn larger_final_caps_never_hurt() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for round in 0..6 {
        let inst = synth::grid_with_holes(&mut rng, 10, 10, 2, 12, 1..=30);
        let pool = generate_pool(
            &inst,
            &GeneratorConfig {
                pool_size: 8,
                iterations_per_run: 2,
                seed: round,
                ..Default::default()
            },
        );
        let mut last = Weight::MAX;
        for m in [4, 6, 8] {
            let cfg = MergeConfig {
                m,
                k: 4,
                r: 4,
                seed: round,
                ..Default::default()
            };
            let w = run_smh(&inst, &pool, &cfg).unwrap().weight;
            assert!(w <= last, "m = {m}: {w} > {last}");
            last = w;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merge_dominates_the_pool(seed in any::<u64>(), n in 8usize..30, extra in 0usize..30, q in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = synth::random_connected_instance(&mut rng, n, n + extra, q, 1..=50);
        let pool = generate_pool(&inst, &GeneratorConfig { pool_size: 6, iterations_per_run: 2, seed, ..Default::default() });
        let cfg = MergeConfig { r: 4, seed, check_decompositions: true, ..Default::default() };
        let report = run_smh(&inst, &pool, &cfg).unwrap();
        report.solution.validate(&inst).unwrap();
        prop_assert!(report.weight <= pool.best().unwrap().weight());
        prop_assert_eq!(report.weight, report.solution.weight());
        for it in &report.iterations {
            prop_assert!(it.width <= cfg.k);
        }
        prop_assert!(report.final_step.width <= cfg.m);

        // the final union is exactly the union of the accepted trees
        let order = {
            let out = ranking_procedure(&inst, &pool, &cfg).unwrap();
            out.state.sorted_order()
        };
        let sel = greedy_steiner_union(&inst, &pool, &order, cfg.m);
        let graphs: Vec<WeightedGraph> = sel.accepted.iter().map(|&i| pool.get(i).to_graph(&inst)).collect();
        let refs: Vec<&WeightedGraph> = graphs.iter().collect();
        prop_assert_eq!(&graph_union(&refs).unwrap(), &sel.graph);
        prop_assert_eq!(sel.clone(), greedy_steiner_union(&inst, &pool, &order, cfg.m));
        prop_assert!(validate(&sel.graph, &decomposition_from_order(&sel.graph, &sel.order)).is_empty());
    }

    #[test]
    fn observation_counts_are_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = synth::random_connected_instance(&mut rng, 20, 35, 5, 1..=50);
        let pool = generate_pool(&inst, &GeneratorConfig { pool_size: 5, iterations_per_run: 1, seed, ..Default::default() });
        let cfg = MergeConfig { r: 5, seed, ..Default::default() };
        let out = ranking_procedure(&inst, &pool, &cfg).unwrap();
        for i in 0..pool.len() {
            let z = out.state.observations(i);
            prop_assert!(!z.is_empty() && z.len() <= cfg.r + 1);
            prop_assert_eq!(z[0], pool.get(i).weight());
        }
    }
}
