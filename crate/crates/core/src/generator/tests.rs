use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exact::dreyfus_wagner;
use crate::graph::{Edge, WeightedGraph};
use crate::synth;

fn instance(n: usize, edges: &[(usize, usize, u64)], terminals: &[usize]) -> SteinerInstance {
    let g = WeightedGraph::with_vertex_count(n, edges.iter().map(|&(u, v, w)| Edge::new(u, v, w))).unwrap();
    SteinerInstance::new(g, terminals.iter().copied()).unwrap()
}

fn unit_weights(inst: &SteinerInstance) -> Vec<f64> {
    inst.graph().edges().iter().map(|e| e.weight as f64).collect()
}

#[test]
fn single_terminal_gives_empty_tree() {
    let inst = instance(3, &[(0, 1, 4), (1, 2, 4)], &[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = sph_construct(&inst, &unit_weights(&inst), 1, &mut rng);
    assert_eq!(t.num_edges(), 0);
    assert_eq!(t.weight(), 0);
}

#[test]
fn path_with_terminal_ends_is_taken_whole() {
    let g = synth::path_graph(6);
    let inst = SteinerInstance::new(g, [0, 5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = sph_construct(&inst, &unit_weights(&inst), 5, &mut rng);
    assert_eq!(t.num_edges(), 5);
}

#[test]
fn sph_is_within_twice_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let inst = synth::random_connected_instance(&mut rng, 30, 50, 6, 1..=100);
        let opt = dreyfus_wagner(&inst, 12).unwrap().weight();
        let start = inst.terminals()[0];
        let t = sph_construct(&inst, &unit_weights(&inst), start, &mut rng);
        t.validate(&inst).unwrap();
        assert!(t.weight() >= opt);
        assert!(t.weight() <= 2 * opt, "sph {} vs opt {opt}", t.weight());
    }
}

#[test]
fn local_search_escapes_the_heavy_cycle_edge() {
    // 4-cycle 0-1-2-3 with the closing edge (0, 3) of weight 10, terminals
    // at opposite corners
    let inst = instance(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 10)], &[0, 2]);
    let heavy = inst.graph().edge_between(0, 3).unwrap();
    let mut weights = unit_weights(&inst);
    weights[heavy] = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = sph_construct(&inst, &weights, 0, &mut rng);
    assert_eq!(t.weight(), 11);
    // inserting vertex 1 gives MST 0-1-2-3 of weight 3, pruned to 0-1-2
    let better = local_search(&inst, &t, &mut rng);
    assert_eq!(better.weight(), 2);
}

#[test]
fn local_search_never_worsens() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let inst = synth::random_connected_instance(&mut rng, 40, 90, 8, 1..=50);
        let weights = perturbed_weights(&inst, 0.5, &mut rng);
        let start = inst.terminals()[0];
        let t = sph_construct(&inst, &weights, start, &mut rng);
        let improved = local_search(&inst, &t, &mut rng);
        improved.validate(&inst).unwrap();
        assert!(improved.weight() <= t.weight());
        // a local optimum is a fixed point
        assert_eq!(local_search(&inst, &improved, &mut rng).weight(), improved.weight());
    }
}

#[test]
fn optimal_tree_is_kept() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let inst = synth::random_connected_instance(&mut rng, 20, 40, 5, 1..=30);
        let opt = dreyfus_wagner(&inst, 12).unwrap();
        assert_eq!(local_search(&inst, &opt, &mut rng).weight(), opt.weight());
    }
}

#[test]
fn pool_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = synth::grid_with_holes(&mut rng, 12, 12, 3, 10, 1..=20);
    let cfg = GeneratorConfig {
        pool_size: 1,
        iterations_per_run: 1,
        perturbation_strength: 0.0,
        seed: 99,
    };
    assert_eq!(generate_pool(&inst, &cfg), generate_pool(&inst, &cfg));
    let cfg = GeneratorConfig {
        seed: 4,
        ..GeneratorConfig::default()
    };
    let pool = generate_pool(&inst, &cfg);
    assert_eq!(pool, generate_pool(&inst, &cfg));
    assert_eq!(pool, generate_pool_parallel(&inst, &cfg));
    for (s, p) in pool.iter() {
        s.validate(&inst).unwrap();
        assert_eq!(p.seed, derive_seed(4, p.run as u64));
    }
}

#[test]
fn duplicates_collapse() {
    // the unique optimum 0-1-2 is found by every run
    let inst = instance(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 5)], &[0, 2]);
    let pool = generate_pool(&inst, &GeneratorConfig::default());
    assert_eq!(pool.len(), 1);
    assert_eq!(pool.get(0).weight(), 2);
    assert_eq!(pool.provenance()[0].run, 0);
}

#[test]
fn invalid_configs_are_rejected() {
    let base = GeneratorConfig::default();
    assert!(base.validate().is_ok());
    assert_eq!(
        GeneratorConfig {
            pool_size: 0,
            ..base.clone()
        }
        .validate(),
        Err(GeneratorError::EmptyPool)
    );
    assert_eq!(
        GeneratorConfig {
            iterations_per_run: 0,
            ..base.clone()
        }
        .validate(),
        Err(GeneratorError::NoIterations)
    );
    assert!(GeneratorConfig {
        perturbation_strength: 1.0,
        ..base
    }
    .validate()
    .is_err());
}

#[test]
fn expired_deadline_still_yields_one_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = synth::random_connected_instance(&mut rng, 30, 60, 5, 1..=10);
    let out = generate_pool_until(&inst, &GeneratorConfig::default(), Some(Instant::now()), false);
    assert_eq!(out.pool.len(), 1);
    assert!(out.timed_out);
}

#[test]
fn pool_file_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let inst = synth::random_connected_instance(&mut rng, 25, 50, 5, 1..=40);
    let pool = generate_pool(
        &inst,
        &GeneratorConfig {
            seed: 2,
            ..Default::default()
        },
    );
    let text = write_pool(&inst, &pool);
    assert_eq!(read_pool(&inst, &text).unwrap(), pool);
}

#[test]
fn pool_file_errors() {
    let inst = instance(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 5)], &[0, 2]);
    let ok = "POOL 1\nSOLUTION 2 2\nE 1 2\nE 2 3\nEND\n";
    let pool = read_pool(&inst, ok).unwrap();
    assert_eq!(pool.get(0).weight(), 2);

    assert!(matches!(
        read_pool(&inst, "SOLUTION 3 2\nE 1 2\nE 2 3\nEND\n"),
        Err(PoolFileError::WeightMismatch {
            stated: 3,
            actual: 2,
            ..
        })
    ));
    assert!(matches!(
        read_pool(&inst, "SOLUTION 1 1\nE 1 4\nEND\n"),
        Err(PoolFileError::UnknownVertex { id: 4, .. })
    ));
    assert!(matches!(
        read_pool(&inst, "SOLUTION 1 1\nE 1 2\nEND\n"),
        Err(PoolFileError::Invalid { .. })
    ));
    assert!(matches!(
        read_pool(&inst, "POOL 2\nSOLUTION 5 1\nE 1 3\nEND\n"),
        Err(PoolFileError::CountMismatch { declared: 2, found: 1 })
    ));
    assert!(matches!(
        read_pool(&inst, "SOLUTION 5 1\nE 1 3\n"),
        Err(PoolFileError::Malformed { .. })
    ));
    assert_eq!(read_pool(&inst, "# nothing\n"), Err(PoolFileError::Empty));
}
