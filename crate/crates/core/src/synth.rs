//! Synthetic graphs and Steiner instances for tests and desk-scale benchmarks.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rustc_hash::FxHashSet;

use crate::graph::{Edge, VertexId, Weight, WeightedGraph};
use crate::instance::SteinerInstance;

pub fn path_graph(n: usize) -> WeightedGraph {
    WeightedGraph::with_vertex_count(n, (1..n).map(|i| Edge::new(i - 1, i, 1))).unwrap()
}

/// # Panics
/// If `n < 3`.
pub fn cycle_graph(n: usize) -> WeightedGraph {
    assert!(n >= 3);
    WeightedGraph::with_vertex_count(n, (0..n).map(|i| Edge::new(i, (i + 1) % n, 1))).unwrap()
}

pub fn complete_graph(n: usize) -> WeightedGraph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v, 1)));
    WeightedGraph::with_vertex_count(n, edges).unwrap()
}

/// `rows x cols` grid with unit weights; vertex `(r, c)` has id `r * cols + c`.
pub fn grid_graph(rows: usize, cols: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push(Edge::new(v, v + 1, 1));
            }
            if r + 1 < rows {
                edges.push(Edge::new(v, v + cols, 1));
            }
        }
    }
    WeightedGraph::with_vertex_count(rows * cols, edges).unwrap()
}

/// Uniform random labelled tree (random attachment), unit weights.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightedGraph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges = (1..n).map(|i| Edge::new(perm[i], perm[rng.random_range(0..i)], 1));
    WeightedGraph::with_vertex_count(n, edges).unwrap()
}

fn pick_terminals<R: Rng + ?Sized>(rng: &mut R, pool: &[VertexId], q: usize) -> Vec<VertexId> {
    pool.choose_multiple(rng, q.min(pool.len()).max(1)).copied().collect()
}

/// Random connected graph: a random spanning tree plus extra random edges,
/// weights uniform in `weights`, `q` random terminals.
pub fn random_connected_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    q: usize,
    weights: std::ops::RangeInclusive<Weight>,
) -> SteinerInstance {
    assert!(n >= 1);
    let max_edges = n * (n - 1) / 2;
    let m = m.clamp(n - 1, max_edges);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut seen: FxHashSet<(usize, usize)> = FxHashSet::default();
    let mut edges = Vec::with_capacity(m);
    let mut add = |a: usize, b: usize, w: Weight, edges: &mut Vec<Edge>| {
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            edges.push(Edge::new(a, b, w));
        }
    };
    for i in 1..n {
        let w = rng.random_range(weights.clone());
        add(perm[i], perm[rng.random_range(0..i)], w, &mut edges);
    }
    while edges.len() < m {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let w = rng.random_range(weights.clone());
        add(a, b, w, &mut edges);
    }
    let g = WeightedGraph::with_vertex_count(n, edges).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let terminals = pick_terminals(rng, &all, q);
    SteinerInstance::new(g, terminals).unwrap()
}

/// Dense random instance with edge probability `density`.
pub fn dense_random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    density: f64,
    q: usize,
    weights: std::ops::RangeInclusive<Weight>,
) -> SteinerInstance {
    let m = ((n * (n - 1) / 2) as f64 * density).ceil() as usize;
    random_connected_instance(rng, n, m, q, weights)
}

/// VLSI-like instance: a `rows x cols` grid with `holes` random rectangular
/// obstacles removed, restricted to its largest component. Maximum degree 4.
pub fn grid_with_holes<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    holes: usize,
    q: usize,
    weights: std::ops::RangeInclusive<Weight>,
) -> SteinerInstance {
    let mut alive = vec![true; rows * cols];
    for _ in 0..holes {
        let h = rng.random_range(1..=(rows / 6).max(1));
        let w = rng.random_range(1..=(cols / 6).max(1));
        let r0 = rng.random_range(1..rows.saturating_sub(h).max(2));
        let c0 = rng.random_range(1..cols.saturating_sub(w).max(2));
        for r in r0..(r0 + h).min(rows) {
            for c in c0..(c0 + w).min(cols) {
                alive[r * cols + c] = false;
            }
        }
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if !alive[v] {
                continue;
            }
            if c + 1 < cols && alive[v + 1] {
                edges.push(Edge::new(v, v + 1, rng.random_range(weights.clone())));
            }
            if r + 1 < rows && alive[v + cols] {
                edges.push(Edge::new(v, v + cols, rng.random_range(weights.clone())));
            }
        }
    }
    let full = WeightedGraph::new(rows * cols, (0..rows * cols).filter(|&v| alive[v]), edges).unwrap();
    // largest component
    let mut comp = vec![usize::MAX; full.universe()];
    let mut best = (0usize, 0usize);
    for &s in full.vertices() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = s;
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for &(y, _) in full.neighbors(x) {
                if comp[y] == usize::MAX {
                    comp[y] = s;
                    stack.push(y);
                }
            }
        }
        if size > best.0 {
            best = (size, s);
        }
    }
    let keep: Vec<usize> = full.vertices().iter().copied().filter(|&v| comp[v] == best.1).collect();
    let edge_ids: Vec<usize> = (0..full.num_edges())
        .filter(|&id| comp[full.edge(id).u] == best.1)
        .collect();
    let (g, _) = full.edge_subgraph(&edge_ids, &keep).compact();
    let all: Vec<usize> = (0..g.num_vertices()).collect();
    let terminals = pick_terminals(rng, &all, q);
    SteinerInstance::new(g, terminals).unwrap()
}

/// Dense random instance with incidence weights: an edge with `t` terminal
/// endpoints weighs `100 (1 + t)` plus uniform noise of up to 10%. Many
/// trees then have nearly equal weight.
pub fn incidence_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, q: usize) -> SteinerInstance {
    let skeleton = dense_random_instance(rng, n, density, q, 1..=1);
    let g = skeleton.graph();
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            let t = skeleton.is_terminal(e.u) as u64 + skeleton.is_terminal(e.v) as u64;
            let base = 100 * (1 + t);
            Edge::new(e.u, e.v, rng.random_range(base - base / 10..=base + base / 10))
        })
        .collect();
    let g = WeightedGraph::with_vertex_count(n, edges).expect("same simple graph");
    SteinerInstance::new(g, skeleton.terminals().iter().copied()).expect("same connected graph")
}
