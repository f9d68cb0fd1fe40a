use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;

use crate::graph::{EdgeId, VertexId};
use crate::instance::{prune, SteinerInstance, SteinerSolution};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest path heuristic: starting from `start`, repeatedly connects the
/// nearest terminal not yet in the tree along a shortest path under
/// `weights` (one entry per edge of the instance graph). Ties between equally
/// near terminals are broken by `rng`. The result is pruned and weighed under
/// the instance's own weights.
///
/// # Panics
/// If `start` is not a terminal or `weights` has the wrong length.
pub fn sph_construct<R: Rng + ?Sized>(
    instance: &SteinerInstance,
    weights: &[f64],
    start: VertexId,
    rng: &mut R,
) -> SteinerSolution {
    let g = instance.graph();
    assert!(instance.is_terminal(start), "start vertex {start} is not a terminal");
    assert_eq!(weights.len(), g.num_edges(), "one weight per edge expected");
    let n = g.universe();

    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut in_tree = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(Dist, VertexId)>> = BinaryHeap::new();
    let mut edges: Vec<EdgeId> = Vec::new();

    let mut pending: Vec<VertexId> = instance.terminals().iter().copied().filter(|&t| t != start).collect();
    let add_source = |v: VertexId, dist: &mut [f64], heap: &mut BinaryHeap<_>| {
        dist[v] = 0.0;
        heap.push(Reverse((Dist(0.0), v)));
    };
    in_tree[start] = true;
    add_source(start, &mut dist, &mut heap);

    while !pending.is_empty() {
        // distances only ever decrease as the tree grows, so the search resumes
        while let Some(Reverse((Dist(d), x))) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for &(y, id) in g.neighbors(x) {
                let nd = d + weights[id];
                if nd < dist[y] {
                    dist[y] = nd;
                    pred[y] = Some((x, id));
                    heap.push(Reverse((Dist(nd), y)));
                }
            }
        }
        let best = pending.iter().map(|&t| dist[t]).fold(f64::INFINITY, f64::min);
        let tied: Vec<usize> = (0..pending.len()).filter(|&i| dist[pending[i]] == best).collect();
        let pick = tied[rng.random_range(0..tied.len())];
        let target = pending.swap_remove(pick);

        let mut v = target;
        while !in_tree[v] {
            in_tree[v] = true;
            add_source(v, &mut dist, &mut heap);
            let (u, id) = pred[v].expect("instance is connected");
            edges.push(id);
            v = u;
        }
    }
    prune(instance, &edges).expect("every terminal was attached")
}
