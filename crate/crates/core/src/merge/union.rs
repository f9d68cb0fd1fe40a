use crate::generator::SolutionPool;
use crate::graph::{EdgeId, WeightedGraph};
use crate::instance::SteinerInstance;
use crate::treewidth::{greedy_degree, greedy_degree_width_max_m, CappedWidth, EliminationOrder};

/// Pool members whose union has GreedyDegree width at most the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionSelection {
    /// Pool indices, in the order they were accepted.
    pub accepted: Vec<usize>,
    /// Sorted host edge ids of the union.
    pub edges: Vec<EdgeId>,
    /// The union as a subgraph of the host graph (host vertex ids).
    pub graph: WeightedGraph,
    /// GreedyDegree order of `graph`.
    pub order: EliminationOrder,
}

impl UnionSelection {
    pub fn width(&self) -> usize {
        self.order.width()
    }
}

fn merge_sorted(a: &[EdgeId], b: &[EdgeId]) -> Vec<EdgeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// Walks `order` over the pool and keeps each tree whose addition leaves the
/// union's GreedyDegree width at most `m`. The first tree is always kept.
///
/// # Panics
/// If `order` is empty or names an index outside the pool.
pub fn greedy_steiner_union(
    instance: &SteinerInstance,
    pool: &SolutionPool,
    order: &[usize],
    m: usize,
) -> UnionSelection {
    let g = instance.graph();
    let q = instance.terminals();
    let (&first, rest) = order.split_first().expect("order is nonempty");
    let mut edges = pool.get(first).edges().to_vec();
    let mut graph = g.edge_subgraph(&edges, q);
    let mut elim = greedy_degree(&graph);
    let mut accepted = vec![first];

    for &i in rest {
        let tree = pool.get(i).edges();
        if tree.iter().all(|e| edges.binary_search(e).is_ok()) {
            accepted.push(i);
            continue;
        }
        let tentative = merge_sorted(&edges, tree);
        let tentative_graph = g.edge_subgraph(&tentative, q);
        if let CappedWidth::Within(o) = greedy_degree_width_max_m(&tentative_graph, m) {
            edges = tentative;
            graph = tentative_graph;
            elim = o;
            accepted.push(i);
        }
    }
    UnionSelection {
        accepted,
        edges,
        graph,
        order: elim,
    }
}
