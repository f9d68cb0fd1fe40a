use std::fmt;

use serde::Serialize;

use super::elimination::{EliminationGraph, EliminationOrder};
use crate::graph::{VertexId, WeightedGraph};

/// A tree of bags. Node `i` carries `bags[i]`; `tree_edges` connect nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    bags: Vec<Vec<VertexId>>,
    tree_edges: Vec<(usize, usize)>,
    width: usize,
}

fn bag_width(bags: &[Vec<VertexId>]) -> usize {
    bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; the width is derived from them.
    pub fn new(bags: Vec<Vec<VertexId>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags: Vec<Vec<VertexId>> = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        let width = bag_width(&bags);
        TreeDecomposition {
            bags,
            tree_edges,
            width,
        }
    }

    /// Keeps a claimed width as-is, e.g. one read from a file, so that
    /// [`validate`] can check it.
    pub fn with_claimed_width(mut self, width: usize) -> Self {
        self.width = width;
        self
    }

    pub fn bags(&self) -> &[Vec<VertexId>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            if a < adj.len() && b < adj.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }
}

/// Builds the decomposition induced by an elimination order: the bag of `v`
/// is `v` plus its later-eliminated neighbours in the fill-in graph, and its
/// parent is the node of the earliest-eliminated vertex among those
/// neighbours. Components are chained together at their roots.
pub fn decomposition_from_order(g: &WeightedGraph, order: &EliminationOrder) -> TreeDecomposition {
    let mut elim = EliminationGraph::new(g);
    let n = elim.len();
    let mut position = vec![0usize; n];
    for (i, &v) in order.order().iter().enumerate() {
        position[elim.local[v]] = i;
    }
    let mut bags = Vec::with_capacity(n);
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    let mut roots = Vec::new();
    for (i, &v) in order.order().iter().enumerate() {
        let x = elim.local[v];
        let later = elim.eliminate(x);
        let mut bag: Vec<VertexId> = later.iter().map(|&y| elim.vertices[y as usize]).collect();
        match later.iter().map(|&y| position[y as usize]).min() {
            Some(parent) => tree_edges.push((i, parent)),
            None => roots.push(i),
        }
        bag.push(v);
        bags.push(bag);
    }
    for w in roots.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, tree_edges)
}

/// A failed Definition-1 condition, or a structural defect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// The node/edge structure is not a tree.
    NotATree {
        nodes: usize,
        edges: usize,
    },
    /// Tree edge references a node that does not exist.
    BadTreeEdge(usize, usize),
    /// Bag holds a vertex that is not in the graph.
    ForeignVertex {
        node: usize,
        vertex: VertexId,
    },
    /// Condition 1: vertex in no bag.
    MissingVertex(VertexId),
    /// Condition 2: edge covered by no bag.
    UncoveredEdge(VertexId, VertexId),
    /// Condition 3: the bags containing the vertex are not connected.
    DisconnectedOccurrence(VertexId),
    WidthMismatch {
        claimed: usize,
        actual: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree { nodes, edges } => write!(f, "{nodes} nodes and {edges} edges do not form a tree"),
            Violation::BadTreeEdge(a, b) => write!(f, "tree edge ({a}, {b}) references a missing node"),
            Violation::ForeignVertex { node, vertex } => write!(f, "bag {node} holds unknown vertex {vertex}"),
            Violation::MissingVertex(v) => write!(f, "condition 1: vertex {v} is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "condition 2: edge ({u}, {v}) is in no bag"),
            Violation::DisconnectedOccurrence(v) => write!(f, "condition 3: bags containing {v} are disconnected"),
            Violation::WidthMismatch { claimed, actual } => write!(f, "width {claimed} claimed, actual {actual}"),
        }
    }
}

/// Checks tree structure, conditions 1-3 and the width field. Returns every
/// violation found; an empty list means the decomposition is valid.
pub fn validate(g: &WeightedGraph, td: &TreeDecomposition) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = td.bags.len();

    let mut bad_edge = false;
    for &(a, b) in &td.tree_edges {
        if a >= k || b >= k || a == b {
            out.push(Violation::BadTreeEdge(a, b));
            bad_edge = true;
        }
    }
    let adj = td.tree_adjacency();
    if !bad_edge && k > 0 {
        let connected = {
            let mut seen = vec![false; k];
            let mut stack = vec![0];
            seen[0] = true;
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            count == k
        };
        if !connected || td.tree_edges.len() != k - 1 {
            out.push(Violation::NotATree {
                nodes: k,
                edges: td.tree_edges.len(),
            });
        }
    }

    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); g.universe()];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if g.contains_vertex(v) {
                occurrences[v].push(i);
            } else {
                out.push(Violation::ForeignVertex { node: i, vertex: v });
            }
        }
    }
    for &v in g.vertices() {
        if occurrences[v].is_empty() {
            out.push(Violation::MissingVertex(v));
        }
    }
    for e in g.edges() {
        let (a, b) = (&occurrences[e.u], &occurrences[e.v]);
        let (mut i, mut j) = (0, 0);
        let mut covered = false;
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Equal => {
                    covered = true;
                    break;
                }
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
            }
        }
        if !covered {
            out.push(Violation::UncoveredEdge(e.u, e.v));
        }
    }

    let mut mark = vec![usize::MAX; k];
    let mut stack = Vec::new();
    for &v in g.vertices() {
        let occ = &occurrences[v];
        if occ.len() <= 1 {
            continue;
        }
        for &i in occ {
            mark[i] = v;
        }
        let mut reached = 1;
        mark[occ[0]] = usize::MAX - 1;
        stack.push(occ[0]);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if mark[y] == v {
                    mark[y] = usize::MAX - 1;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != occ.len() {
            out.push(Violation::DisconnectedOccurrence(v));
        }
        for &i in occ {
            mark[i] = usize::MAX;
        }
    }

    let actual = bag_width(&td.bags);
    if actual != td.width {
        out.push(Violation::WidthMismatch {
            claimed: td.width,
            actual,
        });
    }
    out
}
