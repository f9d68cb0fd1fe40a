//! Simple undirected graphs with nonnegative integer edge weights.
//!
//! Vertex ids live in a fixed universe `0..universe`; a graph owns an explicit
//! subset of that universe so that subgraphs of one host instance (pool trees,
//! their unions) keep the host's ids and can be compared and merged directly.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::dsu::Dsu;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = u64;

/// An undirected edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Weight,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId, weight: Weight) -> Self {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Edge { u, v, weight }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("edge endpoint {0} is not a vertex of the graph")]
    UnknownEndpoint(VertexId),
    #[error("vertex {0} is outside the id universe of size {1}")]
    OutOfUniverse(VertexId, usize),
    #[error("edge {{{0}, {1}}} carries conflicting weights {2} and {3}")]
    WeightConflict(VertexId, VertexId, Weight, Weight),
}

/// A simple undirected weighted graph over a subset of `0..universe`.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    universe: usize,
    vertices: Vec<VertexId>,
    present: Vec<bool>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    index: FxHashMap<(VertexId, VertexId), EdgeId>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for WeightedGraph {}

impl WeightedGraph {
    /// Builds a graph from an explicit vertex set and edge list.
    ///
    /// Edges are re-sorted by endpoints, so edge ids are canonical for a given
    /// edge set.
    pub fn new(
        universe: usize,
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut present = vec![false; universe];
        for v in vertices {
            if v >= universe {
                return Err(GraphError::OutOfUniverse(v, universe));
            }
            present[v] = true;
        }
        let vertices: Vec<VertexId> = (0..universe).filter(|&v| present[v]).collect();
        let mut edges: Vec<Edge> = edges.into_iter().map(|e| Edge::new(e.u, e.v, e.weight)).collect();
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); universe];
        let mut index = FxHashMap::default();
        index.reserve(edges.len());
        for (id, e) in edges.iter().enumerate() {
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            for x in [e.u, e.v] {
                if x >= universe || !present[x] {
                    return Err(GraphError::UnknownEndpoint(x));
                }
            }
            if index.insert((e.u, e.v), id).is_some() {
                return Err(GraphError::ParallelEdge(e.u, e.v));
            }
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        Ok(WeightedGraph {
            universe,
            vertices,
            present,
            edges,
            adjacency,
            index,
        })
    }

    /// Graph on the full vertex range `0..n`.
    pub fn with_vertex_count(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        Self::new(n, 0..n, edges)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Sorted vertex ids.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v < self.universe && self.present[v]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.index.get(&key).copied()
    }

    pub fn weight_between(&self, a: VertexId, b: VertexId) -> Option<Weight> {
        self.edge_between(a, b).map(|id| self.edges[id].weight)
    }

    /// Sum of the weights of the given edges.
    pub fn total_weight(&self, ids: &[EdgeId]) -> Weight {
        ids.iter().map(|&id| self.edges[id].weight).sum()
    }

    pub fn total_edge_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.first() else {
            return true;
        };
        let mut seen = vec![false; self.universe];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.vertices.len()
    }

    /// Subgraph formed by the given edges, their endpoints and `extra` vertices.
    pub fn edge_subgraph(&self, ids: &[EdgeId], extra: &[VertexId]) -> WeightedGraph {
        let mut vertices = Vec::with_capacity(2 * ids.len() + extra.len());
        vertices.extend_from_slice(extra);
        for &id in ids {
            let e = self.edges[id];
            vertices.push(e.u);
            vertices.push(e.v);
        }
        WeightedGraph::new(self.universe, vertices, ids.iter().map(|&id| self.edges[id]))
            .expect("edge subgraph of a simple graph is simple")
    }

    /// Relabels the vertex set onto `0..num_vertices()`, preserving order.
    /// Returns the compact graph and the map from compact to original ids.
    pub fn compact(&self) -> (WeightedGraph, Vec<VertexId>) {
        let mut local = vec![usize::MAX; self.universe];
        for (i, &v) in self.vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = self.edges.iter().map(|e| Edge::new(local[e.u], local[e.v], e.weight));
        let g =
            WeightedGraph::with_vertex_count(self.vertices.len(), edges).expect("relabelling keeps the graph simple");
        (g, self.vertices.clone())
    }

    /// Minimum spanning forest of the given edge subset (Kruskal, ties by edge id).
    pub fn spanning_forest(&self, ids: &[EdgeId]) -> Vec<EdgeId> {
        let mut sorted: Vec<EdgeId> = ids.to_vec();
        sorted.sort_unstable_by_key(|&id| (self.edges[id].weight, id));
        let mut dsu = Dsu::new(self.universe);
        sorted.retain(|&id| dsu.union(self.edges[id].u, self.edges[id].v));
        sorted.sort_unstable();
        sorted
    }
}

/// Union of graphs that share one id space.
///
/// Fails if two operands disagree on the weight of a common edge.
pub fn graph_union(graphs: &[&WeightedGraph]) -> Result<WeightedGraph, GraphError> {
    let universe = graphs.iter().map(|g| g.universe).max().unwrap_or(0);
    let mut weights: FxHashMap<(VertexId, VertexId), Weight> = FxHashMap::default();
    let mut vertices = Vec::new();
    for g in graphs {
        vertices.extend_from_slice(&g.vertices);
        for e in &g.edges {
            match weights.get(&(e.u, e.v)) {
                Some(&w) if w != e.weight => return Err(GraphError::WeightConflict(e.u, e.v, w, e.weight)),
                Some(_) => {}
                None => {
                    weights.insert((e.u, e.v), e.weight);
                }
            }
        }
    }
    WeightedGraph::new(
        universe,
        vertices,
        weights.into_iter().map(|((u, v), w)| Edge::new(u, v, w)),
    )
}

/// Single-source shortest path tree.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    source: VertexId,
    dist: Vec<Option<Weight>>,
    pred: Vec<Option<(VertexId, EdgeId)>>,
}

impl ShortestPaths {
    pub fn source(&self) -> VertexId {
        self.source
    }

    /// `None` for unreachable vertices.
    pub fn distance(&self, v: VertexId) -> Option<Weight> {
        self.dist[v]
    }

    pub fn predecessor(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.pred[v]
    }

    /// Edges on the path from the source to `v`, listed from `v` backwards.
    pub fn path_edges(&self, mut v: VertexId) -> Option<Vec<EdgeId>> {
        self.dist[v]?;
        let mut path = Vec::new();
        while let Some((p, e)) = self.pred[v] {
            path.push(e);
            v = p;
        }
        Some(path)
    }
}

/// Dijkstra from `source`.
///
/// # Panics
/// If `source` is not a vertex of `g`.
pub fn shortest_paths(g: &WeightedGraph, source: VertexId) -> ShortestPaths {
    assert!(g.contains_vertex(source), "source {source} is not in the graph");
    let mut dist = vec![None; g.universe];
    let mut pred = vec![None; g.universe];
    let mut done = vec![false; g.universe];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0, source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, id) in g.neighbors(x) {
            let nd = d + g.edges[id].weight;
            if dist[y].is_none_or(|old| nd < old) {
                dist[y] = Some(nd);
                pred[y] = Some((x, id));
                heap.push(Reverse((nd, y)));
            }
        }
    }
    ShortestPaths { source, dist, pred }
}
