//! Steiner instances and Steiner tree solutions.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::dsu::Dsu;
use crate::graph::{EdgeId, GraphError, VertexId, Weight, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance has no terminals")]
    NoTerminals,
    #[error("terminal {0} is not a vertex of the graph")]
    TerminalOutOfRange(VertexId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("instance graph must use the dense vertex range 0..n")]
    SparseVertexSet,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionError {
    #[error("edge id {0} does not exist in the instance graph")]
    UnknownEdge(EdgeId),
    #[error("edge id {0} listed twice")]
    DuplicateEdge(EdgeId),
    #[error("edge set contains a cycle")]
    Cycle,
    #[error("edge set is not connected")]
    Disconnected,
    #[error("terminal {0} is not spanned")]
    MissingTerminal(VertexId),
    #[error("non-terminal leaf {0}")]
    NonTerminalLeaf(VertexId),
    #[error("terminals are not connected by the given edges")]
    TerminalsNotConnected,
    #[error("stated weight {stated} differs from edge weight sum {actual}")]
    WeightMismatch { stated: Weight, actual: Weight },
}

/// A connected weighted graph together with its terminal set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerInstance {
    name: String,
    graph: WeightedGraph,
    terminals: Vec<VertexId>,
    is_terminal: Vec<bool>,
    external_ids: Vec<u64>,
}

impl SteinerInstance {
    /// Validates connectivity and the terminal set. External ids default to
    /// the 1-based SteinLib convention.
    pub fn new(graph: WeightedGraph, terminals: impl IntoIterator<Item = VertexId>) -> Result<Self, InstanceError> {
        let n = graph.universe();
        if graph.num_vertices() != n {
            return Err(InstanceError::SparseVertexSet);
        }
        let mut is_terminal = vec![false; n];
        for t in terminals {
            if t >= n {
                return Err(InstanceError::TerminalOutOfRange(t));
            }
            is_terminal[t] = true;
        }
        let terminals: Vec<VertexId> = (0..n).filter(|&v| is_terminal[v]).collect();
        if terminals.is_empty() {
            return Err(InstanceError::NoTerminals);
        }
        if !graph.is_connected() {
            return Err(InstanceError::Disconnected);
        }
        Ok(SteinerInstance {
            name: String::new(),
            graph,
            terminals,
            is_terminal,
            external_ids: (1..=n as u64).collect(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces the internal → external id map used when reporting.
    ///
    /// # Panics
    /// If the map length differs from the vertex count.
    pub fn with_external_ids(mut self, ids: Vec<u64>) -> Self {
        assert_eq!(ids.len(), self.graph.universe());
        self.external_ids = ids;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// Sorted terminal ids.
    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.is_terminal[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn external_id(&self, v: VertexId) -> u64 {
        self.external_ids[v]
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    /// Looks up the internal id for an external (file) id.
    pub fn internal_id(&self, external: u64) -> Option<VertexId> {
        self.external_ids.iter().position(|&x| x == external)
    }

    /// The instance `STP(G_U, Q)` where `G_U` is formed by `edges` of this
    /// instance, relabelled onto a compact id range.
    pub fn restrict(&self, edges: &[EdgeId]) -> Result<Restriction, InstanceError> {
        let sub = self.graph.edge_subgraph(edges, &self.terminals);
        let (compact, to_host_vertex) = sub.compact();
        let mut local = vec![usize::MAX; self.graph.universe()];
        for (i, &v) in to_host_vertex.iter().enumerate() {
            local[v] = i;
        }
        let to_host_edge = compact
            .edges()
            .iter()
            .map(|e| {
                self.graph
                    .edge_between(to_host_vertex[e.u], to_host_vertex[e.v])
                    .expect("compact edge maps to a host edge")
            })
            .collect();
        let terminals: Vec<VertexId> = self.terminals.iter().map(|&t| local[t]).collect();
        let external = to_host_vertex.iter().map(|&v| self.external_ids[v]).collect();
        let instance = SteinerInstance::new(compact, terminals)?
            .with_name(self.name.clone())
            .with_external_ids(external);
        Ok(Restriction {
            instance,
            to_host_vertex,
            to_host_edge,
        })
    }
}

/// A restricted instance with maps back into its host.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub instance: SteinerInstance,
    pub to_host_vertex: Vec<VertexId>,
    pub to_host_edge: Vec<EdgeId>,
}

impl Restriction {
    pub fn lift(&self, solution: &SteinerSolution) -> SteinerSolution {
        let mut edges: Vec<EdgeId> = solution.edges.iter().map(|&e| self.to_host_edge[e]).collect();
        edges.sort_unstable();
        SteinerSolution {
            edges,
            weight: solution.weight,
        }
    }
}

/// A Steiner tree: a pruned tree spanning all terminals, given by host edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SteinerSolution {
    edges: Vec<EdgeId>,
    weight: Weight,
}

impl SteinerSolution {
    /// Validates that `edges` form a pruned Steiner tree of `instance`.
    pub fn new(instance: &SteinerInstance, mut edges: Vec<EdgeId>) -> Result<Self, SolutionError> {
        edges.sort_unstable();
        let m = instance.graph().num_edges();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(SolutionError::DuplicateEdge(w[0]));
            }
        }
        if let Some(&bad) = edges.iter().find(|&&e| e >= m) {
            return Err(SolutionError::UnknownEdge(bad));
        }
        let weight = instance.graph().total_weight(&edges);
        let sol = SteinerSolution { edges, weight };
        sol.validate(instance)?;
        Ok(sol)
    }

    /// Sorted host edge ids.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted vertex set of the tree (the single terminal for an empty tree).
    pub fn vertices(&self, instance: &SteinerInstance) -> Vec<VertexId> {
        if self.edges.is_empty() {
            return instance.terminals().to_vec();
        }
        let g = instance.graph();
        let mut vs: Vec<VertexId> = self
            .edges
            .iter()
            .flat_map(|&id| {
                let e = g.edge(id);
                [e.u, e.v]
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// The tree as a subgraph of the host graph.
    pub fn to_graph(&self, instance: &SteinerInstance) -> WeightedGraph {
        instance.graph().edge_subgraph(&self.edges, &self.vertices(instance))
    }

    /// Checks every solution invariant against `instance`.
    pub fn validate(&self, instance: &SteinerInstance) -> Result<(), SolutionError> {
        let g = instance.graph();
        if let Some(&bad) = self.edges.iter().find(|&&e| e >= g.num_edges()) {
            return Err(SolutionError::UnknownEdge(bad));
        }
        let actual = g.total_weight(&self.edges);
        if actual != self.weight {
            return Err(SolutionError::WeightMismatch {
                stated: self.weight,
                actual,
            });
        }
        if self.edges.is_empty() {
            return match instance.terminals() {
                [_] => Ok(()),
                [_, second, ..] => Err(SolutionError::MissingTerminal(*second)),
                [] => unreachable!("instances have at least one terminal"),
            };
        }
        let mut dsu = Dsu::new(g.universe());
        let mut degree = vec![0u32; g.universe()];
        for &id in &self.edges {
            let e = g.edge(id);
            if !dsu.union(e.u, e.v) {
                return Err(SolutionError::Cycle);
            }
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let vertices = self.vertices(instance);
        let root = dsu.find(vertices[0]);
        if vertices.iter().any(|&v| dsu.find(v) != root) {
            return Err(SolutionError::Disconnected);
        }
        if let Some(&t) = instance.terminals().iter().find(|&&t| degree[t] == 0) {
            return Err(SolutionError::MissingTerminal(t));
        }
        if let Some(&v) = vertices.iter().find(|&&v| degree[v] == 1 && !instance.is_terminal(v)) {
            return Err(SolutionError::NonTerminalLeaf(v));
        }
        Ok(())
    }
}

/// Canonical cleanup of a terminal-connecting edge set: minimum spanning tree
/// of the component holding the terminals, then repeated removal of
/// non-terminal leaves.
pub fn prune(instance: &SteinerInstance, edges: &[EdgeId]) -> Result<SteinerSolution, SolutionError> {
    let g = instance.graph();
    let n = g.universe();
    if let Some(&bad) = edges.iter().find(|&&e| e >= g.num_edges()) {
        return Err(SolutionError::UnknownEdge(bad));
    }
    let mut ids = edges.to_vec();
    ids.sort_unstable();
    ids.dedup();

    let mut dsu = Dsu::new(n);
    for &id in &ids {
        let e = g.edge(id);
        dsu.union(e.u, e.v);
    }
    let terminals = instance.terminals();
    let root = dsu.find(terminals[0]);
    if terminals.iter().any(|&t| dsu.find(t) != root) {
        return Err(SolutionError::TerminalsNotConnected);
    }
    ids.retain(|&id| dsu.find(g.edge(id).u) == root);
    let tree = g.spanning_forest(&ids);
    let kept = strip_nonterminal_leaves(instance, &tree);
    Ok(SteinerSolution {
        weight: g.total_weight(&kept),
        edges: kept,
    })
}

/// Removes non-terminal leaves until none remain. `tree` must be a forest.
pub(crate) fn strip_nonterminal_leaves(instance: &SteinerInstance, tree: &[EdgeId]) -> Vec<EdgeId> {
    let g = instance.graph();
    let n = g.universe();
    let mut degree = vec![0u32; n];
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &id in tree {
        let e = g.edge(id);
        degree[e.u] += 1;
        degree[e.v] += 1;
        incident[e.u].push(id);
        incident[e.v].push(id);
    }
    let mut removed = vec![false; g.num_edges()];
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| degree[v] == 1 && !instance.is_terminal(v)).collect();
    while let Some(v) = queue.pop_front() {
        if degree[v] != 1 {
            continue;
        }
        let id = *incident[v]
            .iter()
            .find(|&&id| !removed[id])
            .expect("leaf has one live edge");
        removed[id] = true;
        degree[v] = 0;
        let w = g.edge(id).other(v);
        degree[w] -= 1;
        if degree[w] == 1 && !instance.is_terminal(w) {
            queue.push_back(w);
        }
    }
    tree.iter().copied().filter(|&id| !removed[id]).collect()
}
