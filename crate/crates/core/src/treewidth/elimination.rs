use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{VertexId, WeightedGraph};

/// Tie rule among minimum-degree candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    /// Smallest vertex id first.
    #[default]
    LowestId,
    HighestId,
    /// A fixed pseudo-random ranking of the vertices derived from the seed.
    Shuffled(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("order has {found} entries but the graph has {expected} vertices")]
    Length { expected: usize, found: usize },
    #[error("vertex {0} is not in the graph or appears twice")]
    NotAPermutation(VertexId),
}

/// A vertex permutation together with its elimination width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder {
    order: Vec<VertexId>,
    width: usize,
}

impl EliminationOrder {
    /// Replays an arbitrary permutation of `V(g)` to compute its width.
    pub fn from_order(g: &WeightedGraph, order: Vec<VertexId>) -> Result<Self, OrderError> {
        if order.len() != g.num_vertices() {
            return Err(OrderError::Length {
                expected: g.num_vertices(),
                found: order.len(),
            });
        }
        let mut elim = EliminationGraph::new(g);
        let mut seen = vec![false; g.universe()];
        let mut width = 0;
        for &v in &order {
            if !g.contains_vertex(v) || seen[v] {
                return Err(OrderError::NotAPermutation(v));
            }
            seen[v] = true;
            let local = elim.local[v];
            width = width.max(elim.eliminate(local).len());
        }
        Ok(EliminationOrder { order, width })
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    /// Largest degree of a vertex at the moment of its elimination.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn into_order(self) -> Vec<VertexId> {
        self.order
    }
}

/// Outcome of the width-capped greedy elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CappedWidth {
    /// The whole graph was eliminated without exceeding the cap.
    Within(EliminationOrder),
    /// Elimination stopped at the first vertex whose degree exceeded the cap.
    Exceeded { vertex: VertexId, degree: usize },
}

impl CappedWidth {
    pub fn width(&self) -> Option<usize> {
        match self {
            CappedWidth::Within(o) => Some(o.width()),
            CappedWidth::Exceeded { .. } => None,
        }
    }

    pub fn is_within(&self) -> bool {
        matches!(self, CappedWidth::Within(_))
    }

    pub fn into_order(self) -> Option<EliminationOrder> {
        match self {
            CappedWidth::Within(o) => Some(o),
            CappedWidth::Exceeded { .. } => None,
        }
    }
}

/// GreedyDegree: repeatedly eliminate a minimum degree vertex, turning its
/// neighbourhood into a clique. Ties go to the lowest vertex id.
pub fn greedy_degree(g: &WeightedGraph) -> EliminationOrder {
    greedy_degree_with(g, TieBreak::LowestId)
}

pub fn greedy_degree_with(g: &WeightedGraph, tie: TieBreak) -> EliminationOrder {
    match run_greedy(g, usize::MAX, tie) {
        CappedWidth::Within(o) => o,
        CappedWidth::Exceeded { .. } => unreachable!("uncapped elimination cannot exceed"),
    }
}

/// GreedyDegree with early abort once an elimination degree exceeds `max_width`.
pub fn greedy_degree_width_max_m(g: &WeightedGraph, max_width: usize) -> CappedWidth {
    run_greedy(g, max_width, TieBreak::LowestId)
}

pub fn greedy_degree_width_max_m_with(g: &WeightedGraph, max_width: usize, tie: TieBreak) -> CappedWidth {
    run_greedy(g, max_width, tie)
}

fn run_greedy(g: &WeightedGraph, cap: usize, tie: TieBreak) -> CappedWidth {
    let mut elim = EliminationGraph::new(g);
    let n = elim.len();
    let rank: Vec<usize> = match tie {
        TieBreak::LowestId => (0..n).collect(),
        TieBreak::HighestId => (0..n).rev().collect(),
        TieBreak::Shuffled(seed) => {
            let mut r: Vec<usize> = (0..n).collect();
            r.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            r
        }
    };
    let mut by_rank = vec![0usize; n];
    for (local, &r) in rank.iter().enumerate() {
        by_rank[r] = local;
    }
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|x| (elim.degree(x), rank[x])).collect();
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    while let Some((degree, r)) = queue.pop_first() {
        let x = by_rank[r];
        if degree > cap {
            return CappedWidth::Exceeded {
                vertex: elim.vertices[x],
                degree,
            };
        }
        width = width.max(degree);
        order.push(elim.vertices[x]);
        let before: Vec<(usize, usize)> = elim.adj[x]
            .iter()
            .map(|&y| (y as usize, elim.degree(y as usize)))
            .collect();
        elim.eliminate(x);
        for (y, old) in before {
            let new = elim.degree(y);
            if new != old {
                queue.remove(&(old, rank[y]));
                queue.insert((new, rank[y]));
            }
        }
    }
    CappedWidth::Within(EliminationOrder { order, width })
}

/// Working copy of a graph under vertex elimination, on compact local ids.
pub(crate) struct EliminationGraph {
    pub(crate) vertices: Vec<VertexId>,
    pub(crate) local: Vec<usize>,
    pub(crate) adj: Vec<Vec<u32>>,
}

impl EliminationGraph {
    pub(crate) fn new(g: &WeightedGraph) -> Self {
        let vertices = g.vertices().to_vec();
        let mut local = vec![usize::MAX; g.universe()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut ns: Vec<u32> = g.neighbors(v).iter().map(|&(w, _)| local[w] as u32).collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        EliminationGraph { vertices, local, adj }
    }

    pub(crate) fn len(&self) -> usize {
        self.vertices.len()
    }

    pub(crate) fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    /// Eliminates `x` and returns its neighbourhood at elimination time.
    pub(crate) fn eliminate(&mut self, x: usize) -> Vec<u32> {
        let nbrs = std::mem::take(&mut self.adj[x]);
        let mut merged = Vec::new();
        for &y in &nbrs {
            let y = y as usize;
            let own = std::mem::take(&mut self.adj[y]);
            merged.clear();
            merged.reserve(own.len() + nbrs.len());
            let (mut i, mut j) = (0, 0);
            while i < own.len() || j < nbrs.len() {
                let next = match (own.get(i), nbrs.get(j)) {
                    (Some(&a), Some(&b)) if a == b => {
                        i += 1;
                        j += 1;
                        a
                    }
                    (Some(&a), Some(&b)) if a < b => {
                        i += 1;
                        a
                    }
                    (Some(_), Some(&b)) => {
                        j += 1;
                        b
                    }
                    (Some(&a), None) => {
                        i += 1;
                        a
                    }
                    (None, Some(&b)) => {
                        j += 1;
                        b
                    }
                    (None, None) => unreachable!(),
                };
                if next as usize != x && next as usize != y {
                    merged.push(next);
                }
            }
            self.adj[y] = std::mem::replace(&mut merged, own);
        }
        nbrs
    }
}
