use rand::seq::SliceRandom;
use rand::Rng;

use crate::dsu::ScratchDsu;
use crate::graph::{EdgeId, VertexId, Weight, WeightedGraph};
use crate::instance::{SteinerInstance, SteinerSolution};

/// Scratch state for evaluating vertex sets. The current tree is always the
/// pruned minimum spanning tree of the subgraph induced by its own vertices.
struct Search<'a> {
    instance: &'a SteinerInstance,
    g: &'a WeightedGraph,
    dsu: ScratchDsu,
    degree: Vec<u32>,
    /// XOR of the live incident tree edges; names the last edge of a leaf.
    incident: Vec<usize>,
    in_set: Vec<bool>,
    /// Current tree edges, sorted by (weight, id).
    tree: Vec<EdgeId>,
    weight: Weight,
    /// Edges induced by the current vertex set, sorted by (weight, id).
    induced: Vec<EdgeId>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a SteinerInstance) -> Self {
        let g = instance.graph();
        let n = g.universe();
        Search {
            instance,
            g,
            dsu: ScratchDsu::new(n),
            degree: vec![0; n],
            incident: vec![0; n],
            in_set: vec![false; n],
            tree: Vec::new(),
            weight: 0,
            induced: Vec::new(),
        }
    }

    fn key(&self, id: EdgeId) -> (Weight, EdgeId) {
        (self.g.edge(id).weight, id)
    }

    /// Kruskal over `candidates` (sorted by key), restricted to the component
    /// of the terminals, then stripped of non-terminal leaves. `None` if the
    /// terminals end up in different components.
    fn evaluate(&mut self, candidates: impl Iterator<Item = EdgeId>) -> Option<(Vec<EdgeId>, Weight)> {
        let g = self.g;
        let mut forest: Vec<EdgeId> = candidates
            .filter(|&id| {
                let e = g.edge(id);
                self.dsu.union(e.u, e.v)
            })
            .collect();
        let terminals = self.instance.terminals();
        let root = self.dsu.find(terminals[0]);
        let connected = terminals.iter().all(|&t| self.dsu.find(t) == root);
        if connected {
            forest.retain(|&id| self.dsu.find(g.edge(id).u) == root);
        }
        self.dsu.reset();
        if !connected {
            return None;
        }

        for &id in &forest {
            let e = g.edge(id);
            for x in [e.u, e.v] {
                self.degree[x] += 1;
                self.incident[x] ^= id;
            }
        }
        let mut removed: Vec<EdgeId> = Vec::new();
        let mut stack: Vec<VertexId> = Vec::new();
        for &id in &forest {
            let e = g.edge(id);
            stack.extend(
                [e.u, e.v]
                    .into_iter()
                    .filter(|&x| self.degree[x] == 1 && !self.instance.is_terminal(x)),
            );
        }
        while let Some(x) = stack.pop() {
            if self.degree[x] != 1 {
                continue;
            }
            let id = self.incident[x];
            removed.push(id);
            let y = g.edge(id).other(x);
            self.degree[x] = 0;
            self.incident[x] = 0;
            self.degree[y] -= 1;
            self.incident[y] ^= id;
            if self.degree[y] == 1 && !self.instance.is_terminal(y) {
                stack.push(y);
            }
        }
        for &id in &forest {
            let e = g.edge(id);
            self.degree[e.u] = 0;
            self.degree[e.v] = 0;
            self.incident[e.u] = 0;
            self.incident[e.v] = 0;
        }
        if !removed.is_empty() {
            removed.sort_unstable();
            forest.retain(|id| removed.binary_search(id).is_err());
        }
        let weight = forest.iter().map(|&id| g.edge(id).weight).sum();
        Some((forest, weight))
    }

    fn vertices_of(&self, tree: &[EdgeId]) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = tree
            .iter()
            .flat_map(|&id| {
                let e = self.g.edge(id);
                [e.u, e.v]
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn set_vertices(&mut self, vertices: &[VertexId]) {
        self.in_set.iter_mut().for_each(|x| *x = false);
        for &v in vertices {
            self.in_set[v] = true;
        }
        self.induced.clear();
        for &v in vertices {
            for &(y, id) in self.g.neighbors(v) {
                if v < y && self.in_set[y] {
                    self.induced.push(id);
                }
            }
        }
        let g = self.g;
        self.induced.sort_unstable_by_key(|&id| (g.edge(id).weight, id));
    }

    /// Replaces the current state with the pruned MST of `G[vertices]`.
    fn reset_to(&mut self, vertices: &[VertexId]) {
        self.set_vertices(vertices);
        let induced = std::mem::take(&mut self.induced);
        let (tree, weight) = self
            .evaluate(induced.iter().copied())
            .expect("vertex set connects the terminals");
        self.induced = induced;
        self.accept(tree, weight);
    }

    fn accept(&mut self, tree: Vec<EdgeId>, weight: Weight) {
        let vertices = self.vertices_of(&tree);
        self.tree = tree;
        self.weight = weight;
        self.set_vertices(&vertices);
    }

    fn try_insert(&mut self, v: VertexId) -> Option<(Vec<EdgeId>, Weight)> {
        let g = self.g;
        let mut extra: Vec<EdgeId> = g
            .neighbors(v)
            .iter()
            .filter(|&&(y, _)| self.in_set[y])
            .map(|&(_, id)| id)
            .collect();
        if extra.len() < 2 {
            // v would be a leaf and pruned away again
            return None;
        }
        extra.sort_unstable_by_key(|&id| self.key(id));
        let tree = std::mem::take(&mut self.tree);
        let merged = merge_sorted(&tree, &extra, |id| (g.edge(id).weight, id));
        self.tree = tree;
        self.evaluate(merged.into_iter()).filter(|&(_, w)| w < self.weight)
    }

    fn try_remove(&mut self, v: VertexId) -> Option<(Vec<EdgeId>, Weight)> {
        let g = self.g;
        let induced = std::mem::take(&mut self.induced);
        let result = self.evaluate(induced.iter().copied().filter(|&id| {
            let e = g.edge(id);
            e.u != v && e.v != v
        }));
        self.induced = induced;
        result.filter(|&(_, w)| w < self.weight)
    }
}

fn merge_sorted<K: Ord>(a: &[EdgeId], b: &[EdgeId], key: impl Fn(EdgeId) -> K) -> Vec<EdgeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if key(a[i]) <= key(b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Improves `tree` by Steiner vertex insertions and removals until neither
/// move helps. Each move recomputes the pruned minimum spanning tree of the
/// induced vertex set and is taken on strict improvement; candidates are
/// scanned in an order shuffled by `rng`.
pub fn local_search<R: Rng + ?Sized>(
    instance: &SteinerInstance,
    tree: &SteinerSolution,
    rng: &mut R,
) -> SteinerSolution {
    if tree.num_edges() == 0 {
        return tree.clone();
    }
    let mut s = Search::new(instance);
    s.reset_to(&tree.vertices(instance));
    debug_assert!(s.weight <= tree.weight());

    loop {
        let mut candidates: Vec<VertexId> = Vec::new();
        let mut seen = vec![false; s.g.universe()];
        for v in s.vertices_of(&s.tree) {
            for &(y, _) in s.g.neighbors(v) {
                if !s.in_set[y] && !std::mem::replace(&mut seen[y], true) {
                    candidates.push(y);
                }
            }
        }
        candidates.shuffle(rng);
        let mut improved = candidates.iter().find_map(|&v| s.try_insert(v));

        if improved.is_none() {
            let mut steiner: Vec<VertexId> = s
                .vertices_of(&s.tree)
                .into_iter()
                .filter(|&v| !instance.is_terminal(v))
                .collect();
            steiner.shuffle(rng);
            improved = steiner.iter().find_map(|&v| s.try_remove(v));
        }
        match improved {
            Some((t, w)) => s.accept(t, w),
            None => break,
        }
    }
    SteinerSolution::new(instance, s.tree).expect("local search keeps a valid Steiner tree")
}
