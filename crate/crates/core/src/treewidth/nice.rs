use std::fmt;

use serde::Serialize;

use super::decomposition::{validate, TreeDecomposition, Violation};
use crate::graph::{VertexId, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NiceKind {
    /// Bag `{anchor}`, no children.
    Leaf,
    IntroduceVertex(VertexId),
    /// Edge `(u, v)` with `u < v`; bag equals the child's bag.
    IntroduceEdge(VertexId, VertexId),
    Forget(VertexId),
    /// Two children with the same bag as this node.
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted bag.
    pub bag: Vec<VertexId>,
    pub children: Vec<usize>,
}

/// A rooted nice decomposition whose every bag contains the anchor vertex.
///
/// Nodes are stored in post-order: children precede their parent and the
/// root is the last node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NiceDecomposition {
    pub(crate) nodes: Vec<NiceNode>,
    anchor: VertexId,
}

impl NiceDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// The vertex present in every bag.
    pub fn anchor(&self) -> VertexId {
        self.anchor
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn max_bag_size(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    /// The underlying (non-nice) decomposition: same bags, parent-child edges.
    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.children.iter().map(move |&c| (c, i)))
            .collect();
        TreeDecomposition::new(bags, edges)
    }
}

struct Builder<'g> {
    g: &'g WeightedGraph,
    anchor: VertexId,
    nodes: Vec<NiceNode>,
    introduced: Vec<bool>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NiceKind, bag: Vec<VertexId>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn leaf(&mut self) -> usize {
        self.push(NiceKind::Leaf, vec![self.anchor], vec![])
    }

    fn introduce(&mut self, top: usize, v: VertexId) -> usize {
        let mut bag = self.nodes[top].bag.clone();
        let at = bag.binary_search(&v).expect_err("introduced vertex is new to the bag");
        bag.insert(at, v);
        self.push(NiceKind::IntroduceVertex(v), bag, vec![top])
    }

    /// Introduces every edge between `v` and the rest of the bag, then forgets `v`.
    fn forget(&mut self, mut top: usize, v: VertexId) -> usize {
        let bag = self.nodes[top].bag.clone();
        for &y in &bag {
            if y == v {
                continue;
            }
            if let Some(id) = self.g.edge_between(v, y) {
                if !self.introduced[id] {
                    self.introduced[id] = true;
                    let (a, b) = if v < y { (v, y) } else { (y, v) };
                    top = self.push(NiceKind::IntroduceEdge(a, b), bag.clone(), vec![top]);
                }
            }
        }
        let mut smaller = bag;
        smaller.retain(|&x| x != v);
        self.push(NiceKind::Forget(v), smaller, vec![top])
    }

    /// Walks the chain at `top` to exactly `target` (sorted).
    fn morph(&mut self, mut top: usize, target: &[VertexId]) -> usize {
        let current = self.nodes[top].bag.clone();
        for &v in &current {
            if target.binary_search(&v).is_err() {
                top = self.forget(top, v);
            }
        }
        for &v in target {
            if current.binary_search(&v).is_err() {
                top = self.introduce(top, v);
            }
        }
        top
    }
}

/// Refines a valid decomposition of `g` into a nice decomposition rooted at
/// bag `{anchor}`, with `anchor` added to every bag and each edge introduced
/// exactly once (just before the first of its endpoints is forgotten).
///
/// # Panics
/// If `anchor` is not a vertex of `g`.
pub fn make_nice(g: &WeightedGraph, td: &TreeDecomposition, anchor: VertexId) -> NiceDecomposition {
    assert!(
        g.contains_vertex(anchor),
        "anchor {anchor} is not a vertex of the graph"
    );
    let mut b = Builder {
        g,
        anchor,
        nodes: Vec::new(),
        introduced: vec![false; g.num_edges()],
    };
    let k = td.num_nodes();
    if k == 0 {
        let root = b.leaf();
        debug_assert_eq!(root, 0);
        return NiceDecomposition { nodes: b.nodes, anchor };
    }
    let bags: Vec<Vec<VertexId>> = td
        .bags()
        .iter()
        .map(|bag| {
            let mut bag = bag.clone();
            if let Err(at) = bag.binary_search(&anchor) {
                bag.insert(at, anchor);
            }
            bag
        })
        .collect();

    // Root the tree at node 0 and list nodes parent-before-child.
    let adj = td.tree_adjacency();
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in adj[x].iter().rev() {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &x in &order[1..] {
        children[parent[x]].push(x);
    }

    let mut top = vec![usize::MAX; k];
    for &x in order.iter().rev() {
        let target = &bags[x];
        let node = if children[x].is_empty() {
            let leaf = b.leaf();
            b.morph(leaf, target)
        } else {
            let mut branches = Vec::with_capacity(children[x].len());
            for &c in &children[x] {
                branches.push(b.morph(top[c], target));
            }
            let mut acc = branches[0];
            for &other in &branches[1..] {
                acc = b.push(NiceKind::Join, target.clone(), vec![acc, other]);
            }
            acc
        };
        top[x] = node;
    }
    b.morph(top[0], &[anchor]);
    NiceDecomposition { nodes: b.nodes, anchor }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NiceViolation {
    Node { node: usize, problem: String },
    RootBag(Vec<VertexId>),
    EdgeNotIntroduced(VertexId, VertexId),
    EdgeIntroducedTwice(VertexId, VertexId),
    Decomposition(Violation),
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NiceViolation::Node { node, problem } => write!(f, "node {node}: {problem}"),
            NiceViolation::RootBag(bag) => write!(f, "root bag {bag:?} is not the anchor singleton"),
            NiceViolation::EdgeNotIntroduced(u, v) => write!(f, "edge ({u}, {v}) is never introduced"),
            NiceViolation::EdgeIntroducedTwice(u, v) => write!(f, "edge ({u}, {v}) is introduced more than once"),
            NiceViolation::Decomposition(v) => write!(f, "{v}"),
        }
    }
}

/// Checks the node-type rules, the anchor invariant, single edge
/// introduction and conditions 1-3 of the underlying decomposition.
pub fn validate_nice(g: &WeightedGraph, nice: &NiceDecomposition) -> Vec<NiceViolation> {
    let mut out = Vec::new();
    let nodes = &nice.nodes;
    let mut bad = |node: usize, problem: String| out.push(NiceViolation::Node { node, problem });
    let mut count = vec![0u32; g.num_edges()];
    let mut has_parent = vec![false; nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        if n.bag.windows(2).any(|w| w[0] >= w[1]) {
            bad(i, "bag is not sorted and duplicate-free".into());
        }
        if n.bag.binary_search(&nice.anchor).is_err() {
            bad(i, "anchor missing from bag".into());
        }
        for &c in &n.children {
            if c >= i {
                bad(i, format!("child {c} does not precede its parent"));
                continue;
            }
            if std::mem::replace(&mut has_parent[c], true) {
                bad(i, format!("child {c} has two parents"));
            }
        }
        let child_bag = |k: usize| n.children.get(k).and_then(|&c| nodes.get(c)).map(|c| &c.bag);
        let arity = match n.kind {
            NiceKind::Leaf => 0,
            NiceKind::Join => 2,
            _ => 1,
        };
        if n.children.len() != arity {
            bad(i, format!("{:?} node has {} children", n.kind, n.children.len()));
            continue;
        }
        match n.kind {
            NiceKind::Leaf => {
                if n.bag != [nice.anchor] {
                    bad(i, "leaf bag is not the anchor singleton".into());
                }
            }
            NiceKind::IntroduceVertex(v) => {
                let c = child_bag(0).unwrap();
                let mut expected = c.clone();
                expected.push(v);
                expected.sort_unstable();
                if c.contains(&v) || expected != n.bag {
                    bad(i, format!("introduce {v} does not add exactly one vertex"));
                }
            }
            NiceKind::Forget(v) => {
                let c = child_bag(0).unwrap();
                let mut expected = c.clone();
                expected.retain(|&x| x != v);
                if !c.contains(&v) || expected != n.bag || v == nice.anchor {
                    bad(i, format!("forget {v} does not remove exactly one vertex"));
                }
            }
            NiceKind::IntroduceEdge(u, v) => {
                if child_bag(0).unwrap() != &n.bag {
                    bad(i, "introduce-edge changes the bag".into());
                }
                if !(n.bag.contains(&u) && n.bag.contains(&v)) {
                    bad(i, format!("edge ({u}, {v}) endpoints not in bag"));
                }
                match g.edge_between(u, v) {
                    Some(id) => count[id] += 1,
                    None => bad(i, format!("({u}, {v}) is not a graph edge")),
                }
            }
            NiceKind::Join => {
                if child_bag(0).unwrap() != &n.bag || child_bag(1).unwrap() != &n.bag {
                    bad(i, "join children differ from parent bag".into());
                }
            }
        }
    }
    if let Some(root) = nodes.last() {
        if root.bag != [nice.anchor] {
            out.push(NiceViolation::RootBag(root.bag.clone()));
        }
    }
    if has_parent.iter().rev().skip(1).any(|&p| !p) {
        out.push(NiceViolation::Node {
            node: nodes.len().saturating_sub(1),
            problem: "some non-root node has no parent".into(),
        });
    }
    for (id, &c) in count.iter().enumerate() {
        let e = g.edge(id);
        match c {
            0 => out.push(NiceViolation::EdgeNotIntroduced(e.u, e.v)),
            1 => {}
            _ => out.push(NiceViolation::EdgeIntroducedTwice(e.u, e.v)),
        }
    }
    out.extend(
        validate(g, &nice.as_tree_decomposition())
            .into_iter()
            .map(NiceViolation::Decomposition),
    );
    out
}
