//! Steiner tree DP over a nice tree decomposition.
//!
//! A table entry at node `i` describes a forest `F` built from the edges
//! introduced below `i`: which bag vertices `F` touches and how `F` partitions
//! them into components. Every component of `F` meets the bag and every
//! terminal forgotten below `i` lies in `F`. The anchor terminal is in every
//! bag, so the root state `{anchor}` describes a connected subgraph spanning
//! all terminals.

use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use super::partition::{decode, encode_canonical, support, Labels, MAX_BAG};
use super::reduce::representatives;
use crate::graph::{EdgeId, VertexId, Weight};
use crate::instance::{prune, SteinerInstance, SteinerSolution};
use crate::treewidth::{NiceDecomposition, NiceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpConfig {
    /// Cap on the total number of table entries kept for reconstruction.
    pub max_entries: usize,
    pub deadline: Option<Instant>,
    /// Weight of some known solution. Partial solutions heavier than this
    /// are discarded, which leaves the optimum unchanged.
    pub upper_bound: Option<Weight>,
    /// Shrink tables to rank-based representative sets after every node
    /// that can enlarge them. Exact either way.
    pub reduce: bool,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            max_entries: 1 << 26,
            deadline: None,
            upper_bound: None,
            reduce: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("DP table budget exceeded: more than {limit} entries")]
    Capacity { limit: usize },
    #[error("bag of size {size} exceeds the supported maximum {}", MAX_BAG)]
    BagTooLarge { size: usize },
    #[error("anchor vertex {0} is not a terminal")]
    AnchorNotTerminal(VertexId),
    #[error("decomposition does not match the instance: {0}")]
    Mismatch(String),
    #[error("deadline reached during the DP")]
    Timeout,
    #[error("terminals are not connected in the decomposed graph")]
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeStat {
    pub kind: &'static str,
    pub bag_size: usize,
    pub entries: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DpStats {
    pub nodes: Vec<NodeStat>,
    pub total_entries: usize,
}

impl DpStats {
    pub fn max_entries(&self) -> usize {
        self.nodes.iter().map(|n| n.entries).max().unwrap_or(0)
    }

    /// One line per decomposition node: `node,kind,bag_size,entries`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,kind,bag_size,entries\n");
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!("{i},{},{},{}\n", n.kind, n.bag_size, n.entries));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct DpOutcome {
    pub solution: SteinerSolution,
    pub stats: DpStats,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: u128,
    cost: Weight,
    left: u32,
    /// Second child entry at join nodes; 1 at introduce-edge nodes when the
    /// edge was taken.
    right: u32,
}

struct TableBuilder {
    entries: Vec<Entry>,
    index: FxHashMap<u128, u32>,
    bound: Weight,
}

impl TableBuilder {
    fn new(bound: Weight) -> Self {
        TableBuilder {
            entries: Vec::new(),
            index: FxHashMap::default(),
            bound,
        }
    }

    fn offer(&mut self, e: Entry) {
        if e.cost > self.bound {
            return;
        }
        match self.index.get(&e.key) {
            Some(&i) => {
                let slot = &mut self.entries[i as usize];
                if e.cost < slot.cost {
                    *slot = e;
                }
            }
            None => {
                self.index.insert(e.key, self.entries.len() as u32);
                self.entries.push(e);
            }
        }
    }
}

fn kind_name(kind: NiceKind) -> &'static str {
    match kind {
        NiceKind::Leaf => "leaf",
        NiceKind::IntroduceVertex(_) => "introduce_vertex",
        NiceKind::IntroduceEdge(..) => "introduce_edge",
        NiceKind::Forget(_) => "forget",
        NiceKind::Join => "join",
    }
}

/// Minimum Steiner tree of `instance` using the DP over `nice`.
///
/// `nice` must be a nice decomposition of `instance.graph()` whose anchor is
/// a terminal.
pub fn dp_solve(instance: &SteinerInstance, nice: &NiceDecomposition, cfg: &DpConfig) -> Result<DpOutcome, DpError> {
    let g = instance.graph();
    let anchor = nice.anchor();
    if !g.contains_vertex(anchor) || !instance.is_terminal(anchor) {
        return Err(DpError::AnchorNotTerminal(anchor));
    }
    if let Some(size) = nice.nodes().iter().map(|n| n.bag.len()).find(|&s| s > MAX_BAG) {
        return Err(DpError::BagTooLarge { size });
    }

    let nodes = nice.nodes();
    let mut tables: Vec<Vec<Entry>> = Vec::with_capacity(nodes.len());
    let mut stats = DpStats::default();
    let mut total = 0usize;

    for (i, node) in nodes.iter().enumerate() {
        if let Some(deadline) = cfg.deadline {
            if Instant::now() > deadline {
                return Err(DpError::Timeout);
            }
        }
        let bag = &node.bag;
        let len = bag.len();
        let mut out = TableBuilder::new(cfg.upper_bound.unwrap_or(Weight::MAX));
        let pos = |v: VertexId| {
            bag.binary_search(&v)
                .map_err(|_| DpError::Mismatch(format!("vertex {v} missing from bag of node {i}")))
        };
        match node.kind {
            NiceKind::Leaf => {
                let mut l: Labels = [0; MAX_BAG];
                l[pos(anchor)?] = 1;
                out.offer(Entry {
                    key: encode_canonical(&mut l, len),
                    cost: 0,
                    left: 0,
                    right: 0,
                });
            }
            NiceKind::IntroduceVertex(v) => {
                let p = pos(v)?;
                let child = &tables[node.children[0]];
                let terminal = instance.is_terminal(v);
                for (ci, e) in child.iter().enumerate() {
                    let old = decode(e.key, len - 1);
                    let mut l: Labels = [0; MAX_BAG];
                    l[..p].copy_from_slice(&old[..p]);
                    l[p + 1..len].copy_from_slice(&old[p..len - 1]);
                    if !terminal {
                        let mut excluded = l;
                        out.offer(Entry {
                            key: encode_canonical(&mut excluded, len),
                            left: ci as u32,
                            ..*e
                        });
                    }
                    l[p] = (MAX_BAG + 1) as u8;
                    out.offer(Entry {
                        key: encode_canonical(&mut l, len),
                        left: ci as u32,
                        ..*e
                    });
                }
            }
            NiceKind::IntroduceEdge(u, v) => {
                let (pu, pv) = (pos(u)?, pos(v)?);
                let id = g
                    .edge_between(u, v)
                    .ok_or_else(|| DpError::Mismatch(format!("({u}, {v}) is not an edge")))?;
                let w = g.edge(id).weight;
                let child = &tables[node.children[0]];
                for (ci, e) in child.iter().enumerate() {
                    out.offer(Entry {
                        left: ci as u32,
                        right: 0,
                        ..*e
                    });
                }
                for (ci, e) in child.iter().enumerate() {
                    let mut l = decode(e.key, len);
                    let (lu, lv) = (l[pu], l[pv]);
                    if lu == 0 || lv == 0 || lu == lv {
                        continue;
                    }
                    for x in l.iter_mut().take(len) {
                        if *x == lv {
                            *x = lu;
                        }
                    }
                    out.offer(Entry {
                        key: encode_canonical(&mut l, len),
                        cost: e.cost + w,
                        left: ci as u32,
                        right: 1,
                    });
                }
            }
            NiceKind::Forget(v) => {
                let child_node = &nodes[node.children[0]];
                let p = child_node
                    .bag
                    .binary_search(&v)
                    .map_err(|_| DpError::Mismatch(format!("forgotten vertex {v} missing from child bag")))?;
                let child = &tables[node.children[0]];
                for (ci, e) in child.iter().enumerate() {
                    let old = decode(e.key, len + 1);
                    let lv = old[p];
                    if lv != 0 && !(0..=len).any(|q| q != p && old[q] == lv) {
                        // v's component would be cut off from the rest of the tree
                        continue;
                    }
                    let mut l: Labels = [0; MAX_BAG];
                    l[..p].copy_from_slice(&old[..p]);
                    l[p..len].copy_from_slice(&old[p + 1..=len]);
                    out.offer(Entry {
                        key: encode_canonical(&mut l, len),
                        left: ci as u32,
                        ..*e
                    });
                }
            }
            NiceKind::Join => {
                let (a, b) = (&tables[node.children[0]], &tables[node.children[1]]);
                let mut by_support: FxHashMap<u32, Vec<(Weight, u32, Labels)>> = FxHashMap::default();
                for (bi, e) in b.iter().enumerate() {
                    by_support
                        .entry(support(e.key, len))
                        .or_default()
                        .push((e.cost, bi as u32, decode(e.key, len)));
                }
                // cheapest partners first so the bound can cut the scan short
                for partners in by_support.values_mut() {
                    partners.sort_unstable_by_key(|&(cost, bi, _)| (cost, bi));
                }
                for (ai, ea) in a.iter().enumerate() {
                    let Some(partners) = by_support.get(&support(ea.key, len)) else {
                        continue;
                    };
                    let la = decode(ea.key, len);
                    for &(cost, bi, ref lb) in partners {
                        if ea.cost + cost > out.bound {
                            break;
                        }
                        let eb = &b[bi as usize];
                        let mut l = join_labels(&la, lb, len);
                        out.offer(Entry {
                            key: encode_canonical(&mut l, len),
                            cost: ea.cost + eb.cost,
                            left: ai as u32,
                            right: bi,
                        });
                    }
                    if total + out.entries.len() > cfg.max_entries {
                        return Err(DpError::Capacity { limit: cfg.max_entries });
                    }
                }
            }
        }
        let mut entries = out.entries;
        if cfg.reduce
            && matches!(
                node.kind,
                NiceKind::IntroduceEdge(..) | NiceKind::Forget(_) | NiceKind::Join
            )
        {
            entries = reduce_table(entries, len, pos(anchor)?);
        }
        total += entries.len();
        if total > cfg.max_entries {
            return Err(DpError::Capacity { limit: cfg.max_entries });
        }
        stats.nodes.push(NodeStat {
            kind: kind_name(node.kind),
            bag_size: len,
            entries: entries.len(),
        });
        tables.push(entries);
    }
    stats.total_entries = total;

    let root = nice.root();
    let root_entry = tables[root]
        .iter()
        .position(|e| e.key == 1)
        .ok_or(DpError::Infeasible)?;
    let cost = tables[root][root_entry].cost;

    let mut edges: Vec<EdgeId> = Vec::new();
    let mut stack = vec![(root, root_entry)];
    while let Some((i, ei)) = stack.pop() {
        let e = tables[i][ei];
        let node = &nodes[i];
        match node.kind {
            NiceKind::Leaf => {}
            NiceKind::Join => {
                stack.push((node.children[0], e.left as usize));
                stack.push((node.children[1], e.right as usize));
            }
            NiceKind::IntroduceEdge(u, v) => {
                if e.right == 1 {
                    edges.push(g.edge_between(u, v).expect("checked above"));
                }
                stack.push((node.children[0], e.left as usize));
            }
            _ => stack.push((node.children[0], e.left as usize)),
        }
    }
    let solution = prune(instance, &edges).map_err(|_| DpError::Infeasible)?;
    debug_assert_eq!(
        solution.weight(),
        cost,
        "reconstructed tree weight differs from DP value"
    );
    Ok(DpOutcome { solution, stats })
}

/// Keeps a representative subset of every support group, in table order.
fn reduce_table(entries: Vec<Entry>, len: usize, anchor_pos: usize) -> Vec<Entry> {
    let mut groups: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for (i, e) in entries.iter().enumerate() {
        groups.entry(support(e.key, len)).or_default().push(i as u32);
    }
    let mut keep = vec![false; entries.len()];
    let mut rows = Vec::new();
    for (&sup, members) in groups.iter_mut() {
        if members.len() == 1 {
            keep[members[0] as usize] = true;
            continue;
        }
        members.sort_unstable_by_key(|&i| (entries[i as usize].cost, entries[i as usize].key));
        rows.clear();
        rows.extend(
            members
                .iter()
                .map(|&i| (entries[i as usize].cost, entries[i as usize].key)),
        );
        for j in representatives(&rows, len, sup, anchor_pos) {
            keep[members[j] as usize] = true;
        }
    }
    entries
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(e, _)| e)
        .collect()
}

const IDENTITY: [u8; 2 * MAX_BAG + 2] = {
    let mut a = [0u8; 2 * MAX_BAG + 2];
    let mut i = 0;
    while i < a.len() {
        a[i] = i as u8;
        i += 1;
    }
    a
};

/// Finest common coarsening of two partitions over the same support.
fn join_labels(a: &Labels, b: &Labels, len: usize) -> Labels {
    // blocks of `a` are 1..=25, blocks of `b` are shifted to 26..=50
    let mut parent = IDENTITY;
    fn find(parent: &mut [u8], mut x: u8) -> u8 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for p in 0..len {
        if a[p] != 0 {
            let ra = find(&mut parent, a[p]);
            let rb = find(&mut parent, b[p] + MAX_BAG as u8);
            if ra != rb {
                parent[rb as usize] = ra;
            }
        }
    }
    let mut out = [0u8; MAX_BAG];
    for p in 0..len {
        if a[p] != 0 {
            out[p] = find(&mut parent, a[p]);
        }
    }
    out
}
