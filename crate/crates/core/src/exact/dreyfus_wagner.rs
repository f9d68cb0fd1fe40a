use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{EdgeId, VertexId, Weight, WeightedGraph};
use crate::instance::{prune, SteinerInstance, SteinerSolution};

pub const DEFAULT_TERMINAL_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} terminals exceed the Dreyfus-Wagner cap of {cap}")]
    TooManyTerminals { count: usize, cap: usize },
}

const INF: Weight = Weight::MAX / 4;

/// Per terminal subset: best cost of a tree spanning the subset plus `v`,
/// and how it was reached.
struct Layer {
    cost: Vec<Weight>,
    /// `Some((u, edge))` if `v` was reached from `u` along `edge`.
    pred: Vec<Option<(u32, u32)>>,
    /// For subsets of size >= 2: the split used where the path ends.
    split: Vec<u32>,
}

fn relax(g: &WeightedGraph, layer: &mut Layer) {
    let mut heap: BinaryHeap<Reverse<(Weight, VertexId)>> = (0..layer.cost.len())
        .filter(|&v| layer.cost[v] < INF)
        .map(|v| Reverse((layer.cost[v], v)))
        .collect();
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > layer.cost[x] {
            continue;
        }
        for &(y, id) in g.neighbors(x) {
            let nd = d + g.edge(id).weight;
            if nd < layer.cost[y] {
                layer.cost[y] = nd;
                layer.pred[y] = Some((x as u32, id as u32));
                heap.push(Reverse((nd, y)));
            }
        }
    }
}

/// Exact Steiner tree by the Dreyfus-Wagner subset recurrence. Refuses
/// instances with more than `cap` terminals.
pub fn dreyfus_wagner(instance: &SteinerInstance, cap: usize) -> Result<SteinerSolution, OracleError> {
    let q = instance.terminals();
    if q.len() > cap {
        return Err(OracleError::TooManyTerminals { count: q.len(), cap });
    }
    if q.len() == 1 {
        return Ok(prune(instance, &[]).expect("single terminal"));
    }
    let g = instance.graph();
    let n = g.universe();
    let (root, others) = q.split_last().expect("nonempty");
    let k = others.len();
    let full = (1usize << k) - 1;

    let mut layers: Vec<Layer> = Vec::with_capacity(full + 1);
    layers.push(Layer {
        cost: Vec::new(),
        pred: Vec::new(),
        split: Vec::new(),
    });
    for set in 1..=full {
        let mut layer = Layer {
            cost: vec![INF; n],
            pred: vec![None; n],
            split: Vec::new(),
        };
        if set.is_power_of_two() {
            layer.cost[others[set.trailing_zeros() as usize]] = 0;
        } else {
            layer.split = vec![0; n];
            let low = set & set.wrapping_neg();
            // proper subsets containing the lowest element, each split once
            let rest = set ^ low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                if part != set {
                    let (a, b) = (&layers[part].cost, &layers[set ^ part].cost);
                    for v in 0..n {
                        let c = a[v] + b[v];
                        if c < layer.cost[v] {
                            layer.cost[v] = c;
                            layer.split[v] = part as u32;
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        relax(g, &mut layer);
        layers.push(layer);
    }

    let mut edges: Vec<EdgeId> = Vec::new();
    let mut stack = vec![(full, *root)];
    while let Some((set, mut v)) = stack.pop() {
        let layer = &layers[set];
        while let Some((u, id)) = layer.pred[v] {
            edges.push(id as usize);
            v = u as usize;
        }
        if !set.is_power_of_two() {
            let part = layer.split[v] as usize;
            stack.push((part, v));
            stack.push((set ^ part, v));
        }
    }
    let optimum = layers[full].cost[*root];
    let solution = prune(instance, &edges).expect("recurrence connects all terminals");
    debug_assert_eq!(solution.weight(), optimum);
    Ok(solution)
}
