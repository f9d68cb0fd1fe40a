//! Plain-text pool files.
//!
//! ```text
//! POOL 2
//! SOLUTION 3 2 0 4 1234
//! E 1 2
//! E 2 3
//! END
//! SOLUTION 5 1
//! E 1 3
//! END
//! ```
//!
//! Each `SOLUTION` line gives the tree weight, its edge count and optionally
//! the run, iteration and seed that produced it. Edges use the instance's
//! external (1-based) vertex ids. Lines starting with `#` are ignored.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::{Provenance, SolutionPool};
use crate::graph::{EdgeId, Weight};
use crate::instance::{prune, SolutionError, SteinerInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoolFileError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: vertex {id} is not in the instance")]
    UnknownVertex { line: usize, id: u64 },
    #[error("line {line}: ({u}, {v}) is not an edge of the instance")]
    UnknownEdge { line: usize, u: u64, v: u64 },
    #[error("solution {index}: stated weight {stated} but edges weigh {actual}")]
    WeightMismatch {
        index: usize,
        stated: Weight,
        actual: Weight,
    },
    #[error("solution {index}: {source}")]
    Invalid { index: usize, source: SolutionError },
    #[error("header declares {declared} solutions, found {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("pool file holds no solutions")]
    Empty,
}

pub fn write_pool(instance: &SteinerInstance, pool: &SolutionPool) -> String {
    let g = instance.graph();
    let mut out = format!("POOL {}\n", pool.len());
    for (s, p) in pool.iter() {
        let _ = writeln!(
            out,
            "SOLUTION {} {} {} {} {}",
            s.weight(),
            s.num_edges(),
            p.run,
            p.iteration,
            p.seed
        );
        for &id in s.edges() {
            let e = g.edge(id);
            let _ = writeln!(out, "E {} {}", instance.external_id(e.u), instance.external_id(e.v));
        }
        out.push_str("END\n");
    }
    out
}

struct Pending {
    weight: Weight,
    count: usize,
    provenance: Option<Provenance>,
    edges: Vec<EdgeId>,
}

/// Reads a pool for `instance`. Each edge set must connect the terminals and
/// is canonicalised the same way generated trees are; repeated trees are
/// dropped.
pub fn read_pool(instance: &SteinerInstance, text: &str) -> Result<SolutionPool, PoolFileError> {
    let g = instance.graph();
    let ids: FxHashMap<u64, usize> = instance
        .external_ids()
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let mut declared: Option<usize> = None;
    let mut current: Option<Pending> = None;
    let mut members = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| PoolFileError::Malformed {
            line,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let nums = |from: usize| -> Result<Vec<u64>, PoolFileError> {
            fields[from..]
                .iter()
                .map(|f| {
                    f.parse::<u64>()
                        .map_err(|_| bad(&format!("expected an integer, got {f:?}")))
                })
                .collect()
        };
        match (fields[0].to_ascii_uppercase().as_str(), current.as_mut()) {
            ("POOL", None) if declared.is_none() && members.is_empty() => {
                let n = nums(1)?;
                let [count] = n[..] else {
                    return Err(bad("POOL takes one count"));
                };
                declared = Some(count as usize);
            }
            ("SOLUTION", None) => {
                let n = nums(1)?;
                let provenance = match n[..] {
                    [_, _] => None,
                    [_, _, run, iteration, seed] => Some(Provenance {
                        run: run as usize,
                        iteration: iteration as usize,
                        seed,
                    }),
                    _ => {
                        return Err(bad(
                            "SOLUTION takes weight, edge count and optional run, iteration, seed",
                        ))
                    }
                };
                current = Some(Pending {
                    weight: n[0],
                    count: n[1] as usize,
                    provenance,
                    edges: Vec::new(),
                });
            }
            ("E", Some(p)) => {
                let n = nums(1)?;
                let [a, b] = n[..] else {
                    return Err(bad("E takes two vertex ids"));
                };
                let lookup = |id: u64| ids.get(&id).copied().ok_or(PoolFileError::UnknownVertex { line, id });
                let id = g
                    .edge_between(lookup(a)?, lookup(b)?)
                    .ok_or(PoolFileError::UnknownEdge { line, u: a, v: b })?;
                p.edges.push(id);
            }
            ("END", Some(_)) => {
                let p = current.take().expect("matched Some");
                let index = members.len();
                if p.edges.len() != p.count {
                    return Err(bad(&format!(
                        "solution declares {} edges, found {}",
                        p.count,
                        p.edges.len()
                    )));
                }
                let mut edges = p.edges;
                edges.sort_unstable();
                edges.dedup();
                let actual = g.total_weight(&edges);
                if actual != p.weight {
                    return Err(PoolFileError::WeightMismatch {
                        index,
                        stated: p.weight,
                        actual,
                    });
                }
                let solution = prune(instance, &edges).map_err(|source| PoolFileError::Invalid { index, source })?;
                let provenance = p.provenance.unwrap_or(Provenance {
                    run: index,
                    iteration: 0,
                    seed: 0,
                });
                members.push((solution, provenance));
            }
            (keyword, _) => return Err(bad(&format!("unexpected {keyword:?}"))),
        }
    }
    if current.is_some() {
        return Err(PoolFileError::Malformed {
            line: text.lines().count(),
            msg: "missing END".into(),
        });
    }
    if let Some(d) = declared {
        if d != members.len() {
            return Err(PoolFileError::CountMismatch {
                declared: d,
                found: members.len(),
            });
        }
    }
    if members.is_empty() {
        return Err(PoolFileError::Empty);
    }
    Ok(SolutionPool::new(members))
}
