//! SteinLib STP format (version 1.0) reader and writer.
//!
//! Only the `Graph` and `Terminals` sections are interpreted; any other
//! section is skipped up to its `END`. Parallel edges keep their cheapest copy
//! and self-loops are dropped.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Edge, Weight, WeightedGraph};
use crate::instance::{InstanceError, SteinerInstance};

pub const MAGIC: &str = "33D32945";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StpError {
    #[error("missing or malformed header; expected `{MAGIC} STP File, STP Format Version 1.0`")]
    Header,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: fractional or invalid weight `{text}`; only nonnegative integers are supported")]
    Weight { line: usize, text: String },
    #[error("line {line}: vertex id {id} out of range 1..={nodes}")]
    VertexOutOfRange { line: usize, id: u64, nodes: usize },
    #[error("line {line}: terminal id out of range ({id} not in 1..={nodes})")]
    TerminalOutOfRange { line: usize, id: u64, nodes: usize },
    #[error("section {section} declares {declared} entries but lists {found}")]
    CountMismatch {
        section: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("missing section {0}")]
    MissingSection(&'static str),
    #[error("file ended before EOF")]
    UnexpectedEnd,
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
}

fn malformed(line: usize, msg: impl Into<String>) -> StpError {
    StpError::Malformed { line, msg: msg.into() }
}

fn parse_count(line: usize, tok: Option<&str>, what: &str) -> Result<usize, StpError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(line, format!("expected a count after `{what}`")))
}

fn parse_id(line: usize, tok: Option<&str>) -> Result<u64, StpError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(line, "expected a vertex id"))
}

fn parse_weight(line: usize, tok: Option<&str>) -> Result<Weight, StpError> {
    let tok = tok.ok_or_else(|| malformed(line, "expected an edge weight"))?;
    if let Ok(w) = tok.parse::<Weight>() {
        return Ok(w);
    }
    // integral values written with a decimal point are accepted
    if let Some((int, frac)) = tok.split_once('.') {
        if !frac.is_empty() && frac.bytes().all(|b| b == b'0') {
            if let Ok(w) = int.parse::<Weight>() {
                return Ok(w);
            }
        }
    }
    Err(StpError::Weight {
        line,
        text: tok.to_string(),
    })
}

/// Parses an STP file into an instance with 0-based internal ids
/// (`internal = file id - 1`).
pub fn parse_stp(text: &str) -> Result<SteinerInstance, StpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (_, header) = lines.next().ok_or(StpError::Header)?;
    let mut head = header.split_whitespace();
    if !head.next().is_some_and(|m| m.eq_ignore_ascii_case(MAGIC)) {
        return Err(StpError::Header);
    }

    let mut name = String::new();
    let mut nodes: Option<usize> = None;
    let mut declared_edges = 0usize;
    let mut edge_lines = 0usize;
    let mut edges: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
    let mut declared_terminals: Option<usize> = None;
    let mut terminals: Vec<usize> = Vec::new();
    let mut terminal_lines = 0usize;
    let mut section: Option<String> = None;
    let mut saw_eof = false;

    for (ln, line) in lines.by_ref() {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or_default().to_ascii_lowercase();
        match section.as_deref() {
            None => match key.as_str() {
                "section" => {
                    let s = toks.next().ok_or_else(|| malformed(ln, "section without a name"))?;
                    section = Some(s.to_ascii_lowercase());
                }
                "eof" => {
                    saw_eof = true;
                    break;
                }
                _ => return Err(malformed(ln, format!("unexpected `{line}` outside a section"))),
            },
            Some(_) if key == "end" => section = None,
            Some("comment") => {
                if key == "name" {
                    name = line[4..].trim().trim_matches('"').to_string();
                }
            }
            Some("graph") => match key.as_str() {
                "nodes" => nodes = Some(parse_count(ln, toks.next(), "Nodes")?),
                "edges" => declared_edges = parse_count(ln, toks.next(), "Edges")?,
                "e" => {
                    let n = nodes.ok_or_else(|| malformed(ln, "edge before `Nodes`"))?;
                    let a = parse_id(ln, toks.next())?;
                    let b = parse_id(ln, toks.next())?;
                    let w = parse_weight(ln, toks.next())?;
                    for id in [a, b] {
                        if id == 0 || id > n as u64 {
                            return Err(StpError::VertexOutOfRange { line: ln, id, nodes: n });
                        }
                    }
                    edge_lines += 1;
                    if a == b {
                        continue;
                    }
                    let (u, v) = ((a - 1) as usize, (b - 1) as usize);
                    let key = if u < v { (u, v) } else { (v, u) };
                    edges.entry(key).and_modify(|old| *old = (*old).min(w)).or_insert(w);
                }
                "a" => return Err(malformed(ln, "directed arcs are not supported")),
                _ => {}
            },
            Some("terminals") => match key.as_str() {
                "terminals" => declared_terminals = Some(parse_count(ln, toks.next(), "Terminals")?),
                "t" => {
                    let n = nodes.ok_or(StpError::MissingSection("Graph"))?;
                    let id = parse_id(ln, toks.next())?;
                    if id == 0 || id > n as u64 {
                        return Err(StpError::TerminalOutOfRange { line: ln, id, nodes: n });
                    }
                    terminal_lines += 1;
                    terminals.push((id - 1) as usize);
                }
                _ => {}
            },
            Some(_) => {}
        }
    }
    if section.is_some() || !saw_eof {
        return Err(StpError::UnexpectedEnd);
    }
    let n = nodes.ok_or(StpError::MissingSection("Graph"))?;
    if edge_lines != declared_edges {
        return Err(StpError::CountMismatch {
            section: "Graph",
            declared: declared_edges,
            found: edge_lines,
        });
    }
    let declared_terminals = declared_terminals.ok_or(StpError::MissingSection("Terminals"))?;
    if terminal_lines != declared_terminals {
        return Err(StpError::CountMismatch {
            section: "Terminals",
            declared: declared_terminals,
            found: terminal_lines,
        });
    }
    let graph = WeightedGraph::with_vertex_count(n, edges.into_iter().map(|((u, v), w)| Edge::new(u, v, w)))
        .map_err(InstanceError::from)?;
    Ok(SteinerInstance::new(graph, terminals)?.with_name(name))
}

/// Serialises an instance in STP format using its external ids.
pub fn write_stp(instance: &SteinerInstance) -> String {
    let g = instance.graph();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} STP File, STP Format Version 1.0");
    out.push('\n');
    out.push_str("SECTION Comment\n");
    let _ = writeln!(out, "Name    \"{}\"", instance.name());
    out.push_str("END\n\n");
    out.push_str("SECTION Graph\n");
    let _ = writeln!(out, "Nodes {}", g.num_vertices());
    let _ = writeln!(out, "Edges {}", g.num_edges());
    for e in g.edges() {
        let _ = writeln!(
            out,
            "E {} {} {}",
            instance.external_id(e.u),
            instance.external_id(e.v),
            e.weight
        );
    }
    out.push_str("END\n\n");
    out.push_str("SECTION Terminals\n");
    let _ = writeln!(out, "Terminals {}", instance.terminals().len());
    for &t in instance.terminals() {
        let _ = writeln!(out, "T {}", instance.external_id(t));
    }
    out.push_str("END\n\nEOF\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "33D32945 STP File, STP Format Version 1.0\n\
        SECTION Graph\nNodes 2\nEdges 1\nE 1 2 5\nEND\n\
        SECTION Terminals\nTerminals 2\nT 1\nT 2\nEND\nEOF\n";

    #[test]
    fn parses_smallest_instance() {
        let inst = parse_stp(TINY).unwrap();
        assert_eq!(inst.num_vertices(), 2);
        assert_eq!(inst.graph().num_edges(), 1);
        assert_eq!(inst.graph().weight_between(0, 1), Some(5));
        assert_eq!(inst.terminals(), &[0, 1]);
        assert_eq!(inst.external_id(1), 2);
    }

    #[test]
    fn parallel_edges_keep_minimum() {
        let text = TINY.replace("Edges 1\nE 1 2 5\n", "Edges 2\nE 1 2 5\nE 2 1 7\n");
        let inst = parse_stp(&text).unwrap();
        assert_eq!(inst.graph().num_edges(), 1);
        assert_eq!(inst.graph().weight_between(0, 1), Some(5));
        let again = parse_stp(&write_stp(&inst)).unwrap();
        assert_eq!(again, inst);
        assert!(write_stp(&inst).contains("E 1 2 5\n"));
    }

    #[test]
    fn self_loops_are_dropped() {
        let text = TINY.replace("Edges 1\nE 1 2 5\n", "Edges 2\nE 1 2 5\nE 2 2 1\n");
        assert_eq!(parse_stp(&text).unwrap().graph().num_edges(), 1);
    }

    #[test]
    fn terminal_zero_is_out_of_range() {
        let text = TINY.replace("T 1\n", "T 0\n");
        let err = parse_stp(&text).unwrap_err();
        assert!(matches!(err, StpError::TerminalOutOfRange { id: 0, .. }));
        assert!(err.to_string().contains("terminal id out of range"));
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(parse_stp("hello\n").unwrap_err(), StpError::Header);
        assert!(matches!(
            parse_stp(&TINY.replace("E 1 2 5", "E 1 2 2.5")).unwrap_err(),
            StpError::Weight { .. }
        ));
        assert!(matches!(
            parse_stp(&TINY.replace("E 1 2 5", "E 1 3 5")).unwrap_err(),
            StpError::VertexOutOfRange { id: 3, .. }
        ));
        assert!(matches!(
            parse_stp(&TINY.replace("Edges 1", "Edges 2")).unwrap_err(),
            StpError::CountMismatch { section: "Graph", .. }
        ));
        assert_eq!(
            parse_stp(&TINY.replace("Nodes 2", "Nodes 3")).unwrap_err(),
            StpError::Instance(InstanceError::Disconnected)
        );
        assert_eq!(
            parse_stp(&TINY.replace("EOF\n", "")).unwrap_err(),
            StpError::UnexpectedEnd
        );
    }

    #[test]
    fn skips_unknown_sections_and_reads_name() {
        let text = TINY.replace(
            "SECTION Graph",
            "SECTION Comment\nName \"tiny\"\nCreator \"x\"\nEND\nSECTION Coordinates\nDD 1 0 0\nEND\nSECTION Graph",
        );
        let inst = parse_stp(&text).unwrap();
        assert_eq!(inst.name(), "tiny");
        assert_eq!(parse_stp(&write_stp(&inst)).unwrap(), inst);
    }

    #[test]
    fn integral_decimal_weights_are_accepted() {
        let inst = parse_stp(&TINY.replace("E 1 2 5", "E 1 2 5.000")).unwrap();
        assert_eq!(inst.graph().weight_between(0, 1), Some(5));
    }
}
