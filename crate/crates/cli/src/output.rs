//! Rendering of solve and merge results.

use serde::Serialize;
use serde_json::Value;
use smh_core::merge::{MergeReport, SolutionSource};
use smh_core::{SteinerInstance, SteinerSolution, Weight};

use crate::cli::Format;

#[derive(Clone, Debug, Serialize)]
pub struct InstanceSummary {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub terminals: usize,
}

impl InstanceSummary {
    pub fn of(instance: &SteinerInstance) -> Self {
        InstanceSummary {
            name: instance.name().to_string(),
            vertices: instance.num_vertices(),
            edges: instance.graph().num_edges(),
            terminals: instance.terminals().len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationSummary {
    pub runs: usize,
    pub distinct: usize,
    pub best: Weight,
    pub timed_out: bool,
    pub seconds: f64,
}

/// A tree as `(u, v, weight)` triples in external vertex ids.
#[derive(Clone, Debug, Serialize)]
pub struct TreeListing {
    pub weight: Weight,
    pub edges: Vec<(u64, u64, Weight)>,
}

impl TreeListing {
    pub fn of(instance: &SteinerInstance, solution: &SteinerSolution) -> Self {
        let g = instance.graph();
        let mut edges: Vec<(u64, u64, Weight)> = solution
            .edges()
            .iter()
            .map(|&id| {
                let e = g.edge(id);
                let (a, b) = (instance.external_id(e.u), instance.external_id(e.v));
                (a.min(b), a.max(b), e.weight)
            })
            .collect();
        edges.sort_unstable();
        TreeListing {
            weight: solution.weight(),
            edges,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutput {
    pub instance: InstanceSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generation: Option<GenerationSummary>,
    pub merge: MergeReport,
    pub solution: TreeListing,
}

/// Drops every object key ending in `seconds`.
pub fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.ends_with("seconds"));
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

/// JSON with wall-clock fields removed unless `timings` is set.
pub fn to_json<T: Serialize>(value: &T, timings: bool) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    if !timings {
        strip_timings(&mut v);
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn source_name(s: &SolutionSource) -> String {
    match s {
        SolutionSource::FinalDp => "final".into(),
        SolutionSource::Ladder { cap } => format!("cap{cap}"),
        SolutionSource::Ranking { iteration } => format!("ranking{iteration}"),
        SolutionSource::Pool { index } => format!("pool{index}"),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    vertices: usize,
    edges: usize,
    terminals: usize,
    pool: usize,
    pool_best: Weight,
    pool_worst: Weight,
    weight: Weight,
    source: String,
    trees_used: usize,
    width: usize,
    capacity_fallback: bool,
    timed_out: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    generation_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    merge_seconds: Option<f64>,
}

pub fn render(out: &SolveOutput, format: Format, timings: bool) -> anyhow::Result<String> {
    let r = &out.merge;
    match format {
        Format::Json => to_json(out, timings),
        Format::Csv => {
            let row = CsvRow {
                instance: &out.instance.name,
                vertices: out.instance.vertices,
                edges: out.instance.edges,
                terminals: out.instance.terminals,
                pool: r.pool.size,
                pool_best: r.pool.best,
                pool_worst: r.pool.worst,
                weight: r.weight,
                source: source_name(&r.source),
                trees_used: r.trees_used(),
                width: r.final_step.width,
                capacity_fallback: r.capacity_fallback,
                timed_out: r.timed_out,
                generation_seconds: out.generation.as_ref().filter(|_| timings).map(|g| g.seconds),
                merge_seconds: timings.then_some(r.merge_seconds),
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(row)?;
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Table => {
            let mut s = format!(
                "instance     {} ({} vertices, {} edges, {} terminals)\n",
                out.instance.name, out.instance.vertices, out.instance.edges, out.instance.terminals
            );
            if let Some(g) = &out.generation {
                s.push_str(&format!(
                    "pool         {} distinct of {} runs, best {}{}\n",
                    g.distinct,
                    g.runs,
                    g.best,
                    if g.timed_out { " (cut short)" } else { "" }
                ));
            }
            s.push_str(&format!(
                "pool range   {} .. {} (mean {:.1})\n",
                r.pool.best, r.pool.worst, r.pool.mean
            ));
            let solved = r.iterations.iter().filter(|i| i.value.is_some()).count();
            s.push_str(&format!(
                "ranking      {} iterations, {} solved\n",
                r.iterations.len(),
                solved
            ));
            s.push_str(&format!(
                "final union  cap {}: {} trees, {} vertices, {} edges, width {}, {:?}\n",
                r.final_step.cap,
                r.final_step.trees_used,
                r.final_step.union_vertices,
                r.final_step.union_edges,
                r.final_step.width,
                r.final_step.status
            ));
            for step in &r.ladder {
                s.push_str(&format!(
                    "ladder       cap {}: {} trees, width {}, value {}\n",
                    step.cap,
                    step.trees_used,
                    step.width,
                    step.value.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
                ));
            }
            s.push_str(&format!("weight       {} from {}\n", r.weight, source_name(&r.source)));
            if r.capacity_fallback {
                s.push_str("note         DP budget exceeded on the final union\n");
            }
            if r.timed_out {
                s.push_str("note         time limit reached\n");
            }
            if timings {
                if let Some(g) = &out.generation {
                    s.push_str(&format!("generation   {:.3}s\n", g.seconds));
                }
                s.push_str(&format!("merge        {:.3}s\n", r.merge_seconds));
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timings_are_stripped_at_every_depth() {
        let mut v = serde_json::json!({
            "a": 1,
            "merge_seconds": 0.5,
            "steps": [{"seconds": 1.0, "cap": 3}],
            "inner": {"ranking_seconds": 2.0, "b": [1, 2]}
        });
        strip_timings(&mut v);
        assert_eq!(
            v,
            serde_json::json!({"a": 1, "steps": [{"cap": 3}], "inner": {"b": [1, 2]}})
        );
    }
}
