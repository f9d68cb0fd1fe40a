//! Benchmark records, optimality gaps and their aggregates.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// GRASP and merged gaps of one row, in percent.
pub type GapPair = (Ratio<i128>, Ratio<i128>);

/// Percentage excess of `value` over `best_known`, exactly.
///
/// Returns `None` when `best_known` is zero. A value below the best known
/// bound yields a negative gap.
pub fn compute_gap(value: u64, best_known: u64) -> Option<Ratio<i128>> {
    if best_known == 0 {
        return None;
    }
    Some(Ratio::new(
        100 * (value as i128 - best_known as i128),
        best_known as i128,
    ))
}

/// `100 * (before - after) / before`, or `None` if `before` is not positive.
pub fn improvement(before: Ratio<i128>, after: Ratio<i128>) -> Option<Ratio<i128>> {
    if before <= Ratio::from_integer(0) {
        return None;
    }
    Some((before - after) * Ratio::from_integer(100) / before)
}

pub fn to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// One instance of a benchmark run. Columns follow the usual results table:
/// gap of the generator's best tree and of the merged tree, improvement,
/// both phase times, their ratio and the number of merged trees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub terminals: usize,
    pub edges: usize,
    pub best_known: Option<u64>,
    pub grasp_value: u64,
    pub smh_value: u64,
    pub grasp_gap: Option<f64>,
    pub smh_gap: Option<f64>,
    pub improvement: Option<f64>,
    /// Set when the merged tree beats the best known value.
    pub new_best: bool,
    pub grasp_time: f64,
    pub smh_time: f64,
    pub rel_time: f64,
    pub trees_used: usize,
    pub capacity_fallback: bool,
    pub timed_out: bool,
}

impl BenchRecord {
    /// Fills the derived columns from the values, the best known bound and
    /// the two phase times.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        instance: String,
        terminals: usize,
        edges: usize,
        best_known: Option<u64>,
        grasp_value: u64,
        smh_value: u64,
        grasp_time: f64,
        smh_time: f64,
        trees_used: usize,
    ) -> Self {
        let gaps = best_known.and_then(|b| Some((compute_gap(grasp_value, b)?, compute_gap(smh_value, b)?)));
        BenchRecord {
            instance,
            terminals,
            edges,
            best_known,
            grasp_value,
            smh_value,
            grasp_gap: gaps.map(|(g, _)| round6(to_f64(g))),
            smh_gap: gaps.map(|(_, s)| round6(to_f64(s))),
            improvement: gaps.and_then(|(g, s)| improvement(g, s)).map(|r| round6(to_f64(r))),
            new_best: best_known.is_some_and(|b| smh_value < b),
            grasp_time: round6(grasp_time),
            smh_time: round6(smh_time),
            rel_time: if grasp_time > 0.0 {
                round6(smh_time / grasp_time)
            } else {
                0.0
            },
            trees_used,
            capacity_fallback: false,
            timed_out: false,
        }
    }

    /// Exact gaps recomputed from the integer columns.
    pub fn exact_gaps(&self) -> Option<GapPair> {
        let b = self.best_known?;
        Some((compute_gap(self.grasp_value, b)?, compute_gap(self.smh_value, b)?))
    }

    /// GRASP alone already reached the best known value.
    pub fn solved_by_grasp(&self) -> bool {
        self.best_known.is_some_and(|b| self.grasp_value <= b)
    }
}

// six decimals survive a text round trip unchanged
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.context("malformed bench row")).collect()
}

/// Summary of a set of records. Gap means are computed exactly from the
/// integer columns, so they agree for records read back from CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub instances: usize,
    /// Instances with a best known value.
    pub with_best_known: usize,
    pub mean_grasp_gap: Option<f64>,
    pub mean_smh_gap: Option<f64>,
    /// Instances where the tree reaches the best known value.
    pub grasp_best: usize,
    pub smh_best: usize,
    /// Instances where merging strictly improved on the pool.
    pub improved: usize,
    pub mean_rel_time: Option<f64>,
    pub mean_trees: Option<f64>,
}

pub fn aggregate(records: &[BenchRecord]) -> Aggregate {
    let gaps: Vec<GapPair> = records.iter().filter_map(BenchRecord::exact_gaps).collect();
    let mean = |f: &dyn Fn(&GapPair) -> Ratio<i128>| {
        (!gaps.is_empty())
            .then(|| to_f64(gaps.iter().map(f).sum::<Ratio<i128>>() / Ratio::from_integer(gaps.len() as i128)))
    };
    let n = records.len();
    Aggregate {
        instances: n,
        with_best_known: gaps.len(),
        mean_grasp_gap: mean(&|g| g.0),
        mean_smh_gap: mean(&|g| g.1),
        grasp_best: records
            .iter()
            .filter(|r| r.best_known.is_some_and(|b| r.grasp_value <= b))
            .count(),
        smh_best: records
            .iter()
            .filter(|r| r.best_known.is_some_and(|b| r.smh_value <= b))
            .count(),
        improved: records.iter().filter(|r| r.smh_value < r.grasp_value).count(),
        mean_rel_time: (n > 0).then(|| records.iter().map(|r| r.rel_time).sum::<f64>() / n as f64),
        mean_trees: (n > 0).then(|| records.iter().map(|r| r.trees_used as f64).sum::<f64>() / n as f64),
    }
}

/// Reads a best-known table: one `name,value` pair per line. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_best_known(text: &str) -> Result<BTreeMap<String, u64>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((name, value)) = line.split_once(',') else {
            bail!("best-known line {}: expected `name,value`", i + 1);
        };
        let value: u64 = value
            .trim()
            .parse()
            .with_context(|| format!("best-known line {}: bad value {:?}", i + 1, value.trim()))?;
        if out.insert(name.trim().to_string(), value).is_some() {
            bail!("best-known line {}: duplicate entry for {}", i + 1, name.trim());
        }
    }
    Ok(out)
}

pub fn read_best_known(path: &Path) -> Result<BTreeMap<String, u64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_best_known(&text)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2}")).unwrap_or_default()
}

/// Fixed-width results table with an aggregate footer.
pub fn render_table(records: &[BenchRecord]) -> String {
    let mut out = format!(
        "{:<20} {:>5} {:>7} | {:>7} {:>7} {:>7} | {:>8} {:>8} {:>5} | {:>6}\n",
        "instance", "|Q|", "|E|", "GRASP%", "SMH%", "Impr%", "GRASP s", "SMH s", "Rel", "#Trees"
    );
    for r in records {
        out.push_str(&format!(
            "{:<20} {:>5} {:>7} | {:>7} {:>7} {:>7} | {:>8.2} {:>8.2} {:>5.1} | {:>6}{}\n",
            r.instance,
            r.terminals,
            r.edges,
            fmt_opt(r.grasp_gap),
            fmt_opt(r.smh_gap),
            fmt_opt(r.improvement),
            r.grasp_time,
            r.smh_time,
            r.rel_time,
            r.trees_used,
            if r.new_best { "  new best" } else { "" }
        ));
    }
    let a = aggregate(records);
    out.push_str(&format!(
        "mean gap GRASP {} SMH {} | best known reached GRASP {}/{} SMH {}/{} | improved {}/{}\n",
        fmt_opt(a.mean_grasp_gap),
        fmt_opt(a.mean_smh_gap),
        a.grasp_best,
        a.with_best_known,
        a.smh_best,
        a.with_best_known,
        a.improved,
        a.instances
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_is_exact() {
        assert_eq!(compute_gap(1000, 1000), Some(Ratio::from_integer(0)));
        assert_eq!(compute_gap(10044, 10000).map(to_f64), Some(0.44));
        assert_eq!(compute_gap(990, 1000), Some(Ratio::from_integer(-1)));
        assert_eq!(compute_gap(5, 0), None);
        // 1/3 percent stays a third
        assert_eq!(compute_gap(301, 300), Some(Ratio::new(1, 3)));
    }

    #[test]
    fn improvement_needs_a_positive_gap() {
        let g = |n| Ratio::from_integer(n);
        assert_eq!(improvement(g(4), g(1)), Some(g(75)));
        assert_eq!(improvement(g(0), g(0)), None);
    }

    #[test]
    fn missing_best_known_leaves_gaps_empty() {
        let r = BenchRecord::new("x".into(), 3, 5, None, 10, 9, 1.0, 0.5, 2);
        assert_eq!((r.grasp_gap, r.smh_gap, r.improvement), (None, None, None));
        assert!(!r.new_best);
        assert_eq!(r.rel_time, 0.5);
    }

    #[test]
    fn best_known_file() {
        let m = parse_best_known("# optima\na,10\n\nb , 7\n").unwrap();
        assert_eq!(m.get("a"), Some(&10));
        assert_eq!(m.get("b"), Some(&7));
        assert!(parse_best_known("a 10").is_err());
        assert!(parse_best_known("a,x").is_err());
        assert!(parse_best_known("a,1\na,2").is_err());
    }
}
