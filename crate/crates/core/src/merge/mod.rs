//! Solution merging: width-bounded union selection, ranking of pool members
//! by the quality of the unions they join, and the full pipeline.

mod ranking;
mod union;

pub use ranking::{ranking_procedure, IterationRecord, RankingOutcome, RankingState};
pub use union::{greedy_steiner_union, UnionSelection};

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{dp_solve, DpConfig, DpError, MAX_BAG_SIZE};
use crate::generator::SolutionPool;
use crate::graph::Weight;
use crate::instance::{InstanceError, SteinerInstance, SteinerSolution};
use crate::treewidth::{decomposition_from_order, make_nice, validate, validate_nice, EliminationOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeConfig {
    /// Width cap of the final union.
    pub m: usize,
    /// Width cap of the ranking unions.
    pub k: usize,
    /// Ranking iterations.
    pub r: usize,
    /// Also consider the ranking incumbents and every cap from `k` to `m`
    /// for the final answer.
    pub keep_best: bool,
    pub seed: u64,
    /// DP table budget per union.
    pub max_entries: usize,
    pub deadline: Option<Instant>,
    /// Run the decomposition validators on every union (slow; for testing).
    pub check_decompositions: bool,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig {
            m: 10,
            k: 8,
            r: 20,
            keep_best: true,
            seed: 0,
            max_entries: DpConfig::default().max_entries,
            deadline: None,
            check_decompositions: false,
        }
    }
}

impl MergeConfig {
    pub fn validate(&self) -> Result<(), MergeError> {
        if self.k > self.m {
            return Err(MergeError::RankWidthAboveFinal { k: self.k, m: self.m });
        }
        if self.k == 0 {
            return Err(MergeError::ZeroWidth);
        }
        // bags hold width + 1 vertices plus the anchor
        if self.m + 2 > MAX_BAG_SIZE {
            return Err(MergeError::WidthTooLarge {
                m: self.m,
                max: MAX_BAG_SIZE - 2,
            });
        }
        Ok(())
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn dp_config(&self, upper_bound: Weight) -> DpConfig {
        DpConfig {
            max_entries: self.max_entries,
            deadline: self.deadline,
            upper_bound: Some(upper_bound),
            ..DpConfig::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MergeError {
    #[error("ranking width {k} exceeds the final width {m}")]
    RankWidthAboveFinal { k: usize, m: usize },
    #[error("width caps must be at least 1")]
    ZeroWidth,
    #[error("width cap {m} exceeds the supported maximum {max}")]
    WidthTooLarge { m: usize, max: usize },
    #[error("the solution pool is empty")]
    EmptyPool,
    #[error("union instance: {0}")]
    Restrict(#[from] InstanceError),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error(transparent)]
    Dp(#[from] DpError),
}

/// What happened to one union DP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DpStatus {
    Solved,
    Capacity,
    Timeout,
}

impl DpStatus {
    /// Errors the pipeline survives map to a status; anything else is a bug.
    fn from_error(e: &MergeError) -> Option<DpStatus> {
        match e {
            MergeError::Dp(DpError::Capacity { .. }) => Some(DpStatus::Capacity),
            MergeError::Dp(DpError::Timeout) => Some(DpStatus::Timeout),
            _ => None,
        }
    }
}

/// Optimum of the instance restricted to a union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionSolve {
    /// In host edge ids.
    pub solution: SteinerSolution,
    pub nice_width: usize,
    pub dp_entries: usize,
}

/// Solves `STP(G_U, Q)` for the selected union with the DP over the
/// decomposition given by the selection's elimination order. The lightest
/// selected tree bounds the DP.
pub fn solve_union(
    instance: &SteinerInstance,
    pool: &SolutionPool,
    sel: &UnionSelection,
    cfg: &MergeConfig,
) -> Result<UnionSolve, MergeError> {
    let bound = sel
        .accepted
        .iter()
        .map(|&i| pool.get(i).weight())
        .min()
        .expect("selection is nonempty");
    let restriction = instance.restrict(&sel.edges)?;
    let local = &restriction.instance;
    let lg = local.graph();
    let to_local = |v: usize| {
        restriction
            .to_host_vertex
            .binary_search(&v)
            .expect("union vertex is in the restriction")
    };
    let order = EliminationOrder::from_order(lg, sel.order.order().iter().map(|&v| to_local(v)).collect())
        .expect("relabelled order is a permutation");
    let td = decomposition_from_order(lg, &order);
    let nice = make_nice(lg, &td, local.terminals()[0]);
    if cfg.check_decompositions {
        if let Some(v) = validate(lg, &td).first() {
            return Err(MergeError::InvalidDecomposition(v.to_string()));
        }
        if let Some(v) = validate_nice(lg, &nice).first() {
            return Err(MergeError::InvalidDecomposition(v.to_string()));
        }
        if nice.width() > td.width() + 1 {
            return Err(MergeError::InvalidDecomposition(format!(
                "nice width {} inflates width {} by more than one",
                nice.width(),
                td.width()
            )));
        }
    }
    let out = dp_solve(local, &nice, &cfg.dp_config(bound))?;
    Ok(UnionSolve {
        solution: restriction.lift(&out.solution),
        nice_width: nice.width(),
        dp_entries: out.stats.total_entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionSource {
    /// The union at the final cap `m`.
    FinalDp,
    /// The union at a smaller cap between `k` and `m`.
    Ladder {
        cap: usize,
    },
    Ranking {
        iteration: usize,
    },
    Pool {
        index: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoolStats {
    pub size: usize,
    pub best: Weight,
    pub worst: Weight,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedTree {
    pub index: usize,
    pub weight: Weight,
    pub adjusted: f64,
    pub observations: usize,
}

/// One union solved at a given cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapStep {
    pub cap: usize,
    pub trees_used: usize,
    pub union_vertices: usize,
    pub union_edges: usize,
    pub width: usize,
    pub value: Option<Weight>,
    pub status: DpStatus,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeReport {
    pub instance: String,
    pub pool: PoolStats,
    /// Pool members in pool order with their adjusted values.
    pub ranking: Vec<RankedTree>,
    pub iterations: Vec<IterationRecord>,
    pub final_step: CapStep,
    /// Extra caps tried below `m` when `keep_best` is on.
    pub ladder: Vec<CapStep>,
    pub weight: Weight,
    pub source: SolutionSource,
    pub capacity_fallback: bool,
    pub timed_out: bool,
    pub ranking_seconds: f64,
    pub merge_seconds: f64,
    #[serde(skip)]
    pub solution: SteinerSolution,
}

impl MergeReport {
    /// Pool trees in the final union.
    pub fn trees_used(&self) -> usize {
        self.final_step.trees_used
    }

    pub fn improved(&self) -> bool {
        self.weight < self.pool.best
    }
}

fn solve_at_cap(
    instance: &SteinerInstance,
    pool: &SolutionPool,
    sel: &UnionSelection,
    cap: usize,
    cfg: &MergeConfig,
    start: Instant,
) -> Result<(CapStep, Option<SteinerSolution>), MergeError> {
    let (solution, status) = match solve_union(instance, pool, sel, cfg) {
        Ok(out) => (Some(out.solution), DpStatus::Solved),
        Err(e) => (None, DpStatus::from_error(&e).ok_or(e)?),
    };
    let step = CapStep {
        cap,
        trees_used: sel.accepted.len(),
        union_vertices: sel.graph.num_vertices(),
        union_edges: sel.edges.len(),
        width: sel.width(),
        value: solution.as_ref().map(|s| s.weight()),
        status,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((step, solution))
}

/// The merge pipeline: rank the pool, sort it by adjusted value, select the
/// union at cap `m`, solve it exactly and return the lightest tree among the
/// final optimum, the best pool member and, with `keep_best`, the ranking
/// incumbent and the optima at every cap from `k` to `m`.
///
/// DP budget or deadline failures degrade to the best tree found so far and
/// are flagged in the report.
pub fn run_smh(instance: &SteinerInstance, pool: &SolutionPool, cfg: &MergeConfig) -> Result<MergeReport, MergeError> {
    cfg.validate()?;
    if pool.is_empty() {
        return Err(MergeError::EmptyPool);
    }
    let start = Instant::now();
    let ranking = ranking_procedure(instance, pool, cfg)?;
    let ranking_seconds = start.elapsed().as_secs_f64();
    let order = ranking.state.sorted_order();

    let final_start = Instant::now();
    let final_sel = greedy_steiner_union(instance, pool, &order, cfg.m);
    let (final_step, final_solution) = solve_at_cap(instance, pool, &final_sel, cfg.m, cfg, final_start)?;
    let mut timed_out = ranking.timed_out || final_step.status == DpStatus::Timeout;
    let capacity_fallback = final_step.status == DpStatus::Capacity;

    let mut candidates: Vec<(SteinerSolution, SolutionSource)> = Vec::new();
    candidates.extend(final_solution.map(|s| (s, SolutionSource::FinalDp)));
    let mut ladder = Vec::new();
    if cfg.keep_best {
        // solving every smaller cap makes the answer monotone in m
        let mut seen = vec![sorted(&final_sel.accepted)];
        for cap in (cfg.k..cfg.m).rev() {
            if timed_out || cfg.expired() {
                timed_out = true;
                break;
            }
            let cap_start = Instant::now();
            let sel = greedy_steiner_union(instance, pool, &order, cap);
            let key = sorted(&sel.accepted);
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let (step, solution) = solve_at_cap(instance, pool, &sel, cap, cfg, cap_start)?;
            timed_out |= step.status == DpStatus::Timeout;
            candidates.extend(solution.map(|s| (s, SolutionSource::Ladder { cap })));
            ladder.push(step);
        }
        if let Some((s, iteration)) = ranking.incumbent.clone() {
            candidates.push((s, SolutionSource::Ranking { iteration }));
        }
    }
    let best_pool = pool.best_index().expect("pool is nonempty");
    candidates.push((pool.get(best_pool).clone(), SolutionSource::Pool { index: best_pool }));

    let mut best = 0;
    for (i, (s, _)) in candidates.iter().enumerate() {
        if s.weight() < candidates[best].0.weight() {
            best = i;
        }
    }
    let (solution, source) = candidates.swap_remove(best);

    let weights = pool.weights();
    let report = MergeReport {
        instance: instance.name().to_string(),
        pool: PoolStats {
            size: pool.len(),
            best: *weights.iter().min().expect("nonempty"),
            worst: *weights.iter().max().expect("nonempty"),
            mean: weights.iter().map(|&w| w as f64).sum::<f64>() / weights.len() as f64,
        },
        ranking: (0..pool.len())
            .map(|i| RankedTree {
                index: i,
                weight: weights[i],
                adjusted: ranking.state.adjusted(i),
                observations: ranking.state.observations(i).len(),
            })
            .collect(),
        iterations: ranking.iterations,
        final_step,
        ladder,
        weight: solution.weight(),
        source,
        capacity_fallback,
        timed_out,
        ranking_seconds,
        merge_seconds: start.elapsed().as_secs_f64(),
        solution,
    };
    Ok(report)
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests;
