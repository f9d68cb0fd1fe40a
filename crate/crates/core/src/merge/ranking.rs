use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::union::greedy_steiner_union;
use super::{solve_union, DpStatus, MergeConfig, MergeError, UnionSolve};
use crate::generator::{derive_seed, SolutionPool};
use crate::graph::Weight;
use crate::instance::{SteinerInstance, SteinerSolution};

/// Observed union values per pool member. Each list starts with the tree's
/// own weight; the adjusted value is the exact mean of the list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankingState {
    observations: Vec<Vec<Weight>>,
}

impl RankingState {
    pub fn new(pool: &SolutionPool) -> Self {
        RankingState {
            observations: pool.solutions().iter().map(|s| vec![s.weight()]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self, i: usize) -> &[Weight] {
        &self.observations[i]
    }

    /// Adds `value` to the observations of every listed member.
    pub fn record(&mut self, members: &[usize], value: Weight) {
        for &i in members {
            self.observations[i].push(value);
        }
    }

    /// Adjusted value of member `i` as `(sum, count)`.
    pub fn adjusted_fraction(&self, i: usize) -> (u128, u128) {
        let z = &self.observations[i];
        (z.iter().map(|&x| x as u128).sum(), z.len() as u128)
    }

    pub fn adjusted(&self, i: usize) -> f64 {
        let (sum, count) = self.adjusted_fraction(i);
        sum as f64 / count as f64
    }

    /// Exact comparison of adjusted values.
    pub fn cmp_adjusted(&self, i: usize, j: usize) -> Ordering {
        let (si, ci) = self.adjusted_fraction(i);
        let (sj, cj) = self.adjusted_fraction(j);
        (si * cj).cmp(&(sj * ci))
    }

    /// Member indices by adjusted value, then own weight, then index.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.cmp_adjusted(a, b)
                .then(self.observations[a][0].cmp(&self.observations[b][0]))
                .then(a.cmp(&b))
        });
        order
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub trees: usize,
    pub union_vertices: usize,
    pub union_edges: usize,
    pub width: usize,
    /// Optimum over the union; absent when the DP gave up.
    pub value: Option<Weight>,
    pub status: DpStatus,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct RankingOutcome {
    pub state: RankingState,
    /// Lightest union optimum seen and the iteration that produced it.
    pub incumbent: Option<(SteinerSolution, usize)>,
    pub iterations: Vec<IterationRecord>,
    pub timed_out: bool,
}

/// Runs `cfg.r` rounds of: shuffle the pool, select a union at width cap
/// `cfg.k`, solve it exactly and credit the value to every selected tree.
/// Rounds whose DP exceeds its budget add nothing. Each round draws its
/// shuffle from its own seed derived from `cfg.seed`.
pub fn ranking_procedure(
    instance: &SteinerInstance,
    pool: &SolutionPool,
    cfg: &MergeConfig,
) -> Result<RankingOutcome, MergeError> {
    cfg.validate()?;
    if pool.is_empty() {
        return Err(MergeError::EmptyPool);
    }
    let mut state = RankingState::new(pool);
    let mut incumbent: Option<(SteinerSolution, usize)> = None;
    let mut iterations = Vec::with_capacity(cfg.r);
    let mut timed_out = false;
    // the DP result depends only on the selected set, not on its order
    let mut solved: FxHashMap<Vec<usize>, Result<UnionSolve, MergeError>> = FxHashMap::default();

    for iteration in 0..cfg.r {
        if cfg.expired() {
            timed_out = true;
            break;
        }
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, iteration as u64));
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.shuffle(&mut rng);
        let sel = greedy_steiner_union(instance, pool, &order, cfg.k);
        let mut key = sel.accepted.clone();
        key.sort_unstable();
        let result = match solved.entry(key) {
            Entry::Occupied(e) => e.get().clone(),
            Entry::Vacant(e) => e.insert(solve_union(instance, pool, &sel, cfg)).clone(),
        };
        let (value, status) = match result {
            Ok(out) => {
                let w = out.solution.weight();
                state.record(&sel.accepted, w);
                if incumbent.as_ref().is_none_or(|(best, _)| w < best.weight()) {
                    incumbent = Some((out.solution, iteration));
                }
                (Some(w), DpStatus::Solved)
            }
            Err(e) => match DpStatus::from_error(&e) {
                Some(status) => (None, status),
                None => return Err(e),
            },
        };
        iterations.push(IterationRecord {
            iteration,
            trees: sel.accepted.len(),
            union_vertices: sel.graph.num_vertices(),
            union_edges: sel.edges.len(),
            width: sel.width(),
            value,
            status,
            seconds: start.elapsed().as_secs_f64(),
        });
        if status == DpStatus::Timeout {
            timed_out = true;
            break;
        }
    }
    Ok(RankingOutcome {
        state,
        incumbent,
        iterations,
        timed_out,
    })
}
