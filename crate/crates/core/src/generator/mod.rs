//! Multistart generation of a pool of distinct locally optimal Steiner trees.

mod local_search;
mod pool_file;
mod sph;

pub use local_search::local_search;
pub use pool_file::{read_pool, write_pool, PoolFileError};
pub use sph::sph_construct;

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Weight};
use crate::instance::{SteinerInstance, SteinerSolution};

/// Seed for the `index`-th independent stream derived from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub pool_size: usize,
    /// Restarts per run; the run keeps its best tree.
    pub iterations_per_run: usize,
    /// Edge weights are scaled by `1 + u` with `u` uniform in `[0, strength)`
    /// during construction.
    pub perturbation_strength: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            pool_size: 16,
            iterations_per_run: 8,
            perturbation_strength: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("pool size must be at least 1")]
    EmptyPool,
    #[error("iterations per run must be at least 1")]
    NoIterations,
    #[error("perturbation strength {0} is outside [0, 1)")]
    Perturbation(f64),
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.pool_size == 0 {
            return Err(GeneratorError::EmptyPool);
        }
        if self.iterations_per_run == 0 {
            return Err(GeneratorError::NoIterations);
        }
        if !(0.0..1.0).contains(&self.perturbation_strength) {
            return Err(GeneratorError::Perturbation(self.perturbation_strength));
        }
        Ok(())
    }
}

/// Where a pool member came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub run: usize,
    pub iteration: usize,
    /// The run's derived seed.
    pub seed: u64,
}

/// Distinct Steiner trees of one instance in a fixed order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolutionPool {
    solutions: Vec<SteinerSolution>,
    provenance: Vec<Provenance>,
}

impl SolutionPool {
    /// Builds a pool, dropping repeated edge sets (the first copy stays).
    pub fn new(members: impl IntoIterator<Item = (SteinerSolution, Provenance)>) -> Self {
        let mut seen: FxHashSet<Vec<EdgeId>> = FxHashSet::default();
        let mut pool = SolutionPool::default();
        for (s, p) in members {
            if seen.insert(s.edges().to_vec()) {
                pool.solutions.push(s);
                pool.provenance.push(p);
            }
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn solutions(&self) -> &[SteinerSolution] {
        &self.solutions
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn get(&self, i: usize) -> &SteinerSolution {
        &self.solutions[i]
    }

    pub fn weights(&self) -> Vec<Weight> {
        self.solutions.iter().map(|s| s.weight()).collect()
    }

    /// Index of the lightest member, lowest index on ties.
    pub fn best_index(&self) -> Option<usize> {
        (0..self.len()).min_by_key(|&i| (self.solutions[i].weight(), i))
    }

    pub fn best(&self) -> Option<&SteinerSolution> {
        self.best_index().map(|i| &self.solutions[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SteinerSolution, &Provenance)> {
        self.solutions.iter().zip(&self.provenance)
    }
}

/// Perturbed copy of the instance's edge weights.
fn perturbed_weights<R: Rng + ?Sized>(instance: &SteinerInstance, strength: f64, rng: &mut R) -> Vec<f64> {
    instance
        .graph()
        .edges()
        .iter()
        .map(|e| {
            let u = if strength > 0.0 {
                rng.random_range(0.0..strength)
            } else {
                0.0
            };
            e.weight as f64 * (1.0 + u)
        })
        .collect()
}

/// One restart: perturb, construct from a random terminal, improve.
pub fn grasp_iteration<R: Rng + ?Sized>(instance: &SteinerInstance, strength: f64, rng: &mut R) -> SteinerSolution {
    let weights = perturbed_weights(instance, strength, rng);
    let q = instance.terminals();
    let start = q[rng.random_range(0..q.len())];
    let tree = sph_construct(instance, &weights, start, rng);
    local_search(instance, &tree, rng)
}

fn run(
    instance: &SteinerInstance,
    cfg: &GeneratorConfig,
    run: usize,
    deadline: Option<Instant>,
) -> (Option<(SteinerSolution, Provenance)>, bool) {
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);
    // the first run always completes one restart so the pool is never empty
    if run > 0 && expired() {
        return (None, true);
    }
    let seed = derive_seed(cfg.seed, run as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(SteinerSolution, usize)> = None;
    let mut truncated = false;
    for iteration in 0..cfg.iterations_per_run {
        if iteration > 0 && expired() {
            truncated = true;
            break;
        }
        let tree = grasp_iteration(instance, cfg.perturbation_strength, &mut rng);
        if best.as_ref().is_none_or(|(b, _)| tree.weight() < b.weight()) {
            best = Some((tree, iteration));
        }
    }
    (
        best.map(|(tree, iteration)| (tree, Provenance { run, iteration, seed })),
        truncated,
    )
}

/// Outcome of a possibly time-limited generation.
#[derive(Clone, Debug)]
pub struct Generated {
    pub pool: SolutionPool,
    /// Set when the deadline cut generation short.
    pub timed_out: bool,
}

/// Runs `cfg.pool_size` independent multistart runs and returns their best
/// trees, deduplicated, in run order. A pure function of its arguments.
///
/// # Panics
/// If `cfg` is invalid.
pub fn generate_pool(instance: &SteinerInstance, cfg: &GeneratorConfig) -> SolutionPool {
    generate_pool_until(instance, cfg, None, false).pool
}

/// [`generate_pool`] with the runs spread over the rayon thread pool. The
/// result is identical to the sequential one.
pub fn generate_pool_parallel(instance: &SteinerInstance, cfg: &GeneratorConfig) -> SolutionPool {
    generate_pool_until(instance, cfg, None, true).pool
}

/// Generation that stops starting new restarts once `deadline` has passed.
/// At least one tree is always produced.
pub fn generate_pool_until(
    instance: &SteinerInstance,
    cfg: &GeneratorConfig,
    deadline: Option<Instant>,
    parallel: bool,
) -> Generated {
    if let Err(e) = cfg.validate() {
        panic!("invalid generator config: {e}");
    }
    let results: Vec<(Option<(SteinerSolution, Provenance)>, bool)> = if parallel {
        (0..cfg.pool_size)
            .into_par_iter()
            .map(|r| run(instance, cfg, r, deadline))
            .collect()
    } else {
        (0..cfg.pool_size).map(|r| run(instance, cfg, r, deadline)).collect()
    };
    let timed_out = results.iter().any(|(_, truncated)| *truncated);
    Generated {
        pool: SolutionPool::new(results.into_iter().filter_map(|(r, _)| r)),
        timed_out,
    }
}

#[cfg(test)]
mod tests;
