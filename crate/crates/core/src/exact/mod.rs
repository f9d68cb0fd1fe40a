//! Exact Steiner tree solvers.

mod dp;
mod dreyfus_wagner;
mod partition;
mod reduce;

pub use dp::{dp_solve, DpConfig, DpError, DpOutcome, DpStats, NodeStat};
pub use dreyfus_wagner::{dreyfus_wagner, OracleError, DEFAULT_TERMINAL_CAP};
pub use partition::bell;

/// Largest bag the DP supports.
pub const MAX_BAG_SIZE: usize = partition::MAX_BAG;

use crate::graph::VertexId;
use crate::instance::SteinerInstance;
use crate::treewidth::{decomposition_from_order, greedy_degree_with, make_nice, NiceDecomposition, TieBreak};

/// Nice decomposition of the whole instance graph from a GreedyDegree order,
/// anchored at `anchor` (the lowest terminal when `None`).
pub fn greedy_nice_decomposition(
    instance: &SteinerInstance,
    tie: TieBreak,
    anchor: Option<VertexId>,
) -> NiceDecomposition {
    let g = instance.graph();
    let order = greedy_degree_with(g, tie);
    let td = decomposition_from_order(g, &order);
    make_nice(g, &td, anchor.unwrap_or(instance.terminals()[0]))
}

/// Solves `instance` exactly with the DP over a GreedyDegree decomposition.
pub fn solve_with_dp(instance: &SteinerInstance, cfg: &DpConfig) -> Result<DpOutcome, DpError> {
    dp_solve(
        instance,
        &greedy_nice_decomposition(instance, TieBreak::LowestId, None),
        cfg,
    )
}
