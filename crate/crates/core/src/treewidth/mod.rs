//! Elimination orderings, tree decompositions and nice decompositions.

mod decomposition;
mod elimination;
mod nice;
pub mod pace;

pub use decomposition::{decomposition_from_order, validate, TreeDecomposition, Violation};
pub use elimination::{
    greedy_degree, greedy_degree_width_max_m, greedy_degree_width_max_m_with, greedy_degree_with, CappedWidth,
    EliminationOrder, OrderError, TieBreak,
};
pub use nice::{make_nice, validate_nice, NiceDecomposition, NiceKind, NiceNode, NiceViolation};
