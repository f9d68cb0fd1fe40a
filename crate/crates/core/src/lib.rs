//! Steiner tree solution merging.
//!
//! A pool of locally optimal Steiner trees is generated, a subset whose graph
//! union has a small GreedyDegree width is selected, and the instance
//! restricted to that union is solved exactly with a dynamic program over a
//! nice tree decomposition.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`instance`] and [`stp`]: weighted graphs, Steiner instances
//!   and solutions, SteinLib file IO.
//! * [`treewidth`]: elimination orders, tree decompositions and nice
//!   decompositions.
//! * [`exact`]: the tree-decomposition DP and a Dreyfus-Wagner oracle.
//! * [`generator`]: multistart construction of the solution pool.
//! * [`merge`]: union selection, ranking and the full merge pipeline.

pub mod exact;
pub mod generator;
pub mod graph;
pub mod instance;
pub mod merge;
pub mod stp;
pub mod synth;
pub mod treewidth;

mod dsu;

pub use graph::{graph_union, shortest_paths, Edge, EdgeId, GraphError, VertexId, Weight, WeightedGraph};
pub use instance::{prune, InstanceError, SolutionError, SteinerInstance, SteinerSolution};
