//! Modularity objectives and the optimizers built on them.

mod descent;
mod objective;
mod redistribute;
mod schedule;

pub use descent::{local_descent, AstrayOrder, DescentConfig, DescentState, Schedule, Target};
pub use objective::{q_aggregated, q_bipartite, q_simple, ModularityValue};
pub use redistribute::{finalize, largest_clusters, redistribute, AnchorAssignment};
pub use schedule::{cluster, Clustering};

pub(crate) use redistribute::redistribute_to_anchors;
