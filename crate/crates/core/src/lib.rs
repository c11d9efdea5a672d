//! Clustering and classification of text collections by maximizing
//! parametric modularity of the bipartite document-word graph.
//!
//! The pipeline is: [`corpus`] turns labelled token lines into a
//! [`BipartiteGraph`]; [`modularity`] optimizes partitions of it by cyclic
//! coordinate descent; [`classify`] pins training vertices and redistributes
//! the rest; [`eval`] scores results against gold labels.
//!
//! The optimizer is generic over a [`Scalar`]. Use the `*64` aliases for
//! real workloads and the `Exact*` aliases when a result must be checked
//! without rounding.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod graph;
pub mod modularity;
pub mod report;
pub mod scalar;
pub mod synthetic;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use classify::{classify, Classification, TrainingAssignment};
pub use corpus::{build_graph, load_corpus, preprocess, Corpus, Document, PipelineConfig, Split};
pub use error::{Error, Result};
pub use graph::{
    aggregate, canonicalize, AggregatedGraph, BipartiteGraph, Partition, Side, SimpleGraph,
};
pub use modularity::{
    cluster, finalize, local_descent, q_bipartite, q_simple, redistribute, AstrayOrder, Clustering,
    DescentConfig, DescentState, ModularityValue, Schedule, Target,
};
pub use scalar::{Exact, Scalar};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type ModularityValue64 = ModularityValue<f64>;
pub type DescentConfig64 = DescentConfig<f64>;
pub type Clustering64 = Clustering<f64>;

pub type ModularityValue32 = ModularityValue<f32>;
pub type DescentConfig32 = DescentConfig<f32>;

pub type ExactModularity = ModularityValue<Exact>;
pub type ExactDescentConfig = DescentConfig<Exact>;
pub type ExactClustering = Clustering<Exact>;
