//! Random quasipartitions of directed shortest-path quasimetrics, the
//! quasiultrametric and 0-1 embeddings they induce, and the resulting
//! approximation algorithms for directed sparsest cut and multicut.
//!
//! Randomness is always external: samplers take the threshold shift `z`
//! as an argument, and every sampler has an exact counterpart that returns
//! the full distribution over uniform `z`.

pub mod cut;
pub mod embedding;
pub mod gen;
pub mod graph;
pub mod metric;
pub mod oracle;
pub mod partition;
pub mod verify;

use thiserror::Error;

pub use cut::{CutInstance, CutResult, TerminalPair};
pub use embedding::{ConvexCombination01, ScaleFamily};
pub use graph::{Edge, WeightedDigraph};
pub use metric::{DistanceMatrix, QuasiUltrametric, Quasimetric};
pub use partition::{Quasipartition, Relation, TreeDecomposition, WeightedSupport};

pub const DEFAULT_MAX_VERTICES: usize = 512;
pub const DEFAULT_MAX_LP_VERTICES: usize = 16;
pub const MAX_N_ENV: &str = "QUASICUT_MAX_N";

/// Vertex-count caps for the all-pairs and LP code paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_lp_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_vertices: DEFAULT_MAX_VERTICES, max_lp_vertices: DEFAULT_MAX_LP_VERTICES }
    }
}

impl Limits {
    /// Defaults, with both caps replaced by `QUASICUT_MAX_N` when it parses.
    pub fn from_env() -> Self {
        match std::env::var(MAX_N_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            Some(n) => Self { max_vertices: n, max_lp_vertices: n },
            None => Self::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Matrix(#[from] metric::MatrixError),
    #[error(transparent)]
    Metric(#[from] metric::Violation),
    #[error(transparent)]
    Partition(#[from] partition::PartitionError),
    #[error(transparent)]
    Embedding(#[from] embedding::EmbeddingError),
    #[error(transparent)]
    Cut(#[from] cut::CutError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
}
