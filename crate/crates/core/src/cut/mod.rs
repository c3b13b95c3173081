//! Directed non-bipartite sparsest cut and multicut via LP rounding.

mod instance;
pub mod lp;
mod multicut;
mod sparsest;

use thiserror::Error;

use crate::embedding::EmbeddingError;
use crate::graph::GraphError;
use crate::partition::PartitionError;

pub use instance::{sparsity_of, CutInstance, CutResult, TerminalPair};
pub use lp::{solve_lp, Constraint, LinearProgram, LpError, LpSolution, Sense};
pub use multicut::{harmonic, solve_multicut, MulticutIteration, MulticutReport};
pub use sparsest::{
    build_sparsest_cut_lp, lp_distances_to_quasimetric, round_sparsest_cut, solve_sparsest_cut, CutOptions,
    RoundingCertificate, SeparatorStrategy, SparsestCutLp, SparsestCutReport, CERTIFICATE_RTOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutError {
    #[error("pair {index}: {reason}")]
    InvalidPair { index: usize, reason: &'static str },
    #[error("no pair has positive demand")]
    NoDemand,
    #[error("{n} vertices exceeds the LP limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("no candidate cut separates any demand")]
    NoSeparatingCandidate,
    #[error("certificate check failed ({stage}): {sparsity} > {bound}")]
    CertificateViolated { stage: &'static str, sparsity: f64, bound: f64 },
    #[error("round {iteration} separated no pairs")]
    NonProgress { iteration: usize },
    #[error("union of cuts leaves a pair connected")]
    NotAMulticut,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
