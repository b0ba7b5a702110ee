//! Embeddings, exact distortion arithmetic, verification and the host
//! subdivision reductions.

mod embedding;
mod reduction;

pub use embedding::{
    distortion_report, fmt_ratio, host_dot, union_embedding, verify_nc_distortion, verify_nc_ratio, DistortionReport,
    Embedding, EmbeddingJson, Verification, ViolationKind,
};
pub use num_rational::Ratio;
pub use reduction::{
    bijective_reduction_gate, gen_reduction_instances, subdivide_red_blue, RedBlueHost, ReductionInstance,
    DEFAULT_REDUCTION_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("guest vertices {a} and {b} both map to host vertex {host}")]
    NotInjective { a: usize, b: usize, host: usize },
    #[error("embedding is partial: guest vertex {missing} has no image")]
    Partial { missing: usize },
    #[error("pair ({u}, {v}) is at infinite distance")]
    InfiniteDistance { u: usize, v: usize },
    #[error("conflicting images for guest vertex {vertex}: {first} and {second}")]
    Conflict { vertex: usize, first: usize, second: usize },
    #[error("distortion {num}/{den} must be a ratio >= 1")]
    BadDistortion { num: u64, den: u64 },
    #[error("reduction needs {needed} instances, budget is {budget}")]
    ReductionBudget { needed: usize, budget: usize },
}

/// Failure modes shared by the solvers; `Ok(None)` means infeasible.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("input error: {0}")]
    Input(String),
    #[error("search budget exceeded")]
    BudgetExceeded,
    /// A constructed witness failed final verification. Never expected; kept
    /// as an explicit error instead of a silent verdict.
    #[error("witness failed verification: {0}")]
    Unverified(String),
}

/// Verdict of a solver together with the amount of search it did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub embedding: Option<Embedding>,
    /// Solver-specific work counter (DP states or search nodes).
    pub nodes: u64,
}

impl Outcome {
    pub fn infeasible(nodes: u64) -> Self {
        Outcome { embedding: None, nodes }
    }

    pub fn found(f: Embedding, nodes: u64) -> Self {
        Outcome { embedding: Some(f), nodes }
    }
}
