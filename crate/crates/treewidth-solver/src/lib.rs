//! Bijective non-contracting embeddings into hosts of bounded treewidth.
//!
//! The host comes with a nice tree decomposition. For a node `u` with bag
//! `X_u`, a state fixes which guest vertex sits on every red host vertex
//! within distance `r` of the bag, together with the set of guest vertices
//! that map into the part of the host below `u`. States are built bottom-up:
//! introduce nodes fill the newly reachable host vertices, forget nodes
//! project, join nodes pair children that agree on the ball and split the
//! guest between their subtrees. A guest is embeddable iff the root keeps a
//! state whose lower set is the whole guest.
//!
//! Tree decompositions are read in the PACE format or computed: exactly for
//! hosts on at most 12 vertices, by the min-degree heuristic beyond.

mod dp;
mod nice;
mod td;

use graph_core::{DistanceMatrix, Graph};

pub use dp::{
    bijective_embed_tw, bijective_embed_tw_with, tw_feasible, tw_join_succeeds, tw_succeeds, TwInstance,
    TwPartialEmbedding,
};
pub use nice::{default_steps, make_nice, make_nice_with, NiceNode, NiceTreeDecomposition, NodeKind, Step, StepFn};
pub use td::{
    exact_elimination_order, from_elimination_order, min_degree_order, parse_pace, tree_decomposition, write_pace,
    TreeDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TdError {
    #[error("decomposition is not a tree: {0}")]
    NotATree(String),
    #[error("decomposition is for {found} vertices, host has {expected}")]
    VertexCount { expected: usize, found: usize },
    #[error("bag names vertex {0}, which is not a host vertex")]
    VertexOutOfRange(usize),
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(usize),
    #[error("edge ({0}, {1}) is in no bag")]
    UncoveredEdge(usize, usize),
    #[error("bags containing vertex {0} do not form a subtree")]
    DisconnectedOccurrence(usize),
    #[error("not a nice decomposition: {0}")]
    NotNice(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Limits for [`bijective_embed_tw_with`].
#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Maximum number of states kept over all nodes.
    pub max_states: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_states: 20_000_000 }
    }
}

/// Host vertices within distance `r` of some vertex of `bag`, sorted.
pub fn ball_union(h: &Graph, dh: &DistanceMatrix, bag: &[usize], r: u32) -> Vec<usize> {
    (0..h.n()).filter(|&x| bag.iter().any(|&b| dh.get(b, x) <= r)).collect()
}
