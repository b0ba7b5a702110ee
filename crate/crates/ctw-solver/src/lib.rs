//! Non-contracting embeddings of bounded distortion into hosts of bounded
//! treewidth, where the embedding need not be onto.
//!
//! The decision procedure walks a nice decomposition bottom-up. A state at
//! node `u` records which guest vertex, if any, sits on each host vertex
//! within `d` times the longest guest edge of the bag, the set of guest
//! vertices placed below `u`, and for every guest vertex placed below but
//! outside that ball its host distances to the bag. Every path from such a
//! vertex to the rest of the host crosses the bag, so these profiles settle
//! non-contraction against vertices placed later. Profile entries of at
//! least the guest diameter can never decide a check and are dropped.
//!
//! Alongside, [`types`](crate::TypeList) implement the truncated type
//! vectors, type-lists, compatibility, agreement and state succession of
//! the classical type-based formulation. They are exposed as predicates,
//! together with the states a known embedding induces, so that the
//! formulation can be checked against solved instances.

mod connect;
mod dp;
mod types;

pub use connect::{
    connect_decomposition, connectify, gamma, longest_geodesic_cycle, ConnectError, ConnectedNiceDecomposition,
};
pub use dp::embed_ctw_with;
pub use types::{
    agree, beta, beta_value, compatible, ctw_feasible, dichotomy_failures, state_feasible, state_succeeds,
    state_succeeds_with, states_from_embedding, threshold, CtwState, SharedRule, TypeContext, TypeList, TypeVector,
    Value,
};

use embed_core::{Embedding, SolveError};
use graph_core::{all_pairs_distances, Graph};

/// Limits for [`embed_ctw_with`].
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

/// Decides whether `g` has a non-contracting embedding into `h` with
/// expansion at most `d`, returning a verified witness if so.
pub fn embed_ctw(
    g: &Graph,
    h: &Graph,
    cnd: &ConnectedNiceDecomposition,
    d: u32,
) -> Result<Option<Embedding>, SolveError> {
    let (dg, dh) = (all_pairs_distances(g), all_pairs_distances(h));
    embed_ctw_with(g, &dg, h, &dh, &cnd.ntd, d, &Options::default()).map(|o| o.embedding)
}
