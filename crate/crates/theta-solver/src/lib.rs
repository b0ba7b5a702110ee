//! Non-contracting distortion-`d` embeddings into generalized theta graphs.
//!
//! The host consists of `k` paths (arms) between the terminals `s` and `t`.
//! The solver fixes the placement `Ψ` of every guest vertex that lands
//! within `2d^2` of a terminal. The remaining guest vertices form residual
//! components of the guest minus the vertices near the terminals, and each
//! residual component lives on one arm. Depending on which terminals it
//! reaches, a component is placed by the fixed-ends line program (it spans
//! the arm) or by the prefix-last line program at the shortest length for
//! each candidate last vertex. Arms shorter than `4d^2 + 2d` have their
//! residual vertices placed exhaustively. Every assembled map is verified
//! against the full metric before it is returned.
//!
//! Hosts whose large terminal balls intersect are decided by exhaustive
//! search.

mod arm;
mod config;
mod host;
mod psi;
mod solve;

use oracle::SearchBudget;

pub use arm::{
    full_component_embedding, last_vertex_candidates, short_arm_guesses, shortest_component_embedding, ArmMap,
};
pub use config::{classify_components, enumerate_configurations, ArmPlan, Component, Form, Role, ThetaConfiguration};
pub use host::{ArmTruncation, Balls, ThetaHost};
pub use psi::{enumerate_psi, Psi};
pub use solve::{embed_into_theta, embed_into_theta_with};

/// Limits and switches for [`embed_into_theta_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Limits for the line programs run on single arms.
    pub line: line_cycle_solver::Options,
    /// Budget for the exhaustive search on short hosts.
    pub oracle_budget: SearchBudget,
    /// On two-arm hosts, also run the cycle solver and report a
    /// disagreement as an error.
    pub cross_check_cycle: bool,
}
