//! Window dynamic programs deciding non-contracting distortion-`d`
//! embeddings into cycles and lines.
//!
//! A solution is described by an anchor (a fixed placement of the guest
//! vertices near position 0 or near the ends of a line) and a chain of
//! windows of radius `r = d*M + 1` sliding one position at a time, where `M`
//! is the largest guest edge weight. Each window remembers which remaining
//! guest components lie to its left and to its right; the chain is searched
//! breadth-first. Every witness is checked against the full metric before it
//! is returned.

mod cycle;
mod engine;
mod line;
mod window;

use embed_core::{verify_nc_distortion, Embedding, Outcome, SolveError};
use graph_core::corpus::{cycle_graph, path_graph};
use graph_core::{all_pairs_distances, DistanceMatrix, Graph};
use oracle::{OracleResult, Problem, SearchBudget};

pub use cycle::{
    count_sequences, embed_into_cycle, embed_into_cycle_with, embed_weighted_into_cycle, empty_arcs, enumerate_anchors,
};
pub use line::{
    embed_into_line, embed_into_line_with, embed_line_fixed_ends, embed_line_fixed_ends_with, embed_line_prefix_last,
    embed_line_prefix_last_with, embed_track_fixed_ends_with, embed_track_prefix_last_with,
};
pub use window::{is_feasible, left_right, succeeds, Anchor, Track, WindowPartialEmbedding};

/// Limits shared by the solvers in this crate.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Maximum number of window states examined over all anchors.
    pub max_states: u64,
    /// Budget for the exhaustive fallback on very short hosts.
    pub oracle_budget: SearchBudget,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_states: 50_000_000, oracle_budget: SearchBudget::default() }
    }
}

fn check_guest(g: &Graph, dg: &DistanceMatrix, d: u32) -> Result<(), SolveError> {
    if g.n() == 0 || g.n() > 64 {
        return Err(SolveError::Input(format!("guest must have 1..=64 vertices, got {}", g.n())));
    }
    if dg.n() != g.n() {
        return Err(SolveError::Input("distance matrix does not match the guest".into()));
    }
    if !g.is_connected() {
        return Err(SolveError::Input("guest is disconnected".into()));
    }
    if d == 0 {
        return Err(SolveError::Input("distortion must be at least 1".into()));
    }
    Ok(())
}

fn host_graph(track: Track) -> Graph {
    match track {
        Track::Cycle(n) => cycle_graph(n),
        Track::Line(n) => path_graph(n),
    }
}

/// Converts positions to host ids and verifies the result.
fn finish(
    g: &Graph,
    dg: &DistanceMatrix,
    track: Track,
    d: u32,
    placed: &[(usize, i64)],
) -> Result<Embedding, SolveError> {
    let map = placed.iter().map(|&(u, p)| (u, track.vertex(p))).collect();
    let f = Embedding::new(g.n(), map);
    verified(g, dg, &host_graph(track), d, f)
}

fn verified(g: &Graph, dg: &DistanceMatrix, h: &Graph, d: u32, f: Embedding) -> Result<Embedding, SolveError> {
    let dh = all_pairs_distances(h);
    match verify_nc_distortion(g, h, dg, &dh, &f, d) {
        Ok(v) if v.is_ok() => Ok(f),
        Ok(v) => Err(SolveError::Unverified(format!("{v:?}"))),
        Err(e) => Err(SolveError::Unverified(e.to_string())),
    }
}

/// Exhaustive search on a short host, optionally restricting each guest
/// vertex to a list of host vertices.
fn fallback(
    dg: &DistanceMatrix,
    h: &Graph,
    d: u32,
    allowed: Option<Vec<Vec<usize>>>,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    let dh = all_pairs_distances(h);
    let p = Problem { allowed, ..Problem::new(dg, &dh, d) };
    let stats = oracle::search(&p, opts.oracle_budget);
    match stats.result {
        OracleResult::Found(f) => Ok(Outcome::found(f, stats.nodes)),
        OracleResult::Infeasible => Ok(Outcome::infeasible(stats.nodes)),
        OracleResult::BudgetExceeded => Err(SolveError::BudgetExceeded),
    }
}
