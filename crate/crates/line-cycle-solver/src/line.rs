use embed_core::{Embedding, Outcome, SolveError};
use graph_core::corpus::path_graph;
use graph_core::{DistanceMatrix, Graph};

use crate::engine::{Counter, End, Frame, Run};
use crate::window::{full_mask, neighbor_masks, Anchor, Track};
use crate::{check_guest, fallback, finish, host_graph, Options};

/// Decides whether `g` embeds into the path on `len` vertices (host ids
/// `0..len`) non-contracting with distortion at most `d`.
pub fn embed_into_line(g: &Graph, dg: &DistanceMatrix, len: usize, d: u32) -> Result<Option<Embedding>, SolveError> {
    embed_into_line_with(g, dg, len, d, &Options::default()).map(|o| o.embedding)
}

pub fn embed_into_line_with(
    g: &Graph,
    dg: &DistanceMatrix,
    len: usize,
    d: u32,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    check_guest(g, dg, d)?;
    line_general(g, dg, len, d, opts)
}

fn radius(g: &Graph, d: u32) -> (u64, i64) {
    let dm = d as u64 * g.max_weight() as u64;
    (dm, dm as i64 + 1)
}

pub(crate) fn line_general(
    g: &Graph,
    dg: &DistanceMatrix,
    len: usize,
    d: u32,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    let n = g.n();
    let (dm, r) = radius(g, d);
    if n > len || g.max_degree() as u64 > 2 * dm {
        return Ok(Outcome::infeasible(0));
    }
    if n == 1 {
        return Ok(Outcome::found(Embedding::from_images(&[0]), 0));
    }
    // With the leftmost vertex at position 1 nothing lands beyond 1 + d*M*(n-1).
    let len = len.min((dm * (n as u64 - 1)) as usize + 1);
    if (len as i64) - 1 < 2 * r + 1 {
        return fallback(dg, &path_graph(len), d, None, opts);
    }
    let mut counter = Counter { used: 0, max: opts.max_states };
    for v in 0..n {
        let anchor = [(v, 1)];
        if let Some(sol) = run(g, dg, d, Track::Line(len), &anchor, r + 2, len as i64 - r, End::Any, &mut counter)? {
            return Ok(Outcome::found(finish(g, dg, Track::Line(len), d, &sol)?, counter.used));
        }
    }
    Ok(Outcome::infeasible(counter.used))
}

#[allow(clippy::too_many_arguments)]
fn run(
    g: &Graph,
    dg: &DistanceMatrix,
    d: u32,
    track: Track,
    anchor: &[(usize, i64)],
    lo: i64,
    hi: i64,
    end: End,
    counter: &mut Counter,
) -> Result<Option<Vec<(usize, i64)>>, SolveError> {
    let nbr = neighbor_masks(g);
    let all = full_mask(g.n());
    let w = anchor.iter().fold(0u64, |m, &(u, _)| m | 1 << u);
    let (_, r) = radius(g, d);
    let frame = Frame { dg, nbr: &nbr, all, d: d as u64, r, track, anchor, w, lo, hi, end };
    match frame.run(counter) {
        Run::Found(sol) => Ok(Some(sol)),
        Run::Exhausted => Ok(None),
        Run::Budget => Err(SolveError::BudgetExceeded),
    }
}

fn check_zone(psi: &Anchor, track: Track, name: &str) -> Result<(), SolveError> {
    let (lo, hi) = match track {
        Track::Line(n) => (1, n as i64),
        Track::Cycle(n) => (0, n as i64 - 1),
    };
    match psi.map().values().find(|&&p| p < lo || p > hi) {
        Some(p) => Err(SolveError::Input(format!("{name} places a vertex at {p}, outside {lo}..={hi}"))),
        None => Ok(()),
    }
}

/// Extends `psi1` (on the prefix `1..=a1`, `a1` its last used position) and
/// `psi2` (on the suffix from its first used position) to a non-contracting
/// distortion-`d` embedding into the path with positions `1..=N`. Position
/// `p` is host vertex `p - 1`.
pub fn embed_line_fixed_ends(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
    psi1: &Anchor,
    psi2: &Anchor,
) -> Result<Option<Embedding>, SolveError> {
    embed_line_fixed_ends_with(g, dg, n_host, d, psi1, psi2, &Options::default()).map(|o| o.embedding)
}

pub fn embed_line_fixed_ends_with(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
    psi1: &Anchor,
    psi2: &Anchor,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    embed_track_fixed_ends_with(g, dg, Track::Line(n_host), d, psi1, psi2, opts)
}

/// [`embed_line_fixed_ends_with`] on any track. The unanchored vertices go
/// strictly between the last position of `psi1` and the first of `psi2`,
/// and every pair is judged by the track's own distance. On a cycle the
/// positions are `0..N`, `psi2` must be nonempty and the free stretch must
/// not wrap past position `N - 1`.
pub fn embed_track_fixed_ends_with(
    g: &Graph,
    dg: &DistanceMatrix,
    track: Track,
    d: u32,
    psi1: &Anchor,
    psi2: &Anchor,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    check_guest(g, dg, d)?;
    check_zone(psi1, track, "prefix anchor")?;
    check_zone(psi2, track, "suffix anchor")?;
    if psi1.is_empty() {
        return Err(SolveError::Input("prefix anchor is empty".into()));
    }
    if psi1.domain_mask() & psi2.domain_mask() != 0 {
        return Err(SolveError::Input("anchors share a guest vertex".into()));
    }
    let n_host = track.len();
    let a1 = *psi1.map().values().max().expect("nonempty");
    let z2 = match (psi2.map().values().min(), track) {
        (Some(&z), _) => z,
        (None, Track::Line(_)) => n_host as i64 + 1,
        (None, Track::Cycle(_)) => return Err(SolveError::Input("suffix anchor is empty".into())),
    };
    if a1 >= z2 {
        return Err(SolveError::Input("prefix and suffix zones overlap".into()));
    }
    let (dm, r) = radius(g, d);
    let n = g.n();
    let both = Anchor::new(psi1.pairs().into_iter().chain(psi2.pairs()));
    if n > n_host || g.max_degree() as u64 > 2 * dm || !both.is_valid(dg, d, track) {
        return Ok(Outcome::infeasible(0));
    }
    // Vertices pinned at both extremes of a line are at most d*M*(n-1) apart.
    if matches!(track, Track::Line(_))
        && both.get_position(1).is_some()
        && both.get_position(n_host as i64).is_some()
        && n_host as u64 > 1 + dm * (n as u64 - 1)
    {
        return Ok(Outcome::infeasible(0));
    }
    let pairs = both.pairs();
    if both.domain_mask() == full_mask(n) {
        return Ok(Outcome::found(finish(g, dg, track, d, &pairs)?, 0));
    }
    let (free_lo, free_hi) = (a1 + 1, z2 - 1);
    if free_hi - free_lo + 1 < 2 * r + 1 {
        let allowed = pinned_or(&both, track, n, free_lo..=free_hi);
        return fallback(dg, &host_graph(track), d, Some(allowed), opts);
    }
    let mut counter = Counter { used: 0, max: opts.max_states };
    match run(g, dg, d, track, &pairs, free_lo + r, free_hi - r, End::Any, &mut counter)? {
        Some(sol) => Ok(Outcome::found(finish(g, dg, track, d, &sol)?, counter.used)),
        None => Ok(Outcome::infeasible(counter.used)),
    }
}

/// Host ids allowed per guest vertex: the pinned one, or any free position.
fn pinned_or(psi: &Anchor, track: Track, n: usize, free: impl Iterator<Item = i64> + Clone) -> Vec<Vec<usize>> {
    (0..n)
        .map(|u| match psi.get(u) {
            Some(p) => vec![track.vertex(p)],
            None => free.clone().map(|p| track.vertex(p)).collect(),
        })
        .collect()
}

/// Extends `psi1` on the prefix zone so that `v` receives the largest
/// position among all guest vertices.
pub fn embed_line_prefix_last(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
    psi1: &Anchor,
    v: usize,
) -> Result<Option<Embedding>, SolveError> {
    embed_line_prefix_last_with(g, dg, n_host, d, psi1, v, &Options::default()).map(|o| o.embedding)
}

pub fn embed_line_prefix_last_with(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
    psi1: &Anchor,
    v: usize,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    embed_track_prefix_last_with(g, dg, Track::Line(n_host), n_host as i64, d, psi1, v, opts)
}

/// [`embed_line_prefix_last_with`] on any track, with every position at
/// most `limit`. On a cycle the positions are `0..N` and the free stretch
/// `a1 + 1..=limit` must not wrap past position `N - 1`.
#[allow(clippy::too_many_arguments)]
pub fn embed_track_prefix_last_with(
    g: &Graph,
    dg: &DistanceMatrix,
    track: Track,
    limit: i64,
    d: u32,
    psi1: &Anchor,
    v: usize,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    check_guest(g, dg, d)?;
    check_zone(psi1, track, "prefix anchor")?;
    let n = g.n();
    if v >= n {
        return Err(SolveError::Input(format!("last vertex {v} is not a guest vertex")));
    }
    if psi1.is_empty() {
        return Err(SolveError::Input("prefix anchor is empty".into()));
    }
    let (dm, r) = radius(g, d);
    let a1 = *psi1.map().values().max().expect("nonempty");
    // Every vertex is within d*M*(n-1) of an anchored one.
    let len = limit.min(a1 + (dm * (n as u64 - 1)) as i64);
    if n > track.len() || g.max_degree() as u64 > 2 * dm || !psi1.is_valid(dg, d, track) {
        return Ok(Outcome::infeasible(0));
    }
    let pairs = psi1.pairs();
    if let Some(pv) = psi1.get(v) {
        let ok = psi1.domain_mask() == full_mask(n) && pv == a1;
        return match ok {
            true => Ok(Outcome::found(finish(g, dg, track, d, &pairs)?, 0)),
            false => Ok(Outcome::infeasible(0)),
        };
    }
    let free_lo = a1 + 1;
    if len - free_lo + 1 < 2 * r + 1 {
        let mut nodes = 0;
        for p in free_lo..=len {
            let mut allowed = pinned_or(psi1, track, n, free_lo..p);
            allowed[v] = vec![track.vertex(p)];
            let out = fallback(dg, &host_graph(track), d, Some(allowed), opts)?;
            nodes += out.nodes;
            if let Some(f) = out.embedding {
                return Ok(Outcome::found(f, nodes));
            }
        }
        return Ok(Outcome::infeasible(nodes));
    }
    let mut counter = Counter { used: 0, max: opts.max_states };
    match run(g, dg, d, track, &pairs, free_lo + r, len - r, End::Last(v), &mut counter)? {
        Some(sol) => Ok(Outcome::found(finish(g, dg, track, d, &sol)?, counter.used)),
        None => Ok(Outcome::infeasible(counter.used)),
    }
}
