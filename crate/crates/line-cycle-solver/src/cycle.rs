use embed_core::{Embedding, Outcome, SolveError};
use graph_core::corpus::cycle_graph;
use graph_core::{DistanceMatrix, Graph};

use crate::engine::{Counter, End, Frame, Run};
use crate::line::line_general;
use crate::window::{full_mask, neighbor_masks, neighbors_of, pair_ok, Anchor, Track};
use crate::{check_guest, fallback, finish, verified, Options};

/// Callback receiving each placement of anchor vertices; returns `true` to stop.
type Visit<'a> = dyn FnMut(&[(usize, i64)]) -> bool + 'a;

/// Decides whether `g` embeds into the cycle `C_N` non-contracting with
/// distortion at most `d`, returning a verified witness.
pub fn embed_into_cycle(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
) -> Result<Option<Embedding>, SolveError> {
    embed_into_cycle_with(g, dg, n_host, d, &Options::default()).map(|o| o.embedding)
}

/// Weighted guests: `dg` holds weighted distances and the window radius grows
/// with the largest edge weight. Same code path as [`embed_into_cycle`].
pub fn embed_weighted_into_cycle(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
) -> Result<Option<Embedding>, SolveError> {
    embed_into_cycle_with(g, dg, n_host, d, &Options::default()).map(|o| o.embedding)
}

pub fn embed_into_cycle_with(
    g: &Graph,
    dg: &DistanceMatrix,
    n_host: usize,
    d: u32,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    check_guest(g, dg, d)?;
    if n_host < 3 {
        return Err(SolveError::Input(format!("cycle needs at least 3 vertices, got {n_host}")));
    }
    let n = g.n();
    let m = g.max_weight() as u64;
    let dm = d as u64 * m;
    if n > n_host || g.max_degree() as u64 > 2 * dm {
        return Ok(Outcome::infeasible(0));
    }
    if n == 1 {
        return Ok(Outcome::found(Embedding::from_images(&[0]), 0));
    }
    // The image spans at most d*M*(n-1) consecutive positions, so on a long
    // cycle the problem is the same as on a line.
    if n_host as u64 > 4 * dm * n as u64 {
        let len = (2 * dm * n as u64) as usize;
        let out = line_general(g, dg, len, d, opts)?;
        return match out.embedding {
            Some(f) => Ok(Outcome::found(verified(g, dg, &cycle_graph(n_host), d, f)?, out.nodes)),
            None => Ok(out),
        };
    }
    let r = dm as i64 + 1;
    if (n_host as i64) < 4 * r + 2 {
        return fallback(dg, &cycle_graph(n_host), d, None, opts);
    }
    let track = Track::Cycle(n_host);
    let nbr = neighbor_masks(g);
    let all = full_mask(n);
    let mut counter = Counter { used: 0, max: opts.max_states };
    for v in 0..n {
        // Position 0 is the first occupied position after the longest empty
        // arc, so position -1 is empty unless every position is occupied.
        let positions: Vec<i64> = (-r..=r).filter(|&p| p != 0 && (p != -1 || n == n_host)).collect();
        let mut result = Ok(None);
        for_each_placement(dg, d as u64, track, &positions, vec![(v, 0)], all & !(1 << v), &mut |placed| {
            let w = placed.iter().fold(0u64, |m, &(u, _)| m | 1 << u);
            // Neighbours of positions -1..=1 land inside the anchor zone.
            let core = placed.iter().filter(|&&(_, p)| p.abs() <= 1).fold(0u64, |m, &(u, _)| m | 1 << u);
            if neighbors_of(&nbr, core) & !w != 0 {
                return true;
            }
            if w == all {
                result = Ok(Some(placed.to_vec()));
                return false;
            }
            let frame = Frame {
                dg,
                nbr: &nbr,
                all,
                d: d as u64,
                r,
                track,
                anchor: placed,
                w,
                lo: 2 * r + 1,
                hi: n_host as i64 - 2 * r - 1,
                end: End::Any,
            };
            match frame.run(&mut counter) {
                Run::Found(sol) => {
                    result = Ok(Some(sol));
                    false
                }
                Run::Exhausted => true,
                Run::Budget => {
                    result = Err(SolveError::BudgetExceeded);
                    false
                }
            }
        });
        if let Some(sol) = result? {
            return Ok(Outcome::found(finish(g, dg, track, d, &sol)?, counter.used));
        }
    }
    Ok(Outcome::infeasible(counter.used))
}

/// Calls `visit` on every injective placement extending `fixed` that puts
/// vertices from `candidates` on `positions` (each used at most once),
/// pairwise non-contracting with expansion at most `d`. Stops when `visit`
/// returns false; returns whether the enumeration ran to completion.
pub(crate) fn for_each_placement(
    dg: &DistanceMatrix,
    d: u64,
    track: Track,
    positions: &[i64],
    fixed: Vec<(usize, i64)>,
    candidates: u64,
    visit: &mut Visit<'_>,
) -> bool {
    fn rec(
        dg: &DistanceMatrix,
        d: u64,
        track: Track,
        positions: &[i64],
        placed: &mut Vec<(usize, i64)>,
        free: u64,
        visit: &mut Visit<'_>,
    ) -> bool {
        let Some((&p, rest)) = positions.split_first() else {
            return visit(placed);
        };
        if !rec(dg, d, track, rest, placed, free, visit) {
            return false;
        }
        for u in (0..64).filter(|&u| free >> u & 1 == 1) {
            if placed.iter().all(|&(v, q)| pair_ok(dg, d, track, u, p, v, q)) {
                placed.push((u, p));
                let go = rec(dg, d, track, rest, placed, free & !(1 << u), visit);
                placed.pop();
                if !go {
                    return false;
                }
            }
        }
        true
    }
    let mut placed = fixed;
    rec(dg, d, track, positions, &mut placed, candidates, visit)
}

/// All nonempty anchors on the zone `-r..=r` around cycle position 0 with
/// `r = d*M + 1`, each non-contracting with expansion at most `d`. The zone
/// is measured on a line, as on any cycle long enough for the window program.
pub fn enumerate_anchors(g: &Graph, dg: &DistanceMatrix, d: u32) -> Vec<Anchor> {
    let r = (d * g.max_weight()) as i64 + 1;
    let positions: Vec<i64> = (-r..=r).collect();
    let mut out = Vec::new();
    let track = Track::Line(usize::MAX);
    for_each_placement(dg, d as u64, track, &positions, Vec::new(), full_mask(g.n()), &mut |placed| {
        if !placed.is_empty() {
            out.push(Anchor::new(placed.iter().copied()));
        }
        true
    });
    out
}

/// Number of vertex sequences starting at `u1` whose positions strictly
/// increase from 0 and end at exactly `x`, pairwise non-contracting with
/// expansion at most `d` along a line.
pub fn count_sequences(g: &Graph, dg: &DistanceMatrix, d: u32, u1: usize, x: u32) -> u64 {
    fn rec(dg: &DistanceMatrix, d: u64, x: i64, placed: &mut Vec<(usize, i64)>, free: u64) -> u64 {
        let last = placed.last().expect("sequence starts with u1").1;
        if last == x {
            return 1;
        }
        let mut total = 0;
        for p in last + 1..=x {
            for u in (0..64).filter(|&u| free >> u & 1 == 1) {
                if placed.iter().all(|&(v, q)| pair_ok(dg, d, Track::Line(usize::MAX), u, p, v, q)) {
                    placed.push((u, p));
                    total += rec(dg, d, x, placed, free & !(1 << u));
                    placed.pop();
                }
            }
        }
        total
    }
    let free = full_mask(g.n()) & !(1 << u1);
    rec(dg, d as u64, x as i64, &mut vec![(u1, 0)], free)
}

/// Lengths of the maximal runs of unoccupied positions on `C_N`.
pub fn empty_arcs(n_host: usize, images: &[usize]) -> Vec<usize> {
    let mut occupied = vec![false; n_host];
    images.iter().for_each(|&x| occupied[x] = true);
    let Some(start) = occupied.iter().position(|&o| o) else {
        return vec![n_host];
    };
    let mut out = Vec::new();
    let mut run = 0;
    for i in 1..=n_host {
        if occupied[(start + i) % n_host] {
            if run > 0 {
                out.push(run);
            }
            run = 0;
        } else {
            run += 1;
        }
    }
    out
}
