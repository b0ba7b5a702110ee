use std::collections::BTreeMap;

use embed_core::Embedding;
use embed_core::SolveError;
use graph_core::{DistanceMatrix, Graph};
use line_cycle_solver::{embed_track_fixed_ends_with, embed_track_prefix_last_with, Anchor, Options, Track};

/// Guest vertex to arm position (`0` is `s`, the arm length is `t`).
pub type ArmMap = BTreeMap<usize, usize>;

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&x| mask >> x & 1 == 1)
}

/// Vertices of `comp` that may be its last vertex when `a` is an anchored
/// vertex on the same arm: those within `d^2` of the furthest distance from
/// `a`. This is a superset of the candidates the last-vertex argument allows.
pub fn last_vertex_candidates(comp: u64, a: usize, dg: &DistanceMatrix, d: u32) -> u64 {
    let far = members(comp).map(|x| dg.get(a, x)).max().unwrap_or(0) as u64;
    members(comp).filter(|&x| dg.get(a, x) as u64 + (d as u64).pow(2) >= far).fold(0, |m, x| m | 1 << x)
}

/// The guest metric restricted to a vertex subset, as a weighted graph whose
/// shortest paths reproduce it: `x` and `y` are joined (with weight
/// `D_G(x, y)`) unless some third vertex of the subset lies between them.
pub(crate) struct SubGuest {
    pub verts: Vec<usize>,
    pub g: Graph,
    pub dg: DistanceMatrix,
}

impl SubGuest {
    pub fn new(dg: &DistanceMatrix, mask: u64) -> Self {
        let verts: Vec<usize> = members(mask).collect();
        let m = verts.len();
        let rows: Vec<Vec<u32>> = verts.iter().map(|&x| verts.iter().map(|&y| dg.get(x, y)).collect()).collect();
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let split = (0..m).any(|c| c != i && c != j && rows[i][c] + rows[c][j] == rows[i][j]);
                if !split {
                    edges.push((i, j, rows[i][j]));
                }
            }
        }
        let g = if edges.iter().all(|e| e.2 == 1) {
            Graph::from_edges(m, &edges.iter().map(|&(a, b, _)| (a, b)).collect::<Vec<_>>())
        } else {
            Graph::from_weighted_edges(m, &edges)
        }
        .expect("subset metric graph is simple");
        SubGuest { verts, g, dg: DistanceMatrix::from_rows(rows) }
    }

    fn local(&self, x: usize) -> usize {
        self.verts.binary_search(&x).expect("vertex of the subset")
    }

    fn anchor(&self, fixed: &ArmMap) -> Anchor {
        Anchor::new(fixed.iter().map(|(&x, &p)| (self.local(x), p as i64)))
    }

    /// Arm positions of a solution on the track.
    fn positions(&self, f: &Embedding) -> ArmMap {
        self.verts.iter().enumerate().map(|(i, &x)| (x, f.get(i).expect("total"))).collect()
    }
}

/// The arm closed into a cycle through the shortest other arm. Host
/// distances between vertices of the arm are distances on this cycle, and
/// arm position `p` is cycle position `p`.
fn arm_cycle(arm_len: usize, around: usize) -> Track {
    Track::Cycle(arm_len + around)
}

/// Shortest placement of an s-component `comp` together with the anchored
/// vertices `fixed` on the same arm (arm positions, all in the s-side ball)
/// such that `last` is placed furthest from `s`. The arm has length
/// `arm_len`, and `around` is the length of the shortest other arm. Limits
/// on the last position are tried in increasing order, so the first success
/// minimises the distance from `s` to the image of `last`. The image of `t`
/// is never used. For a t-component pass positions measured from `t`.
#[allow(clippy::too_many_arguments)]
pub fn shortest_component_embedding(
    dg: &DistanceMatrix,
    comp: u64,
    fixed: &ArmMap,
    arm_len: usize,
    around: usize,
    last: usize,
    d: u32,
    opts: &Options,
) -> Result<Option<ArmMap>, SolveError> {
    let mask = fixed.keys().fold(comp, |m, &x| m | 1 << x);
    let sub = SubGuest::new(dg, mask);
    let Some(&a1) = fixed.values().max() else {
        return Ok(None);
    };
    // The last vertex is within d * D_G of some anchored vertex.
    let reach = fixed.keys().flat_map(|&a| members(comp).map(move |x| dg.get(a, x))).max().unwrap_or(0);
    let psi = sub.anchor(fixed);
    let hi = (arm_len - 1).min(a1 + d as usize * reach as usize);
    let track = arm_cycle(arm_len, around);
    for limit in a1 + 1..=hi {
        let out = embed_track_prefix_last_with(&sub.g, &sub.dg, track, limit as i64, d, &psi, sub.local(last), opts)?;
        if let Some(f) = out.embedding {
            return Ok(Some(sub.positions(&f)));
        }
    }
    Ok(None)
}

/// Placement of a full component `comp` on an arm of length `arm_len`
/// between the anchored vertices near `s` and those near `t`; `around` is
/// the length of the shortest other arm.
#[allow(clippy::too_many_arguments)]
pub fn full_component_embedding(
    dg: &DistanceMatrix,
    comp: u64,
    s_side: &ArmMap,
    t_side: &ArmMap,
    arm_len: usize,
    around: usize,
    d: u32,
    opts: &Options,
) -> Result<Option<ArmMap>, SolveError> {
    if s_side.is_empty() || t_side.is_empty() {
        return Ok(None);
    }
    let mask = s_side.keys().chain(t_side.keys()).fold(comp, |m, &x| m | 1 << x);
    let sub = SubGuest::new(dg, mask);
    let track = arm_cycle(arm_len, around);
    let out = embed_track_fixed_ends_with(&sub.g, &sub.dg, track, d, &sub.anchor(s_side), &sub.anchor(t_side), opts)?;
    Ok(out.embedding.map(|f| sub.positions(&f)))
}

/// Every placement of the vertices in `free` onto the host vertices `slots`
/// that is non-contracting with expansion at most `d` against `placed` and
/// among themselves (host distances in `dh`).
pub fn short_arm_guesses(
    dg: &DistanceMatrix,
    dh: &DistanceMatrix,
    free: u64,
    slots: &[usize],
    placed: &BTreeMap<usize, usize>,
    d: u32,
) -> Vec<BTreeMap<usize, usize>> {
    fn go(
        rest: &[usize],
        slots: &[usize],
        cur: &mut BTreeMap<usize, usize>,
        ctx: (&DistanceMatrix, &DistanceMatrix, &BTreeMap<usize, usize>, u64),
        out: &mut Vec<BTreeMap<usize, usize>>,
    ) {
        let (dg, dh, placed, d) = ctx;
        let Some((&u, rest)) = rest.split_first() else {
            out.push(cur.clone());
            return;
        };
        for &h in slots {
            if cur.values().any(|&x| x == h) {
                continue;
            }
            let ok = placed.iter().chain(cur.iter()).all(|(&w, &x)| {
                let (a, b) = (dg.get(u, w) as u64, dh.get(h, x) as u64);
                a <= b && b <= d * a
            });
            if ok {
                cur.insert(u, h);
                go(rest, slots, cur, ctx, out);
                cur.remove(&u);
            }
        }
    }
    let free: Vec<usize> = members(free).collect();
    let mut out = Vec::new();
    go(&free, slots, &mut BTreeMap::new(), (dg, dh, placed, d as u64), &mut out);
    out
}
