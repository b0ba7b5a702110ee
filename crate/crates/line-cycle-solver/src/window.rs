use std::collections::BTreeMap;

use graph_core::{DistanceMatrix, Graph};

/// The host as a sequence of positions. Cycle positions are taken modulo the
/// length; line positions run from 1 to the length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Track {
    Cycle(usize),
    Line(usize),
}

impl Track {
    pub fn len(self) -> usize {
        match self {
            Track::Cycle(n) | Track::Line(n) => n,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    pub fn dist(self, p: i64, q: i64) -> u64 {
        match self {
            Track::Cycle(n) => {
                let x = (p - q).rem_euclid(n as i64) as u64;
                x.min(n as u64 - x)
            }
            Track::Line(_) => p.abs_diff(q),
        }
    }

    /// Host vertex id of a position: `p mod N` on a cycle, `p - 1` on a line.
    pub fn vertex(self, p: i64) -> usize {
        match self {
            Track::Cycle(n) => p.rem_euclid(n as i64) as usize,
            Track::Line(_) => (p - 1) as usize,
        }
    }
}

/// Non-contracting, expansion at most `d`, for one pair of placed vertices.
pub(crate) fn pair_ok(dg: &DistanceMatrix, d: u64, track: Track, u: usize, p: i64, v: usize, q: i64) -> bool {
    let a = dg.get(u, v) as u64;
    let b = track.dist(p, q);
    b >= a && b <= d * a
}

/// A fixed placement of the guest vertices `W` near the start of the host.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Anchor {
    map: BTreeMap<usize, i64>,
}

impl Anchor {
    pub fn new(pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Anchor { map: pairs.into_iter().collect() }
    }

    pub fn map(&self) -> &BTreeMap<usize, i64> {
        &self.map
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, u: usize) -> Option<i64> {
        self.map.get(&u).copied()
    }

    /// Guest vertex placed at position `p`, if any.
    pub fn get_position(&self, p: i64) -> Option<usize> {
        self.map.iter().find(|&(_, &q)| q == p).map(|(&u, _)| u)
    }

    pub fn domain_mask(&self) -> u64 {
        self.map.keys().fold(0, |m, &u| m | 1 << u)
    }

    pub fn pairs(&self) -> Vec<(usize, i64)> {
        self.map.iter().map(|(&u, &p)| (u, p)).collect()
    }

    /// Injective on positions, non-contracting and expansion at most `d`.
    pub fn is_valid(&self, dg: &DistanceMatrix, d: u32, track: Track) -> bool {
        let pairs = self.pairs();
        pairs
            .iter()
            .enumerate()
            .all(|(i, &(u, p))| pairs[i + 1..].iter().all(|&(v, q)| pair_ok(dg, d as u64, track, u, p, v, q)))
    }
}

/// A map from a set of guest vertices into the window `[mid - r, mid + r]`.
/// Slot `j` holds the vertex at position `mid - r + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowPartialEmbedding {
    pub mid: i64,
    pub radius: i64,
    slots: Vec<Option<usize>>,
}

impl WindowPartialEmbedding {
    pub fn new(mid: i64, radius: i64, slots: Vec<Option<usize>>) -> Self {
        assert_eq!(slots.len() as i64, 2 * radius + 1, "window needs 2r+1 slots");
        WindowPartialEmbedding { mid, radius, slots }
    }

    /// Builds the window from its domain sequence (ordered by position) and
    /// offsets: the first vertex sits `offsets[0]` after the window start and
    /// each later gap is the guest distance plus the next offset. `None` if the
    /// window overflows.
    pub fn from_sequence(
        mid: i64,
        radius: i64,
        sequence: &[usize],
        offsets: &[u32],
        dg: &DistanceMatrix,
    ) -> Option<Self> {
        assert_eq!(sequence.len(), offsets.len(), "one offset per vertex");
        let mut slots = vec![None; (2 * radius + 1) as usize];
        let mut pos = 0i64;
        for (i, &u) in sequence.iter().enumerate() {
            pos += offsets[i] as i64;
            if i > 0 {
                pos += dg.get(sequence[i - 1], u) as i64;
            }
            *slots.get_mut(pos as usize)? = Some(u);
        }
        Some(WindowPartialEmbedding { mid, radius, slots })
    }

    pub fn slots(&self) -> &[Option<usize>] {
        &self.slots
    }

    pub fn start(&self) -> i64 {
        self.mid - self.radius
    }

    pub fn sequence(&self) -> Vec<usize> {
        self.slots.iter().flatten().copied().collect()
    }

    /// Inverse of [`WindowPartialEmbedding::from_sequence`].
    pub fn offsets(&self, dg: &DistanceMatrix) -> Vec<u32> {
        let placed = self.positions();
        let mut out = Vec::with_capacity(placed.len());
        for (i, &(u, p)) in placed.iter().enumerate() {
            if i == 0 {
                out.push((p - self.start()) as u32);
            } else {
                let (v, q) = placed[i - 1];
                out.push((p - q) as u32 - dg.get(v, u));
            }
        }
        out
    }

    pub fn positions(&self) -> Vec<(usize, i64)> {
        let s = self.start();
        self.slots.iter().enumerate().filter_map(|(j, u)| u.map(|u| (u, s + j as i64))).collect()
    }

    pub fn get(&self, u: usize) -> Option<i64> {
        self.positions().into_iter().find(|&(v, _)| v == u).map(|(_, p)| p)
    }

    /// Vertices placed at offsets `p..=q` from the midpoint.
    pub fn slice_mask(&self, p: i64, q: i64) -> u64 {
        (p..=q).filter_map(|x| self.slots[(x + self.radius) as usize]).fold(0, |m, u| m | 1 << u)
    }

    pub fn domain_mask(&self) -> u64 {
        self.slice_mask(-self.radius, self.radius)
    }
}

/// Components of the subgraph induced by `alive`, as masks.
pub(crate) fn components(nbr: &[u64], alive: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = alive;
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            let mut grow = 0;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                grow |= nbr[u];
            }
            frontier = grow & alive & !comp;
            comp |= frontier;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

pub(crate) fn neighbors_of(nbr: &[u64], set: u64) -> u64 {
    let mut out = 0;
    let mut s = set;
    while s != 0 {
        let u = s.trailing_zeros() as usize;
        s &= s - 1;
        out |= nbr[u];
    }
    out
}

pub(crate) fn neighbor_masks(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|u| g.neighbor_mask(u)).collect()
}

/// `L(f)` and `R(f)`: unions of the components of `G - (W + Dom f)` touching
/// the left and the right half of the window.
pub(crate) fn sides(nbr: &[u64], all: u64, w: u64, dom: u64, left: u64, right: u64) -> (u64, u64) {
    let touch_l = neighbors_of(nbr, left);
    let touch_r = neighbors_of(nbr, right);
    let (mut l, mut r) = (0, 0);
    for c in components(nbr, all & !(w | dom)) {
        if c & touch_l != 0 {
            l |= c;
        }
        if c & touch_r != 0 {
            r |= c;
        }
    }
    (l, r)
}

/// `(L(f), R(f))` for a window with respect to an anchor.
pub fn left_right(f: &WindowPartialEmbedding, psi: &Anchor, g: &Graph) -> (u64, u64) {
    let nbr = neighbor_masks(g);
    let all = full_mask(g.n());
    let r = f.radius;
    sides(&nbr, all, psi.domain_mask(), f.domain_mask(), f.slice_mask(-r, -1), f.slice_mask(1, r))
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Feasibility of a window on the cycle `C_N` with respect to `psi`: nonempty
/// domain disjoint from `W`, window disjoint from the anchor zone, locally
/// non-contracting with expansion at most `d`, consistent with every anchored
/// vertex, closed neighbourhood of the middle slot, and `L(f)` disjoint from
/// `R(f)`. The window radius is taken from `f`.
pub fn is_feasible(
    f: &WindowPartialEmbedding,
    psi: &Anchor,
    g: &Graph,
    dg: &DistanceMatrix,
    d: u32,
    n_host: usize,
) -> bool {
    let r = f.radius;
    let a = f.mid.rem_euclid(n_host as i64);
    if a < 2 * r + 1 || a > n_host as i64 - 2 * r - 1 {
        return false;
    }
    let f = WindowPartialEmbedding { mid: a, ..f.clone() };
    window_ok(&f, psi, g, dg, d, Track::Cycle(n_host))
}

pub(crate) fn window_ok(
    f: &WindowPartialEmbedding,
    psi: &Anchor,
    g: &Graph,
    dg: &DistanceMatrix,
    d: u32,
    track: Track,
) -> bool {
    let dom = f.domain_mask();
    let w = psi.domain_mask();
    if dom == 0 || dom & w != 0 {
        return false;
    }
    let placed = f.positions();
    for (i, &(u, p)) in placed.iter().enumerate() {
        if !placed[i + 1..].iter().all(|&(v, q)| pair_ok(dg, d as u64, track, u, p, v, q)) {
            return false;
        }
        if !psi.map().iter().all(|(&v, &q)| pair_ok(dg, d as u64, track, u, p, v, q)) {
            return false;
        }
    }
    let nbr = neighbor_masks(g);
    if neighbors_of(&nbr, f.slice_mask(0, 0)) & !dom != 0 {
        return false;
    }
    let (l, rr) = left_right(f, psi, g);
    l & rr == 0
}

/// Whether `f_b` (one step to the right) succeeds `f_a` with respect to
/// `psi`: the overlapping slots agree, the vertex leaving on the left lies in
/// `L(f_b)` and the vertex entering on the right lies in `R(f_a)`.
pub fn succeeds(f_a: &WindowPartialEmbedding, f_b: &WindowPartialEmbedding, psi: &Anchor, g: &Graph) -> bool {
    let r = f_a.radius;
    if f_b.radius != r || f_b.mid != f_a.mid + 1 {
        return false;
    }
    if f_a.slots[1..] != f_b.slots[..f_b.slots.len() - 1] {
        return false;
    }
    let (_, r_a) = left_right(f_a, psi, g);
    let (l_b, _) = left_right(f_b, psi, g);
    let leaving = f_a.slice_mask(-r, -r);
    let entering = f_b.slice_mask(r, r);
    leaving & !l_b == 0 && entering & !r_a == 0
}
