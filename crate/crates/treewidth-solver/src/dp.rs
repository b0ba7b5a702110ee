use std::collections::{BTreeMap, HashMap};

use embed_core::{union_embedding, verify_nc_distortion, Embedding, Outcome, SolveError};
use graph_core::{all_pairs_distances, degree_gate, DistanceMatrix, Graph};
use rayon::prelude::*;

use crate::nice::{NiceTreeDecomposition, NodeKind};
use crate::{ball_union, Options};

/// Everything the table fill needs about one guest, host and decomposition.
pub struct TwInstance<'a> {
    pub g: &'a Graph,
    pub dg: &'a DistanceMatrix,
    pub h: &'a Graph,
    pub dh: &'a DistanceMatrix,
    pub ntd: &'a NiceTreeDecomposition,
    pub d: u32,
    red: Vec<bool>,
    radius: u32,
    /// Red vertices of the ball around each bag, sorted.
    balls: Vec<Vec<usize>>,
    /// Per node and ball entry: whether the host vertex is in the bag.
    in_bag: Vec<Vec<bool>>,
    /// Per node: host vertices appearing in a bag of its subtree.
    below_host: Vec<Vec<bool>>,
    nbr: Vec<u64>,
    all: u64,
}

impl<'a> TwInstance<'a> {
    /// `red` lists the host vertices that must receive exactly one guest
    /// vertex each; all host vertices when `None`. `dg` may be any guest
    /// metric that is a graph metric of `g` with integer edge lengths.
    pub fn new(
        g: &'a Graph,
        dg: &'a DistanceMatrix,
        h: &'a Graph,
        dh: &'a DistanceMatrix,
        ntd: &'a NiceTreeDecomposition,
        d: u32,
        red: Option<&[usize]>,
    ) -> Result<Self, SolveError> {
        let input = |m: String| Err(SolveError::Input(m));
        if g.n() == 0 || g.n() > 64 {
            return input(format!("guest must have 1..=64 vertices, got {}", g.n()));
        }
        if dg.n() != g.n() || dh.n() != h.n() {
            return input("distance matrices do not match the graphs".into());
        }
        if !g.is_connected() {
            return input("guest is disconnected".into());
        }
        if d == 0 {
            return input("distortion must be at least 1".into());
        }
        if ntd.n_vertices != h.n() {
            return input(format!("decomposition is for {} vertices, host has {}", ntd.n_vertices, h.n()));
        }
        let mut is_red = vec![red.is_none(); h.n()];
        for &v in red.unwrap_or(&[]) {
            if v >= h.n() || is_red[v] {
                return input(format!("red vertex {v} is out of range or repeated"));
            }
            is_red[v] = true;
        }
        let n_red = is_red.iter().filter(|&&r| r).count();
        if n_red != g.n() {
            return input(format!("guest has {} vertices, host has {} red vertices", g.n(), n_red));
        }
        let max_edge = g.edges().map(|(u, v)| dg.get(u, v)).max().unwrap_or(0);
        let radius = (d * max_edge).max(red_gap(h, dh, &is_red));
        let balls: Vec<Vec<usize>> = ntd
            .nodes
            .iter()
            .map(|x| ball_union(h, dh, &x.bag, radius).into_iter().filter(|&v| is_red[v]).collect())
            .collect();
        let in_bag = ntd
            .nodes
            .iter()
            .zip(&balls)
            .map(|(x, ball)| ball.iter().map(|v| x.bag.binary_search(v).is_ok()).collect())
            .collect();
        let mut below_host = vec![vec![false; h.n()]; ntd.len()];
        for (i, x) in ntd.nodes.iter().enumerate() {
            for &c in &x.children {
                let (lo, hi) = below_host.split_at_mut(i);
                hi[0].iter_mut().zip(&lo[c]).for_each(|(a, &b)| *a |= b);
            }
            x.bag.iter().for_each(|&v| below_host[i][v] = true);
        }
        let nbr = (0..g.n()).map(|u| g.neighbor_mask(u)).collect();
        let all = if g.n() == 64 { u64::MAX } else { (1 << g.n()) - 1 };
        Ok(TwInstance { g, dg, h, dh, ntd, d, red: is_red, radius, balls, in_bag, below_host, nbr, all })
    }

    /// Radius of the balls around bags.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Red host vertices within the radius of node `u`'s bag.
    pub fn ball(&self, u: usize) -> &[usize] {
        &self.balls[u]
    }

    pub fn is_red(&self, v: usize) -> bool {
        self.red[v]
    }

    /// The state a total bijection induces at node `u`.
    pub fn restrict(&self, u: usize, f: &Embedding) -> TwPartialEmbedding {
        let inverse: BTreeMap<usize, usize> = f.map().iter().map(|(&x, &p)| (p, x)).collect();
        let map = self.balls[u].iter().filter_map(|p| inverse.get(p).map(|&x| (x, *p))).collect();
        let below = f.map().iter().filter(|&(_, &p)| self.below_host[u][p]).fold(0, |m, (&x, _)| m | 1 << x);
        TwPartialEmbedding { node: u, map, below }
    }

    fn pair_ok(&self, x: usize, p: usize, y: usize, q: usize) -> bool {
        let (a, b) = (self.dg.get(x, y) as u64, self.dh.get(p, q) as u64);
        b >= a && b <= self.d as u64 * a
    }

    /// Slots of a state as a guest-to-host table.
    fn positions(&self, u: usize, slots: &[u8]) -> [usize; 64] {
        let mut pos = [usize::MAX; 64];
        for (i, &x) in slots.iter().enumerate() {
            pos[x as usize] = self.balls[u][i];
        }
        pos
    }

    fn bag_guests(&self, u: usize, slots: &[u8]) -> u64 {
        slots.iter().zip(&self.in_bag[u]).filter(|(_, &b)| b).fold(0, |m, (&x, _)| m | 1 << x)
    }

    /// Closure of the bag, side consistency and the split of the remaining
    /// guest components between the two sides of the bag.
    fn local_ok(&self, u: usize, slots: &[u8], below: u64) -> bool {
        let dom = mask_of(slots);
        let sub = &self.below_host[u];
        let bag = &self.ntd.nodes[u].bag;
        for (i, &p) in self.balls[u].iter().enumerate() {
            if (below >> slots[i] & 1 == 1) != sub[p] {
                return false;
            }
        }
        if neighbors_of(&self.nbr, self.bag_guests(u, slots)) & !dom != 0 {
            return false;
        }
        let pos = self.positions(u, slots);
        for c in components(&self.nbr, self.all & !dom) {
            let inside = c & below;
            if inside != 0 && inside != c {
                return false;
            }
            let mut touch = neighbors_of(&self.nbr, c) & dom;
            while touch != 0 {
                let p = pos[touch.trailing_zeros() as usize];
                touch &= touch - 1;
                let ok = match inside != 0 {
                    true => sub[p] && bag.binary_search(&p).is_err(),
                    false => !sub[p],
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// Largest host distance between two red vertices joined by a path whose
/// inner vertices are all blue.
fn red_gap(h: &Graph, dh: &DistanceMatrix, red: &[bool]) -> u32 {
    let mut gap = 0;
    for s in (0..h.n()).filter(|&v| red[v]) {
        let mut seen = vec![false; h.n()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &y in h.neighbors(x) {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                if red[y] {
                    gap = gap.max(dh.get(s, y));
                } else {
                    stack.push(y);
                }
            }
        }
    }
    gap
}

fn mask_of(slots: &[u8]) -> u64 {
    slots.iter().fold(0, |m, &x| m | 1 << x)
}

fn neighbors_of(nbr: &[u64], set: u64) -> u64 {
    let mut out = 0;
    let mut s = set;
    while s != 0 {
        out |= nbr[s.trailing_zeros() as usize];
        s &= s - 1;
    }
    out
}

fn components(nbr: &[u64], alive: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = alive;
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            frontier = neighbors_of(nbr, frontier) & alive & !comp;
            comp |= frontier;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

/// A state at node `node`: the guest vertices on the red ball of the bag
/// (`map` sends guest to host) and the guest vertices whose images lie in
/// bags below the node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwPartialEmbedding {
    pub node: usize,
    pub map: BTreeMap<usize, usize>,
    pub below: u64,
}

impl TwPartialEmbedding {
    pub fn domain_mask(&self) -> u64 {
        self.map.keys().fold(0, |m, &x| m | 1 << x)
    }

    /// Slots aligned with the node's ball, when `map` covers it exactly.
    fn slots(&self, inst: &TwInstance) -> Option<Vec<u8>> {
        let ball = inst.balls.get(self.node)?;
        if self.map.len() != ball.len() || self.map.keys().any(|&x| x >= inst.g.n()) {
            return None;
        }
        let inverse: BTreeMap<usize, usize> = self.map.iter().map(|(&x, &p)| (p, x)).collect();
        if inverse.len() != self.map.len() {
            return None;
        }
        ball.iter().map(|p| inverse.get(p).map(|&x| x as u8)).collect()
    }
}

/// Whether `f` is a feasible state: a bijection between a set of guest
/// vertices and the red ball of its node, non-contracting with expansion at
/// most `d` on every pair, and locally consistent with its lower set.
pub fn tw_feasible(inst: &TwInstance, f: &TwPartialEmbedding) -> bool {
    let Some(slots) = f.slots(inst) else {
        return false;
    };
    if f.below & !inst.all != 0 {
        return false;
    }
    let placed: Vec<(usize, usize)> = f.map.iter().map(|(&x, &p)| (x, p)).collect();
    let pairs_ok =
        placed.iter().enumerate().all(|(i, &(x, p))| placed[i + 1..].iter().all(|&(y, q)| inst.pair_ok(x, p, y, q)));
    pairs_ok && inst.local_ok(f.node, &slots, f.below)
}

/// Whether `f_v` at a child `v` of an introduce or forget node `u` is
/// extended by `f_u`: the maps agree on the child's ball, an introduce node
/// adds exactly its new ball vertices with guests that are neither placed
/// nor below in the child, and the lower set grows by the introduced vertex's
/// guest only.
pub fn tw_succeeds(inst: &TwInstance, f_u: &TwPartialEmbedding, f_v: &TwPartialEmbedding) -> bool {
    let node = &inst.ntd.nodes[f_u.node];
    if node.children.len() != 1 || node.children[0] != f_v.node {
        return false;
    }
    match node.kind {
        NodeKind::Introduce(a) => {
            if !f_v.map.iter().all(|(x, p)| f_u.map.get(x) == Some(p)) {
                return false;
            }
            let fresh = f_u.domain_mask() & !f_v.domain_mask();
            if fresh & f_v.below != 0 {
                return false;
            }
            let at_a = f_u.map.iter().find(|&(_, &p)| p == a).map_or(0, |(&x, _)| 1u64 << x);
            f_u.below == f_v.below | at_a
        }
        NodeKind::Forget(_) => {
            let kept: BTreeMap<usize, usize> = f_v
                .map
                .iter()
                .filter(|(_, p)| inst.balls[f_u.node].binary_search(p).is_ok())
                .map(|(&x, &p)| (x, p))
                .collect();
            kept == f_u.map && f_u.below == f_v.below
        }
        NodeKind::Leaf | NodeKind::Join => false,
    }
}

/// Join succession: both children carry the parent's map, their lower sets
/// meet exactly in the guests on the bag and together give the parent's.
pub fn tw_join_succeeds(
    inst: &TwInstance,
    f_u: &TwPartialEmbedding,
    f_v: &TwPartialEmbedding,
    f_w: &TwPartialEmbedding,
) -> bool {
    let node = &inst.ntd.nodes[f_u.node];
    if node.kind != NodeKind::Join || node.children != [f_v.node, f_w.node] {
        return false;
    }
    let on_bag = f_u.map.iter().filter(|(_, p)| node.bag.binary_search(p).is_ok()).fold(0, |m, (&x, _)| m | 1 << x);
    f_v.map == f_u.map && f_w.map == f_u.map && f_v.below & f_w.below == on_bag && f_v.below | f_w.below == f_u.below
}

struct Entry {
    slots: Vec<u8>,
    below: u64,
    from: [u32; 2],
}

type Table = Vec<Entry>;

/// Decides whether `g` maps bijectively onto the red vertices of `h` (all of
/// them when `red` is `None`), non-contracting with expansion at most `d`.
pub fn bijective_embed_tw(
    g: &Graph,
    h: &Graph,
    ntd: &NiceTreeDecomposition,
    d: u32,
    red: Option<&[usize]>,
) -> Result<Option<Embedding>, SolveError> {
    let (dg, dh) = (all_pairs_distances(g), all_pairs_distances(h));
    bijective_embed_tw_with(g, &dg, h, &dh, ntd, d, red, &Options::default()).map(|o| o.embedding)
}

#[allow(clippy::too_many_arguments)]
pub fn bijective_embed_tw_with(
    g: &Graph,
    dg: &DistanceMatrix,
    h: &Graph,
    dh: &DistanceMatrix,
    ntd: &NiceTreeDecomposition,
    d: u32,
    red: Option<&[usize]>,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    let inst = TwInstance::new(g, dg, h, dh, ntd, d, red)?;
    let max_edge = g.edges().map(|(u, v)| dg.get(u, v)).max().unwrap_or(1);
    if !degree_gate(g.max_degree(), h.max_degree(), d * max_edge) {
        return Ok(Outcome::infeasible(0));
    }
    let mut tables: Vec<Table> = Vec::with_capacity(ntd.len());
    let mut used = 0u64;
    for u in 0..ntd.len() {
        let table = match ntd.nodes[u].kind {
            NodeKind::Leaf => vec![Entry { slots: Vec::new(), below: 0, from: [u32::MAX; 2] }],
            NodeKind::Introduce(a) => introduce(&inst, u, a, &tables[ntd.nodes[u].children[0]]),
            NodeKind::Forget(_) => forget(&inst, u, &tables[ntd.nodes[u].children[0]]),
            NodeKind::Join => {
                let c = &ntd.nodes[u].children;
                join(&inst, u, &tables[c[0]], &tables[c[1]])
            }
        };
        used += table.len() as u64;
        if used > opts.max_states {
            return Err(SolveError::BudgetExceeded);
        }
        tables.push(table);
    }
    let root = ntd.root();
    match tables[root].iter().position(|e| e.below == inst.all) {
        Some(i) => Ok(Outcome::found(witness(&inst, &tables, i)?, used)),
        None => Ok(Outcome::infeasible(used)),
    }
}

/// Keeps the first entry per key, preserving order.
fn dedup(candidates: Vec<Entry>) -> Table {
    let mut seen: HashMap<(Vec<u8>, u64), ()> = HashMap::new();
    candidates.into_iter().filter(|e| seen.insert((e.slots.clone(), e.below), ()).is_none()).collect()
}

fn introduce(inst: &TwInstance, u: usize, a: usize, child: &Table) -> Table {
    let c = inst.ntd.nodes[u].children[0];
    let ball = &inst.balls[u];
    let old = &inst.balls[c];
    // Where each ball vertex of u comes from in the child, if anywhere.
    let source: Vec<Option<usize>> = ball.iter().map(|p| old.binary_search(p).ok()).collect();
    let fresh: Vec<usize> = (0..ball.len()).filter(|&i| source[i].is_none()).collect();
    let a_slot = ball.binary_search(&a).ok();
    let out: Vec<Vec<Entry>> = child
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let mut slots: Vec<u8> = source.iter().map(|s| s.map_or(u8::MAX, |j| e.slots[j])).collect();
            let free = inst.all & !(mask_of(&e.slots) | e.below);
            let mut found = Vec::new();
            fill(inst, ball, &fresh, 0, &mut slots, free, &mut |slots| {
                let at_a = a_slot.map_or(0, |i| 1u64 << slots[i]);
                let below = e.below | at_a;
                if inst.local_ok(u, slots, below) {
                    found.push(Entry { slots: slots.to_vec(), below, from: [k as u32, u32::MAX] });
                }
            });
            found
        })
        .collect();
    dedup(out.into_iter().flatten().collect())
}

/// Assigns distinct free guests to the slots listed in `fresh[i..]`, checking
/// each against every slot already filled.
fn fill(
    inst: &TwInstance,
    ball: &[usize],
    fresh: &[usize],
    i: usize,
    slots: &mut Vec<u8>,
    free: u64,
    visit: &mut dyn FnMut(&[u8]),
) {
    let Some(&s) = fresh.get(i) else {
        visit(slots);
        return;
    };
    let p = ball[s];
    let mut f = free;
    while f != 0 {
        let x = f.trailing_zeros() as usize;
        f &= f - 1;
        let fits = slots.iter().enumerate().all(|(j, &y)| y == u8::MAX || inst.pair_ok(x, p, y as usize, ball[j]));
        if fits {
            slots[s] = x as u8;
            fill(inst, ball, fresh, i + 1, slots, free & !(1 << x), visit);
            slots[s] = u8::MAX;
        }
    }
}

fn forget(inst: &TwInstance, u: usize, child: &Table) -> Table {
    let c = inst.ntd.nodes[u].children[0];
    let keep: Vec<usize> =
        inst.balls[u].iter().map(|p| inst.balls[c].binary_search(p).expect("ball shrinks")).collect();
    let out: Vec<Option<Entry>> = child
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let slots: Vec<u8> = keep.iter().map(|&j| e.slots[j]).collect();
            inst.local_ok(u, &slots, e.below).then_some(Entry { slots, below: e.below, from: [k as u32, u32::MAX] })
        })
        .collect();
    dedup(out.into_iter().flatten().collect())
}

fn join(inst: &TwInstance, u: usize, left: &Table, right: &Table) -> Table {
    let mut by_slots: HashMap<&[u8], Vec<usize>> = HashMap::new();
    for (k, e) in right.iter().enumerate() {
        by_slots.entry(&e.slots).or_default().push(k);
    }
    let out: Vec<Vec<Entry>> = left
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let on_bag = inst.bag_guests(u, &e.slots);
            let mut found = Vec::new();
            for &k in by_slots.get(e.slots.as_slice()).into_iter().flatten() {
                let other = &right[k];
                if e.below & other.below != on_bag {
                    continue;
                }
                let below = e.below | other.below;
                if inst.local_ok(u, &e.slots, below) {
                    found.push(Entry { slots: e.slots.clone(), below, from: [i as u32, k as u32] });
                }
            }
            found
        })
        .collect();
    dedup(out.into_iter().flatten().collect())
}

/// Walks the provenance of an accepted root entry, checks that every guest
/// vertex is placed on a connected set of nodes, and verifies the union.
fn witness(inst: &TwInstance, tables: &[Table], root_entry: usize) -> Result<Embedding, SolveError> {
    let ntd = inst.ntd;
    let mut chosen = vec![usize::MAX; ntd.len()];
    let mut stack = vec![(ntd.root(), root_entry)];
    while let Some((u, k)) = stack.pop() {
        chosen[u] = k;
        let from = tables[u][k].from;
        for (j, &c) in ntd.nodes[u].children.iter().enumerate() {
            stack.push((c, from[j] as usize));
        }
    }
    let parts: Vec<BTreeMap<usize, usize>> = (0..ntd.len())
        .map(|u| {
            let e = &tables[u][chosen[u]];
            e.slots.iter().enumerate().map(|(i, &x)| (x as usize, inst.balls[u][i])).collect()
        })
        .collect();
    let unverified = |m: String| SolveError::Unverified(m);
    let parents = ntd.parents();
    for x in 0..inst.g.n() {
        let nodes = parts.iter().filter(|m| m.contains_key(&x)).count();
        let edges = parents
            .iter()
            .enumerate()
            .filter(|&(c, p)| p.is_some_and(|p| parts[p].contains_key(&x) && parts[c].contains_key(&x)))
            .count();
        if nodes == 0 || edges + 1 != nodes {
            return Err(unverified(format!("guest vertex {x} is not placed on a connected set of nodes")));
        }
    }
    let f = union_embedding(inst.g.n(), &parts).map_err(|e| unverified(e.to_string()))?;
    let mut images = f.images();
    images.sort_unstable();
    if images != (0..inst.h.n()).filter(|&v| inst.red[v]).collect::<Vec<_>>() {
        return Err(unverified("witness is not onto the red vertices".into()));
    }
    match verify_nc_distortion(inst.g, inst.h, inst.dg, inst.dh, &f, inst.d) {
        Ok(v) if v.is_ok() => Ok(f),
        Ok(v) => Err(unverified(format!("{v:?}"))),
        Err(e) => Err(unverified(e.to_string())),
    }
}
