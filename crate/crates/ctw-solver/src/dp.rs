use std::collections::{BTreeMap, HashMap, HashSet};

use embed_core::{union_embedding, verify_nc_distortion, Embedding, Outcome, SolveError};
use graph_core::{degree_gate, DistanceMatrix, Graph};
use rayon::prelude::*;
use treewidth_solver::{ball_union, NiceTreeDecomposition, NodeKind};

use crate::Options;

const EMPTY: u8 = u8::MAX;
const INF: u32 = DistanceMatrix::INF;

/// Host distances from the image of a guest vertex placed below a node, but
/// outside its ball, to each bag vertex. Entries that can no longer decide a
/// non-contraction check are stored as `INF`.
type Profile = Vec<u32>;

/// Precomputed data for one guest, host and nice decomposition.
struct Instance<'a> {
    g: &'a Graph,
    dg: &'a DistanceMatrix,
    h: &'a Graph,
    dh: &'a DistanceMatrix,
    ntd: &'a NiceTreeDecomposition,
    d: u32,
    /// Host vertices within `d` times the longest guest edge of each bag.
    balls: Vec<Vec<usize>>,
    in_bag: Vec<Vec<bool>>,
    below_host: Vec<Vec<bool>>,
    /// Profile entries at or above this value are dropped to `INF`.
    cut: u32,
    nbr: Vec<u64>,
    all: u64,
}

#[derive(Clone)]
struct Entry {
    /// Guest on each ball vertex, or `EMPTY`.
    slots: Vec<u8>,
    below: u64,
    /// Guests below the node whose images left the ball, sorted by guest.
    far: Vec<(u8, Profile)>,
    from: [u32; 2],
}

type Table = Vec<Entry>;

impl<'a> Instance<'a> {
    fn new(
        g: &'a Graph,
        dg: &'a DistanceMatrix,
        h: &'a Graph,
        dh: &'a DistanceMatrix,
        ntd: &'a NiceTreeDecomposition,
        d: u32,
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
        let max_edge = g.edges().map(|(u, v)| dg.get(u, v)).max().unwrap_or(0);
        let radius = d * max_edge;
        let balls: Vec<Vec<usize>> = ntd.nodes.iter().map(|x| ball_union(h, dh, &x.bag, radius)).collect();
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
        let cut =
            (0..g.n()).flat_map(|x| (0..g.n()).map(move |y| (x, y))).map(|(x, y)| dg.get(x, y)).max().unwrap_or(0);
        let nbr = (0..g.n()).map(|u| g.neighbor_mask(u)).collect();
        let all = if g.n() == 64 { u64::MAX } else { (1 << g.n()) - 1 };
        Ok(Instance { g, dg, h, dh, ntd, d, balls, in_bag, below_host, cut, nbr, all })
    }

    fn pair_ok(&self, x: usize, p: usize, y: usize, q: usize) -> bool {
        let (a, b) = (self.dg.get(x, y) as u64, self.dh.get(p, q) as u64);
        b >= a && b <= self.d as u64 * a
    }

    fn cap(&self, v: u64) -> u32 {
        if v >= self.cut as u64 {
            INF
        } else {
            v as u32
        }
    }

    /// Host distance from a far guest to `q` through the bag of `u`.
    fn through_bag(&self, u: usize, p: &Profile, q: usize) -> u64 {
        let bag = &self.ntd.nodes[u].bag;
        bag.iter().zip(p).map(|(&b, &pb)| add(pb, self.dh.get(b, q))).min().unwrap_or(u64::MAX)
    }

    fn bag_guests(&self, u: usize, slots: &[u8]) -> u64 {
        slots.iter().zip(&self.in_bag[u]).filter(|&(&x, &b)| b && x != EMPTY).fold(0, |m, (&x, _)| m | 1 << x)
    }

    /// Side consistency, closure of the bag and the split of the remaining
    /// guest components between the two sides of the bag.
    fn local_ok(&self, u: usize, slots: &[u8], below: u64) -> bool {
        let dom = mask_of(slots);
        let sub = &self.below_host[u];
        let bag = &self.ntd.nodes[u].bag;
        let mut pos = [usize::MAX; 64];
        for (i, &x) in slots.iter().enumerate() {
            if x == EMPTY {
                continue;
            }
            let p = self.balls[u][i];
            if (below >> x & 1 == 1) != sub[p] {
                return false;
            }
            pos[x as usize] = p;
        }
        if neighbors_of(&self.nbr, self.bag_guests(u, slots)) & !dom != 0 {
            return false;
        }
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

fn add(a: u32, b: u32) -> u64 {
    if a == INF || b == INF {
        u64::MAX
    } else {
        a as u64 + b as u64
    }
}

fn mask_of(slots: &[u8]) -> u64 {
    slots.iter().filter(|&&x| x != EMPTY).fold(0, |m, &x| m | 1 << x)
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

/// [`embed_ctw`](crate::embed_ctw) over any nice decomposition of `h`, for
/// any guest metric that is the graph metric of `g` under positive integer
/// edge lengths.
pub fn embed_ctw_with(
    g: &Graph,
    dg: &DistanceMatrix,
    h: &Graph,
    dh: &DistanceMatrix,
    ntd: &NiceTreeDecomposition,
    d: u32,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    let inst = Instance::new(g, dg, h, dh, ntd, d)?;
    let max_edge = g.edges().map(|(u, v)| dg.get(u, v)).max().unwrap_or(1);
    if g.n() > h.n() || !degree_gate(g.max_degree(), h.max_degree(), d * max_edge) {
        return Ok(Outcome::infeasible(0));
    }
    let mut tables: Vec<Table> = Vec::with_capacity(ntd.len());
    let mut used = 0u64;
    for u in 0..ntd.len() {
        let table = match ntd.nodes[u].kind {
            NodeKind::Leaf => vec![Entry { slots: Vec::new(), below: 0, far: Vec::new(), from: [u32::MAX; 2] }],
            NodeKind::Introduce(a) => introduce(&inst, u, a, &tables[ntd.nodes[u].children[0]]),
            NodeKind::Forget(v) => forget(&inst, u, v, &tables[ntd.nodes[u].children[0]]),
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
    match tables[ntd.root()].iter().position(|e| e.below == inst.all) {
        Some(i) => Ok(Outcome::found(witness(&inst, &tables, i)?, used)),
        None => Ok(Outcome::infeasible(used)),
    }
}

fn dedup(candidates: Vec<Entry>) -> Table {
    let mut seen = HashSet::new();
    candidates.into_iter().filter(|e| seen.insert((e.slots.clone(), e.below, e.far.clone()))).collect()
}

fn introduce(inst: &Instance, u: usize, a: usize, child: &Table) -> Table {
    let c = inst.ntd.nodes[u].children[0];
    let ball = &inst.balls[u];
    let source: Vec<Option<usize>> = ball.iter().map(|p| inst.balls[c].binary_search(p).ok()).collect();
    let fresh: Vec<usize> = (0..ball.len()).filter(|&i| source[i].is_none()).collect();
    let a_slot = ball.binary_search(&a).ok();
    let ia = inst.ntd.nodes[u].bag.binary_search(&a).expect("introduced vertex is in the bag");
    let out: Vec<Vec<Entry>> = child
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let far: Vec<(u8, Profile)> = e
                .far
                .iter()
                .map(|(x, p)| {
                    let mut q = p.clone();
                    q.insert(ia, inst.cap(inst.through_bag(c, p, a)));
                    (*x, q)
                })
                .collect();
            // Whether guest x may sit on fresh slot s given the far guests.
            let fits_far: Vec<u64> = fresh
                .iter()
                .map(|&s| {
                    (0..inst.g.n())
                        .filter(|&x| {
                            e.far
                                .iter()
                                .all(|(y, p)| inst.through_bag(c, p, ball[s]) >= inst.dg.get(x, *y as usize) as u64)
                        })
                        .fold(0, |m, x| m | 1 << x)
                })
                .collect();
            let mut slots: Vec<u8> = source.iter().map(|s| s.map_or(EMPTY, |j| e.slots[j])).collect();
            let free = inst.all & !(mask_of(&e.slots) | e.below);
            let mut found = Vec::new();
            fill(inst, ball, &fresh, &fits_far, 0, &mut slots, free, &mut |slots| {
                let at_a = a_slot.map_or(0, |i| if slots[i] == EMPTY { 0 } else { 1u64 << slots[i] });
                let below = e.below | at_a;
                if inst.local_ok(u, slots, below) {
                    found.push(Entry { slots: slots.to_vec(), below, far: far.clone(), from: [k as u32, u32::MAX] });
                }
            });
            found
        })
        .collect();
    dedup(out.into_iter().flatten().collect())
}

/// Leaves each fresh slot empty or gives it a distinct free guest that fits
/// every slot already filled and every far guest.
#[allow(clippy::too_many_arguments)]
fn fill(
    inst: &Instance,
    ball: &[usize],
    fresh: &[usize],
    fits_far: &[u64],
    i: usize,
    slots: &mut Vec<u8>,
    free: u64,
    visit: &mut dyn FnMut(&[u8]),
) {
    let Some(&s) = fresh.get(i) else {
        visit(slots);
        return;
    };
    fill(inst, ball, fresh, fits_far, i + 1, slots, free, visit);
    let p = ball[s];
    let mut f = free & fits_far[i];
    while f != 0 {
        let x = f.trailing_zeros() as usize;
        f &= f - 1;
        let fits = slots.iter().enumerate().all(|(j, &y)| y == EMPTY || inst.pair_ok(x, p, y as usize, ball[j]));
        if fits {
            slots[s] = x as u8;
            fill(inst, ball, fresh, fits_far, i + 1, slots, free & !(1 << x), visit);
            slots[s] = EMPTY;
        }
    }
}

fn forget(inst: &Instance, u: usize, v: usize, child: &Table) -> Table {
    let c = inst.ntd.nodes[u].children[0];
    let iv = inst.ntd.nodes[c].bag.binary_search(&v).expect("forgotten vertex is in the child bag");
    let bag = &inst.ntd.nodes[u].bag;
    let ball = &inst.balls[u];
    let old = &inst.balls[c];
    let out: Vec<Option<Entry>> = child
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let mut slots = Vec::with_capacity(ball.len());
            let mut far: Vec<(u8, Profile)> = e
                .far
                .iter()
                .map(|(x, p)| {
                    let mut q = p.clone();
                    q.remove(iv);
                    (*x, q)
                })
                .collect();
            for (j, &p) in old.iter().enumerate() {
                let x = e.slots[j];
                if ball.binary_search(&p).is_ok() {
                    slots.push(x);
                } else if x != EMPTY {
                    if e.below >> x & 1 == 0 {
                        return None;
                    }
                    far.push((x, bag.iter().map(|&b| inst.cap(inst.dh.get(p, b) as u64)).collect()));
                }
            }
            far.retain(|(_, p)| p.iter().any(|&t| t != INF));
            far.sort_unstable();
            inst.local_ok(u, &slots, e.below).then_some(Entry {
                slots,
                below: e.below,
                far,
                from: [k as u32, u32::MAX],
            })
        })
        .collect();
    dedup(out.into_iter().flatten().collect())
}

fn join(inst: &Instance, u: usize, left: &Table, right: &Table) -> Table {
    let mut by_slots: HashMap<&[u8], Vec<usize>> = HashMap::new();
    for (k, e) in right.iter().enumerate() {
        by_slots.entry(&e.slots).or_default().push(k);
    }
    let bag = &inst.ntd.nodes[u].bag;
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
                let apart = e.far.iter().all(|(x, p)| {
                    other.far.iter().all(|(y, q)| {
                        let through = (0..bag.len()).map(|b| add(p[b], q[b])).min().unwrap_or(u64::MAX);
                        through >= inst.dg.get(*x as usize, *y as usize) as u64
                    })
                });
                let below = e.below | other.below;
                if apart && inst.local_ok(u, &e.slots, below) {
                    let mut far: Vec<(u8, Profile)> = e.far.iter().chain(&other.far).cloned().collect();
                    far.sort_unstable();
                    found.push(Entry { slots: e.slots.clone(), below, far, from: [i as u32, k as u32] });
                }
            }
            found
        })
        .collect();
    dedup(out.into_iter().flatten().collect())
}

/// Walks the provenance of an accepted root entry, checks that every guest
/// vertex is placed on a connected set of nodes, and verifies the union.
fn witness(inst: &Instance, tables: &[Table], root_entry: usize) -> Result<Embedding, SolveError> {
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
            e.slots
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x != EMPTY)
                .map(|(i, &x)| (x as usize, inst.balls[u][i]))
                .collect()
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
    if let Some((x, y, _)) = f.injectivity_violation() {
        return Err(unverified(format!("guest vertices {x} and {y} share an image")));
    }
    match verify_nc_distortion(inst.g, inst.h, inst.dg, inst.dh, &f, inst.d) {
        Ok(v) if v.is_ok() => Ok(f),
        Ok(v) => Err(unverified(format!("{v:?}"))),
        Err(e) => Err(unverified(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_sums_saturate() {
        assert_eq!(add(2, 3), 5);
        assert_eq!(add(INF, 0), u64::MAX);
        assert_eq!(add(0, INF), u64::MAX);
    }

    #[test]
    fn components_split_masks() {
        // Path 0-1-2-3 without vertex 1.
        let nbr = [0b0010, 0b0101, 0b1010, 0b0100];
        assert_eq!(components(&nbr, 0b1101), vec![0b0001, 0b1100]);
        assert_eq!(neighbors_of(&nbr, 0b0001), 0b0010);
        assert_eq!(mask_of(&[3, EMPTY, 0]), 0b1001);
    }
}
