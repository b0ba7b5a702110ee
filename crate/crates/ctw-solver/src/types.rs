use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use embed_core::Embedding;
use graph_core::{DistanceMatrix, Graph};
use treewidth_solver::{ball_union, NiceTreeDecomposition, TwPartialEmbedding};

/// A truncated type value: a finite integer or infinity, which absorbs
/// addition and compares above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Finite(i64),
    Inf,
}

impl Value {
    pub fn is_inf(self) -> bool {
        self == Value::Inf
    }
}

impl std::ops::Add for Value {
    type Output = Value;

    fn add(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Inf,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(k) => write!(f, "{k}"),
            Value::Inf => write!(f, "inf"),
        }
    }
}

/// The truncation threshold `2 gamma + 3 d + 3`.
pub fn threshold(gamma: u32, d: u32) -> i64 {
    2 * gamma as i64 + 3 * d as i64 + 3
}

/// `k` below the threshold, infinity from it on.
pub fn beta(k: i64, gamma: u32, d: u32) -> Value {
    beta_value(Value::Finite(k), gamma, d)
}

/// [`beta`] extended to infinity, which it fixes.
pub fn beta_value(v: Value, gamma: u32, d: u32) -> Value {
    match v {
        Value::Finite(k) if k < threshold(gamma, d) => v,
        _ => Value::Inf,
    }
}

/// One type: `values[i][j]` is the value at the `i`-th bag vertex of the
/// `j`-th guest vertex of the list's domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeVector {
    pub values: Vec<Vec<Value>>,
}

/// A set of types over a fixed bag and domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeList {
    /// Sorted bag of the node owning the list.
    pub bag: Vec<usize>,
    /// Sorted guest vertices the types are functions of.
    pub dom: Vec<usize>,
    pub types: BTreeSet<TypeVector>,
}

impl TypeList {
    fn value(&self, t: &TypeVector, a: usize, x: usize) -> Option<Value> {
        let i = self.bag.binary_search(&a).ok()?;
        let j = self.dom.binary_search(&x).ok()?;
        Some(t.values[i][j])
    }
}

/// A partial embedding at a node together with one type-list per tree
/// neighbour of the node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtwState {
    pub f: TwPartialEmbedding,
    pub lists: BTreeMap<usize, TypeList>,
}

/// Guest, host, decomposition and parameters shared by the type predicates.
/// Partial embeddings at a node map into the host ball of radius `radius`
/// around its bag.
pub struct TypeContext<'a> {
    pub g: &'a Graph,
    pub dg: &'a DistanceMatrix,
    pub h: &'a Graph,
    pub dh: &'a DistanceMatrix,
    pub ntd: &'a NiceTreeDecomposition,
    pub d: u32,
    pub gamma: u32,
    pub radius: u32,
    neighbors: Vec<Vec<usize>>,
    /// Host vertices on the side of each tree neighbour, keyed by (node, neighbour).
    sides: BTreeMap<(usize, usize), Vec<bool>>,
}

impl<'a> TypeContext<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: &'a Graph,
        dg: &'a DistanceMatrix,
        h: &'a Graph,
        dh: &'a DistanceMatrix,
        ntd: &'a NiceTreeDecomposition,
        d: u32,
        gamma: u32,
        radius: u32,
    ) -> Self {
        let k = ntd.len();
        let mut neighbors = vec![Vec::new(); k];
        for (p, x) in ntd.nodes.iter().enumerate() {
            for &c in &x.children {
                neighbors[p].push(c);
                neighbors[c].push(p);
            }
        }
        neighbors.iter_mut().for_each(|n| n.sort_unstable());
        let mut sides = BTreeMap::new();
        for u in 0..k {
            for &v in &neighbors[u] {
                // Nodes reachable from v without passing through u.
                let mut seen = vec![false; k];
                seen[u] = true;
                seen[v] = true;
                let mut stack = vec![v];
                let mut hosts = vec![false; h.n()];
                while let Some(t) = stack.pop() {
                    ntd.nodes[t].bag.iter().for_each(|&b| hosts[b] = true);
                    for &s in &neighbors[t] {
                        if !seen[s] {
                            seen[s] = true;
                            stack.push(s);
                        }
                    }
                }
                sides.insert((u, v), hosts);
            }
        }
        TypeContext { g, dg, h, dh, ntd, d, gamma, radius, neighbors, sides }
    }

    pub fn tree_neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    fn beta(&self, v: Value) -> Value {
        beta_value(v, self.gamma, self.d)
    }

    fn bag(&self, u: usize) -> &[usize] {
        &self.ntd.nodes[u].bag
    }

    /// Guests of `f` whose images lie in bags on `v`'s side of `f.node`.
    pub fn dom_toward(&self, f: &TwPartialEmbedding, v: usize) -> Vec<usize> {
        let side = &self.sides[&(f.node, v)];
        f.map.iter().filter(|&(_, &p)| side[p]).map(|(&x, _)| x).collect()
    }

    /// Union of the components of the guest outside the domain of `f` that
    /// have a neighbour in [`TypeContext::dom_toward`].
    pub fn m_set(&self, f: &TwPartialEmbedding, v: usize) -> u64 {
        let dom = f.domain_mask();
        let toward = self.dom_toward(f, v).iter().fold(0u64, |m, &x| m | 1 << x);
        let mut out = 0;
        let mut rest = (0..self.g.n()).fold(0u64, |m, x| m | 1 << x) & !dom;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                frontier = self.neighbors_of(frontier) & rest & !comp;
                comp |= frontier;
            }
            if self.neighbors_of(comp) & toward != 0 {
                out |= comp;
            }
            rest &= !comp;
        }
        out
    }

    fn neighbors_of(&self, set: u64) -> u64 {
        (0..self.g.n()).filter(|&x| set >> x & 1 == 1).fold(0, |m, x| m | self.g.neighbor_mask(x))
    }

    /// The type of guest vertex `x` placed at host vertex `p`, relative to
    /// node `u` and domain `dom`.
    fn type_of(&self, u: usize, x: usize, p: usize, dom: &[usize]) -> TypeVector {
        let values = self
            .bag(u)
            .iter()
            .map(|&b| {
                dom.iter()
                    .map(|&y| self.beta(Value::Finite(self.dh.get(p, b) as i64 - self.dg.get(x, y) as i64)))
                    .collect()
            })
            .collect();
        TypeVector { values }
    }
}

/// Whether `f` is a non-contracting injective map with expansion at most
/// `d` into the ball of its node, whose component sets towards distinct
/// tree neighbours are disjoint and whose bag guests have all their guest
/// neighbours in the domain.
pub fn ctw_feasible(ctx: &TypeContext, f: &TwPartialEmbedding) -> bool {
    let ball = ball_union(ctx.h, ctx.dh, ctx.bag(f.node), ctx.radius);
    let placed: Vec<(usize, usize)> = f.map.iter().map(|(&x, &p)| (x, p)).collect();
    if placed.iter().any(|&(x, p)| x >= ctx.g.n() || ball.binary_search(&p).is_err()) {
        return false;
    }
    for (i, &(x, p)) in placed.iter().enumerate() {
        for &(y, q) in &placed[i + 1..] {
            let (a, b) = (ctx.dg.get(x, y) as u64, ctx.dh.get(p, q) as u64);
            if b < a || b > ctx.d as u64 * a {
                return false;
            }
        }
    }
    let mut seen = 0u64;
    for &v in ctx.tree_neighbors(f.node) {
        let m = ctx.m_set(f, v);
        if m & seen != 0 {
            return false;
        }
        seen |= m;
    }
    let dom = f.domain_mask();
    let bag = ctx.bag(f.node);
    placed.iter().filter(|(_, p)| bag.binary_search(p).is_ok()).all(|&(x, _)| ctx.g.neighbor_mask(x) & !dom == 0)
}

/// Whether `list` has, for every guest vertex of the domain towards `v`, a
/// type matching that vertex's truncated distance profile.
pub fn compatible(ctx: &TypeContext, list: &TypeList, f: &TwPartialEmbedding, v: usize) -> bool {
    let dom = ctx.dom_toward(f, v);
    if list.dom != dom || list.bag != ctx.bag(f.node) {
        return false;
    }
    dom.iter().all(|&x| list.types.contains(&ctx.type_of(f.node, x, f.map[&x], &dom)))
}

/// Whether every pair of types from the two lists has witnesses `x`, `y`
/// in the two domains with `t1(x) + t2(y) >= D_G(x, y)` at every bag
/// vertex. Infinite values satisfy every inequality.
pub fn agree(l1: &TypeList, l2: &TypeList, dg: &DistanceMatrix) -> bool {
    if l1.bag != l2.bag {
        return false;
    }
    l1.types.iter().all(|t1| {
        l2.types.iter().all(|t2| {
            l1.dom.iter().enumerate().any(|(i, &x)| {
                l2.dom.iter().enumerate().any(|(j, &y)| {
                    let need = Value::Finite(dg.get(x, y) as i64);
                    (0..l1.bag.len()).all(|b| t1.values[b][i] + t2.values[b][j] >= need)
                })
            })
        })
    })
}

/// Whether a state is feasible: its map is feasible, each list is
/// compatible with its domain and the lists agree pairwise.
pub fn state_feasible(ctx: &TypeContext, s: &CtwState) -> bool {
    let nbrs = ctx.tree_neighbors(s.f.node);
    if !ctw_feasible(ctx, &s.f) || s.lists.keys().copied().collect::<Vec<_>>() != nbrs {
        return false;
    }
    if !s.lists.iter().all(|(&v, l)| compatible(ctx, l, &s.f, v)) {
        return false;
    }
    let lists: Vec<&TypeList> = s.lists.values().collect();
    (0..lists.len()).all(|i| (i + 1..lists.len()).all(|j| agree(lists[i], lists[j], ctx.dg)))
}

/// How the transfer into the child's list treats guest vertices outside the
/// parent list's domain at bag vertices shared by both nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SharedRule {
    /// Copy the value, which leaves the condition vacuous because the
    /// parent type is undefined there.
    Copy,
    /// Take the same maximum over the parent domain as the upward transfer.
    Max,
}

/// Whether the child state `s_v` succeeds the parent state `s_u`: the maps
/// agree on the overlap of their balls, and types transfer upwards and
/// downwards through the β(min)/β(max) rules.
pub fn state_succeeds(ctx: &TypeContext, s_u: &CtwState, s_v: &CtwState) -> bool {
    state_succeeds_with(ctx, s_u, s_v, SharedRule::Copy)
}

pub fn state_succeeds_with(ctx: &TypeContext, s_u: &CtwState, s_v: &CtwState, rule: SharedRule) -> bool {
    let (u, v) = (s_u.f.node, s_v.f.node);
    if !ctx.ntd.nodes[u].children.contains(&v) || !maps_agree(ctx, &s_u.f, &s_v.f) {
        return false;
    }
    let upward = ctx
        .tree_neighbors(v)
        .iter()
        .filter(|&&w| w != u)
        .all(|&w| transfers(ctx, &s_v.lists[&w], &s_u.lists[&v], SharedRule::Max));
    let downward = ctx
        .tree_neighbors(u)
        .iter()
        .filter(|&&w| w != v)
        .all(|&w| transfers(ctx, &s_u.lists[&w], &s_v.lists[&u], rule));
    upward && downward
}

/// Maps agree where both are defined, and each keeps the other's guests
/// whose images lie in its own ball.
fn maps_agree(ctx: &TypeContext, a: &TwPartialEmbedding, b: &TwPartialEmbedding) -> bool {
    let ball_a = ball_union(ctx.h, ctx.dh, ctx.bag(a.node), ctx.radius);
    let ball_b = ball_union(ctx.h, ctx.dh, ctx.bag(b.node), ctx.radius);
    let covers = |from: &TwPartialEmbedding, to: &TwPartialEmbedding, ball: &[usize]| {
        from.map.iter().all(|(x, p)| match to.map.get(x) {
            Some(q) => q == p,
            None => ball.binary_search(p).is_err(),
        })
    };
    covers(a, b, &ball_b) && covers(b, a, &ball_a)
}

/// Every type of `from` (owned by node `s`) has a counterpart in `to`
/// (owned by a neighbour `t` of `s`) given by the transfer rules.
fn transfers(ctx: &TypeContext, from: &TypeList, to: &TypeList, shared: SharedRule) -> bool {
    from.types.iter().all(|t1| {
        let want = transferred(ctx, from, t1, to, shared);
        to.types.iter().any(|t2| want.iter().all(|&(i, j, w)| w.is_none_or(|w| t2.values[i][j] == w)))
    })
}

/// The values a transferred type must take, as (bag index, domain index,
/// value) in `to`'s coordinates; `None` values are unconstrained.
fn transferred(
    ctx: &TypeContext,
    from: &TypeList,
    t1: &TypeVector,
    to: &TypeList,
    shared: SharedRule,
) -> Vec<(usize, usize, Option<Value>)> {
    let through = |a: usize, y: usize| -> Value {
        from.bag
            .iter()
            .map(|&b| Value::Finite(ctx.dh.get(a, b) as i64) + from.value(t1, b, y).expect("y in domain"))
            .min()
            .unwrap_or(Value::Inf)
    };
    let mut want = Vec::new();
    for (j, &x) in to.dom.iter().enumerate() {
        let inside = from.dom.binary_search(&x).is_ok();
        for (i, &a) in to.bag.iter().enumerate() {
            let in_from_bag = from.bag.binary_search(&a).is_ok();
            let w = match (inside, in_from_bag) {
                (true, true) => Some(from.value(t1, a, x).expect("x in domain")),
                (true, false) => Some(ctx.beta(through(a, x))),
                (false, true) if shared == SharedRule::Copy => None,
                (false, shared_bag) => from
                    .dom
                    .iter()
                    .map(|&y| {
                        let base = match shared_bag {
                            true => from.value(t1, a, y).expect("y in domain"),
                            false => through(a, y),
                        };
                        match base {
                            Value::Finite(k) => Value::Finite(k - ctx.dg.get(x, y) as i64),
                            Value::Inf => Value::Inf,
                        }
                    })
                    .max()
                    .map(|m| ctx.beta(m)),
            };
            want.push((i, j, w));
        }
    }
    want
}

/// The states a global embedding induces: at every node, the embedding
/// restricted to the ball of the bag, with one list per tree neighbour
/// holding the types of the domain towards it and of its component set.
pub fn states_from_embedding(ctx: &TypeContext, f: &Embedding) -> Vec<CtwState> {
    (0..ctx.ntd.len())
        .map(|u| {
            let ball = ball_union(ctx.h, ctx.dh, ctx.bag(u), ctx.radius);
            let map: BTreeMap<usize, usize> =
                f.map().iter().filter(|(_, p)| ball.binary_search(p).is_ok()).map(|(&x, &p)| (x, p)).collect();
            let fu = TwPartialEmbedding { node: u, map, below: 0 };
            let lists = ctx
                .tree_neighbors(u)
                .iter()
                .map(|&v| {
                    let dom = ctx.dom_toward(&fu, v);
                    let m = ctx.m_set(&fu, v);
                    let members = dom.iter().copied().chain((0..ctx.g.n()).filter(|&x| m >> x & 1 == 1));
                    let types = members.map(|x| ctx.type_of(u, x, f.map()[&x], &dom)).collect();
                    (v, TypeList { bag: ctx.bag(u).to_vec(), dom, types })
                })
                .collect();
            CtwState { f: fu, lists }
        })
        .collect()
}

/// For a tree path `u = path[0], u2 = path[1], ..., v` and a global
/// embedding with its induced states, the guest vertices `x` placed at `v`
/// for which neither property holds: a node `u_j` of the path and a guest
/// vertex `y` placed there with `D_H(F(x), b) - D_G(x, y)` at least the
/// threshold for every bag vertex `b` of `u_j`, or a type in `u`'s list
/// towards `u2` equal to the untruncated offsets of `x`.
///
/// Only vertices `x` not placed at `u` are considered, and only when some
/// guest vertex is placed towards `u2` at `u`. Otherwise the list has
/// nothing to say about `x`, and both properties fail already for a single
/// guest vertex on a two-vertex host.
pub fn dichotomy_failures(ctx: &TypeContext, f: &Embedding, states: &[CtwState], path: &[usize]) -> Vec<usize> {
    assert!(path.len() >= 2, "a path needs two nodes");
    let thr = threshold(ctx.gamma, ctx.d);
    let first = &states[path[0]];
    if ctx.dom_toward(&first.f, path[1]).is_empty() {
        return Vec::new();
    }
    let list = &first.lists[&path[1]];
    let last = &states[path[path.len() - 1]];
    last.f
        .map
        .keys()
        .copied()
        .filter(|x| !first.f.map.contains_key(x))
        .filter(|&x| {
            let px = f.map()[&x];
            let far = path.iter().any(|&uj| {
                let bag = ctx.bag(uj);
                states[uj]
                    .f
                    .map
                    .keys()
                    .any(|&y| bag.iter().all(|&b| ctx.dh.get(px, b) as i64 - ctx.dg.get(x, y) as i64 >= thr))
            });
            let exact = list.types.iter().any(|t| {
                list.bag.iter().enumerate().all(|(i, &b)| {
                    list.dom.iter().enumerate().all(|(j, &y)| {
                        t.values[i][j] == Value::Finite(ctx.dh.get(px, b) as i64 - ctx.dg.get(x, y) as i64)
                    })
                })
            });
            !far && !exact
        })
        .collect()
}
