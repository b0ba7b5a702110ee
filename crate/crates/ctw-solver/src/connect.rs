use std::collections::VecDeque;

use graph_core::{DistanceMatrix, Graph};
use treewidth_solver::{make_nice_with, NiceTreeDecomposition, Step, TdError, TreeDecomposition};

/// A nice decomposition whose bags all induce connected host subgraphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedNiceDecomposition {
    pub ntd: NiceTreeDecomposition,
    /// Per node, the edges of a spanning tree of the subgraph its bag induces.
    pub certificates: Vec<Vec<(usize, usize)>>,
    /// Largest host distance between two vertices of one bag.
    pub gamma: u32,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConnectError {
    #[error(transparent)]
    Decomposition(#[from] TdError),
    #[error("host is disconnected, so its bags cannot all be connected")]
    DisconnectedHost,
    #[error("bag of node {0} is not connected")]
    DisconnectedBag(usize),
}

impl ConnectedNiceDecomposition {
    /// Checks the nice decomposition, every certificate and the measured
    /// width and `gamma`.
    pub fn validate(&self, h: &Graph, dh: &DistanceMatrix) -> Result<(), ConnectError> {
        self.ntd.validate(h)?;
        for (u, node) in self.ntd.nodes.iter().enumerate() {
            let cert = &self.certificates[u];
            let inside = |v: usize| node.bag.binary_search(&v).is_ok();
            let edges_ok = cert.iter().all(|&(a, b)| inside(a) && inside(b) && h.neighbors(a).contains(&b));
            if !edges_ok || cert.len() + 1 != node.bag.len().max(1) || !spans(&node.bag, cert) {
                return Err(ConnectError::DisconnectedBag(u));
            }
        }
        if self.width != self.ntd.width() || self.gamma != gamma(&self.ntd, dh) {
            return Err(TdError::NotNice("recorded width or gamma does not match the bags".into()).into());
        }
        Ok(())
    }
}

fn spans(bag: &[usize], edges: &[(usize, usize)]) -> bool {
    let mut reached = bag.first().map(|&v| vec![v]).unwrap_or_default();
    let mut grew = true;
    while grew {
        grew = false;
        for &(a, b) in edges {
            match (reached.contains(&a), reached.contains(&b)) {
                (true, false) => reached.push(b),
                (false, true) => reached.push(a),
                _ => continue,
            }
            grew = true;
        }
    }
    reached.len() == bag.len()
}

/// Largest host distance inside a bag.
pub fn gamma(ntd: &NiceTreeDecomposition, dh: &DistanceMatrix) -> u32 {
    ntd.nodes
        .iter()
        .flat_map(|x| x.bag.iter().flat_map(|&a| x.bag.iter().map(move |&b| dh.get(a, b))))
        .max()
        .unwrap_or(0)
}

/// Components of the subgraph induced by `bag`, each sorted, in order of
/// their smallest vertex.
fn bag_components(h: &Graph, bag: &[usize]) -> Vec<Vec<usize>> {
    let mut seen: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &s in bag {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![s];
        seen.push(s);
        let mut i = 0;
        while i < comp.len() {
            for &y in h.neighbors(comp[i]) {
                if bag.binary_search(&y).is_ok() && !seen.contains(&y) {
                    seen.push(y);
                    comp.push(y);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Shortest path from `a` to `b` that always steps to the lowest-numbered
/// neighbour still on a geodesic.
fn geodesic(h: &Graph, dh: &DistanceMatrix, a: usize, b: usize) -> Vec<usize> {
    let mut path = vec![a];
    let mut at = a;
    while at != b {
        at = *h.neighbors(at).iter().filter(|&&y| dh.get(y, b) + 1 == dh.get(at, b)).min().expect("b is reachable");
        path.push(at);
    }
    path
}

/// Closest pair between the first component and any other, ties broken
/// towards lower vertex numbers.
fn closest_pair(dh: &DistanceMatrix, comps: &[Vec<usize>], targets: &[usize]) -> (usize, usize) {
    let mut best = (u32::MAX, usize::MAX, usize::MAX);
    for &a in &comps[0] {
        for &b in targets {
            best = best.min((dh.get(a, b), a, b));
        }
    }
    (best.1, best.2)
}

fn insert_all(bag: &mut Vec<usize>, vs: &[usize]) -> bool {
    let before = bag.len();
    bag.extend_from_slice(vs);
    bag.sort_unstable();
    bag.dedup();
    bag.len() != before
}

/// Adds geodesic vertices to every bag until it is connected.
fn connect_bags(h: &Graph, dh: &DistanceMatrix, bags: &mut [Vec<usize>]) -> bool {
    let mut changed = false;
    for bag in bags.iter_mut() {
        loop {
            let comps = bag_components(h, bag);
            if comps.len() <= 1 {
                break;
            }
            let rest: Vec<usize> = comps[1..].concat();
            let (a, b) = closest_pair(dh, &comps, &rest);
            changed |= insert_all(bag, &geodesic(h, dh, a, b));
        }
    }
    changed
}

/// Makes adjacent bags share a vertex by adding a geodesic from the child
/// bag to the parent bag into the child bag.
fn link_adjacent(h: &Graph, dh: &DistanceMatrix, td: &TreeDecomposition, bags: &mut [Vec<usize>]) -> bool {
    let mut changed = false;
    for c in 0..bags.len() {
        let Some(p) = td.parent[c] else { continue };
        if bags[c].is_empty() || bags[p].is_empty() || bags[c].iter().any(|v| bags[p].contains(v)) {
            continue;
        }
        let (a, b) = closest_pair(dh, &[bags[c].clone()], &bags[p]);
        let path = geodesic(h, dh, a, b);
        changed |= insert_all(&mut bags[c], &path);
    }
    changed
}

/// Adds every vertex to the bags on the tree paths between its occurrences.
fn close_subtrees(td: &TreeDecomposition, n: usize, bags: &mut [Vec<usize>]) -> bool {
    let k = bags.len();
    let children = td.children();
    // Nodes listed so that every child precedes its parent.
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0usize];
    while let Some(t) = stack.pop() {
        order.push(t);
        stack.extend(&children[t]);
    }
    order.reverse();
    let mut changed = false;
    for v in 0..n {
        let total = bags.iter().filter(|b| b.contains(&v)).count();
        if total == 0 {
            continue;
        }
        let mut cnt = vec![0usize; k];
        for &t in &order {
            cnt[t] = bags[t].contains(&v) as usize + children[t].iter().map(|&c| cnt[c]).sum::<usize>();
        }
        for t in 0..k {
            let branches = children[t].iter().filter(|&&c| cnt[c] > 0).count();
            let on_tree = cnt[t] > 0 && (cnt[t] < total || branches >= 2);
            if on_tree && !bags[t].contains(&v) {
                insert_all(&mut bags[t], &[v]);
                changed = true;
            }
        }
    }
    changed
}

/// Step order that keeps every intermediate bag connected: introduce new
/// vertices adjacent to the current bag first, then forget vertices whose
/// removal keeps the rest connected, lowest numbers first.
fn connected_steps(h: &Graph) -> impl Fn(&[usize], &[usize]) -> Vec<Step> + '_ {
    move |lower, upper| {
        let mut bag = lower.to_vec();
        let mut steps = Vec::new();
        let mut add: Vec<usize> = upper.iter().copied().filter(|v| !lower.contains(v)).collect();
        while !add.is_empty() {
            let i =
                add.iter().position(|&v| bag.is_empty() || h.neighbors(v).iter().any(|y| bag.contains(y))).unwrap_or(0);
            let v = add.remove(i);
            insert_all(&mut bag, &[v]);
            steps.push(Step::Introduce(v));
        }
        let mut drop: Vec<usize> = lower.iter().copied().filter(|v| !upper.contains(v)).collect();
        while !drop.is_empty() {
            let i = drop
                .iter()
                .position(|&v| {
                    let rest: Vec<usize> = bag.iter().copied().filter(|&x| x != v).collect();
                    bag_components(h, &rest).len() <= 1
                })
                .unwrap_or(0);
            let v = drop.remove(i);
            bag.retain(|&x| x != v);
            steps.push(Step::Forget(v));
        }
        steps
    }
}

fn certificate(h: &Graph, bag: &[usize]) -> Vec<(usize, usize)> {
    let Some(&s) = bag.first() else { return Vec::new() };
    let mut seen = vec![s];
    let mut queue = VecDeque::from([s]);
    let mut edges = Vec::new();
    while let Some(x) = queue.pop_front() {
        for &y in h.neighbors(x) {
            if bag.binary_search(&y).is_ok() && !seen.contains(&y) {
                seen.push(y);
                edges.push((x, y));
                queue.push_back(y);
            }
        }
    }
    edges
}

/// Greedily makes every bag of a decomposition of a connected host
/// connected. Bags grow by geodesic vertices, the occurrences of every
/// vertex are closed to subtrees, and adjacent bags are made to meet, until
/// nothing changes.
pub fn connect_decomposition(
    td: &TreeDecomposition,
    h: &Graph,
    dh: &DistanceMatrix,
) -> Result<TreeDecomposition, ConnectError> {
    td.validate(h)?;
    if !h.is_connected() {
        return Err(ConnectError::DisconnectedHost);
    }
    let mut bags = td.bags.clone();
    loop {
        let mut changed = connect_bags(h, dh, &mut bags);
        changed |= link_adjacent(h, dh, td, &mut bags);
        changed |= close_subtrees(td, h.n(), &mut bags);
        if !changed {
            break;
        }
    }
    Ok(TreeDecomposition::from_edges(h.n(), bags, &td.edges())?)
}

/// [`connect_decomposition`] followed by a nice decomposition whose steps
/// keep every intermediate bag connected. The width may grow and is
/// reported along with `gamma`.
pub fn connectify(
    ntd: &NiceTreeDecomposition,
    h: &Graph,
    dh: &DistanceMatrix,
) -> Result<ConnectedNiceDecomposition, ConnectError> {
    ntd.validate(h)?;
    let connected = connect_decomposition(&ntd.to_tree_decomposition(), h, dh)?;
    let nice = make_nice_with(&connected, h, &connected_steps(h))?;
    let certificates: Vec<Vec<(usize, usize)>> = nice.nodes.iter().map(|x| certificate(h, &x.bag)).collect();
    let out = ConnectedNiceDecomposition { gamma: gamma(&nice, dh), width: nice.width(), ntd: nice, certificates };
    out.validate(h, dh)?;
    Ok(out)
}

/// Length of the longest induced cycle of `h` (a geodesic cycle), or
/// `None` for hosts above 24 vertices. Zero for forests.
pub fn longest_geodesic_cycle(h: &Graph) -> Option<usize> {
    if h.n() > 24 {
        return None;
    }
    let mut best = 0;
    for s in 0..h.n() {
        extend_induced(h, &mut vec![s], &mut best);
    }
    Some(best)
}

/// Extends an induced path whose first vertex is its smallest. A neighbour
/// of the start closes an induced cycle and is not extended further.
fn extend_induced(h: &Graph, path: &mut Vec<usize>, best: &mut usize) {
    let s = path[0];
    let at = *path.last().expect("path is non-empty");
    for &y in h.neighbors(at) {
        if y <= s || path.contains(&y) {
            continue;
        }
        let nbrs = h.neighbors(y);
        let inner = if path.len() > 2 { &path[1..path.len() - 1] } else { &[][..] };
        if inner.iter().any(|p| nbrs.contains(p)) {
            continue;
        }
        if path.len() >= 2 && nbrs.contains(&s) {
            if path[1] < y {
                *best = (*best).max(path.len() + 1);
            }
            continue;
        }
        path.push(y);
        extend_induced(h, path, best);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use graph_core::all_pairs_distances;
    use graph_core::corpus::cycle_graph;

    #[test]
    fn geodesic_prefers_low_vertices() {
        let h = cycle_graph(6);
        let dh = all_pairs_distances(&h);
        assert_eq!(geodesic(&h, &dh, 0, 3), vec![0, 1, 2, 3]);
        assert_eq!(geodesic(&h, &dh, 3, 0), vec![3, 2, 1, 0]);
        assert_eq!(geodesic(&h, &dh, 2, 2), vec![2]);
    }

    #[test]
    fn steps_keep_bags_connected() {
        let h = cycle_graph(8);
        let steps = connected_steps(&h);
        for (lower, upper) in [(vec![], vec![1, 2, 3, 4]), (vec![0, 1, 2], vec![2, 3, 4]), (vec![5, 6, 7], vec![])] {
            let mut bag = lower.clone();
            for step in steps(&lower, &upper) {
                match step {
                    Step::Introduce(v) => insert_all(&mut bag, &[v]),
                    Step::Forget(v) => {
                        bag.retain(|&x| x != v);
                        true
                    }
                };
                assert!(bag_components(&h, &bag).len() <= 1, "{bag:?}");
            }
            assert_eq!(bag, upper);
        }
    }

    #[test]
    fn subtree_closure_fills_paths() {
        let td = TreeDecomposition::from_edges(3, vec![vec![0], vec![1], vec![2, 0]], &[(0, 1), (1, 2)]).unwrap();
        let mut bags = td.bags.clone();
        assert!(close_subtrees(&td, 3, &mut bags));
        assert_eq!(bags, vec![vec![0], vec![0, 1], vec![0, 2]]);
        assert!(!close_subtrees(&td, 3, &mut bags));
    }
}
