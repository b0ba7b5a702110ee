//! Small-graph generators used for test corpora and the `gen` command.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::Graph;

/// Isomorphism-invariant code of a graph with at most 11 vertices: the
/// vertex count plus the lexicographically smallest upper-triangle adjacency
/// bit string over all orderings compatible with a degree refinement.
pub fn canonical_form(g: &Graph) -> (usize, u64) {
    let n = g.n();
    assert!(n <= 11, "canonical_form supports at most 11 vertices");
    // Refine by (degree, sorted neighbour degrees); classes are invariant.
    let key = |v: usize| {
        let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&u| g.degree(u)).collect();
        nd.sort_unstable();
        (g.degree(v), nd)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| key(v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if key(c[0]) == key(v) => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut current = Vec::with_capacity(n);
    search_orderings(g, &mut classes, 0, &mut current, &mut best);
    (n, best)
}

fn search_orderings(g: &Graph, classes: &mut [Vec<usize>], ci: usize, current: &mut Vec<usize>, best: &mut u64) {
    if ci == classes.len() {
        *best = (*best).min(adjacency_code(g, current));
        return;
    }
    let len = classes[ci].len();
    permute(g, classes, ci, len, current, best);
}

// Heap-style recursive permutation of class `ci`, descending into later classes.
fn permute(g: &Graph, classes: &mut [Vec<usize>], ci: usize, k: usize, current: &mut Vec<usize>, best: &mut u64) {
    if k <= 1 {
        let before = current.len();
        current.extend_from_slice(&classes[ci]);
        search_orderings(g, classes, ci + 1, current, best);
        current.truncate(before);
        return;
    }
    permute(g, classes, ci, k - 1, current, best);
    for i in 0..k - 1 {
        let j = if k.is_multiple_of(2) { i } else { 0 };
        classes[ci].swap(j, k - 1);
        permute(g, classes, ci, k - 1, current, best);
    }
}

fn adjacency_code(g: &Graph, order: &[usize]) -> u64 {
    let mut code = 0u64;
    let n = order.len();
    for i in 0..n {
        for j in i + 1..n {
            code <<= 1;
            if g.has_edge(order[i], order[j]) {
                code |= 1;
            }
        }
    }
    code
}

fn dedup(candidates: impl IntoIterator<Item = Graph>) -> Vec<Graph> {
    let mut seen = HashSet::new();
    candidates.into_iter().filter(|g| seen.insert(canonical_form(g))).collect()
}

/// One graph per isomorphism class of connected graphs on exactly `n`
/// vertices (`1 <= n <= 8`). Every connected graph has a non-cut vertex, so
/// extending each class on `n-1` vertices by a vertex with a nonempty
/// neighbourhood reaches all classes.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=8).contains(&n));
    if n == 1 {
        return vec![Graph::empty(1)];
    }
    let smaller = connected_graphs(n - 1);
    dedup(smaller.iter().flat_map(|h| {
        (1u32..1 << (n - 1)).map(move |mask| {
            let mut edges: Vec<_> = h.edges().collect();
            edges.extend((0..n - 1).filter(|&v| mask >> v & 1 == 1).map(|v| (v, n - 1)));
            Graph::from_edges(n, &edges).unwrap()
        })
    }))
}

/// One tree per isomorphism class on exactly `n` vertices.
pub fn trees(n: usize) -> Vec<Graph> {
    assert!((1..=11).contains(&n));
    if n == 1 {
        return vec![Graph::empty(1)];
    }
    let smaller = trees(n - 1);
    dedup(smaller.iter().flat_map(|t| {
        (0..n - 1).map(move |v| {
            let mut edges: Vec<_> = t.edges().collect();
            edges.push((v, n - 1));
            Graph::from_edges(n, &edges).unwrap()
        })
    }))
}

/// Connected graphs on `n` vertices with exactly one cycle.
pub fn unicyclic_graphs(n: usize) -> Vec<Graph> {
    connected_graphs(n).into_iter().filter(|g| g.edge_count() == n).collect()
}

pub fn cycle_graph(n: usize) -> Graph {
    Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
}

pub fn path_graph(n: usize) -> Graph {
    Graph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
}

/// Star with centre 0 and `m` leaves.
pub fn star_graph(m: usize) -> Graph {
    Graph::from_edges(m + 1, &(1..=m).map(|i| (0, i)).collect::<Vec<_>>()).unwrap()
}

/// Random connected graph on `n` vertices with maximum degree at most
/// `max_degree` (which must be at least 2 when `n > 2`): a random tree plus
/// up to `extra` random extra edges.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, max_degree: usize, extra: usize) -> Graph {
    assert!(n <= 2 || max_degree >= 2);
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let open: Vec<usize> = order[..i].iter().copied().filter(|&u| deg[u] < max_degree).collect();
        let u = open[rng.gen_range(0..open.len())];
        let v = order[i];
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u.min(v), u.max(v)));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let e = (u.min(v), u.max(v));
        if u != v && deg[u] < max_degree && deg[v] < max_degree && !edges.contains(&e) {
            deg[u] += 1;
            deg[v] += 1;
            edges.push(e);
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Removes isomorphic duplicates, keeping first occurrences.
pub fn dedup_isomorphic(graphs: Vec<Graph>) -> Vec<Graph> {
    dedup(graphs)
}
