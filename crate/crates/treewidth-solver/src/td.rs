use std::collections::BTreeSet;
use std::fmt::Write as _;

use graph_core::Graph;

use crate::TdError;

/// A tree decomposition of a host graph on `n_vertices` vertices. Node 0 is
/// the root; `parent[i]` is `None` only for the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub n_vertices: usize,
    pub bags: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
}

impl TreeDecomposition {
    /// Builds a decomposition from bags and undirected tree edges, rooted at
    /// bag 0.
    pub fn from_edges(n_vertices: usize, bags: Vec<Vec<usize>>, edges: &[(usize, usize)]) -> Result<Self, TdError> {
        let k = bags.len();
        if k == 0 {
            return Err(TdError::NotATree("no bags".into()));
        }
        if edges.len() != k - 1 {
            return Err(TdError::NotATree(format!("{} bags need {} edges, got {}", k, k - 1, edges.len())));
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in edges {
            if a >= k || b >= k || a == b {
                return Err(TdError::NotATree(format!("bad tree edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; k];
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(TdError::NotATree("decomposition tree is disconnected".into()));
        }
        let bags = bags
            .into_iter()
            .map(|b| {
                let set: BTreeSet<usize> = b.into_iter().collect();
                set.into_iter().collect()
            })
            .collect();
        Ok(TreeDecomposition { n_vertices, bags, parent })
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one; 0 for a decomposition of the empty graph.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent.iter().enumerate().filter_map(|(i, p)| p.map(|p| (p, i))).collect()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(i);
            }
        }
        ch
    }

    /// Checks the three decomposition axioms against `h`.
    pub fn validate(&self, h: &Graph) -> Result<(), TdError> {
        if h.n() != self.n_vertices {
            return Err(TdError::VertexCount { expected: h.n(), found: self.n_vertices });
        }
        if let Some(&v) = self.bags.iter().flatten().find(|&&v| v >= h.n()) {
            return Err(TdError::VertexOutOfRange(v));
        }
        let mut count = vec![0usize; h.n()];
        self.bags.iter().flatten().for_each(|&v| count[v] += 1);
        if let Some(v) = count.iter().position(|&c| c == 0) {
            return Err(TdError::UncoveredVertex(v));
        }
        for (u, v) in h.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(TdError::UncoveredEdge(u, v));
            }
        }
        // Nodes holding v induce a subtree iff they span exactly count-1 edges.
        let mut inner = vec![0usize; h.n()];
        for (p, c) in self.edges() {
            for v in self.bags[c].iter().filter(|v| self.bags[p].binary_search(v).is_ok()) {
                inner[*v] += 1;
            }
        }
        match (0..h.n()).find(|&v| inner[v] + 1 != count[v]) {
            Some(v) => Err(TdError::DisconnectedOccurrence(v)),
            None => Ok(()),
        }
    }
}

/// Parses the PACE `.td` format: `c` comment lines, an `s td <bags> <width+1>
/// <vertices>` header, `b <id> <v...>` bag lines and tree edges `a b`, all
/// 1-based.
pub fn parse_pace(text: &str) -> Result<TreeDecomposition, TdError> {
    let err = |line: usize, m: &str| TdError::Parse { line, message: m.to_string() };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            continue;
        }
        let num = |t: &str| t.parse::<usize>().map_err(|_| err(line, &format!("expected a number, got {t:?}")));
        match toks[0] {
            "s" => {
                if header.is_some() {
                    return Err(err(line, "duplicate header"));
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(err(line, "header must be `s td <bags> <width+1> <vertices>`"));
                }
                let (k, w, n) = (num(toks[2])?, num(toks[3])?, num(toks[4])?);
                bags = vec![None; k];
                header = Some((k, w, n));
            }
            "b" => {
                let (k, w, n) = header.ok_or_else(|| err(line, "bag before header"))?;
                let id = num(toks.get(1).ok_or_else(|| err(line, "missing bag id"))?)?;
                if id == 0 || id > k {
                    return Err(err(line, &format!("bag id {id} outside 1..={k}")));
                }
                if bags[id - 1].is_some() {
                    return Err(err(line, &format!("bag {id} given twice")));
                }
                let mut vs = Vec::new();
                for t in &toks[2..] {
                    let v = num(t)?;
                    if v == 0 || v > n {
                        return Err(err(line, &format!("vertex {v} outside 1..={n}")));
                    }
                    vs.push(v - 1);
                }
                if vs.len() > w {
                    return Err(err(line, &format!("bag {id} has {} vertices, header allows {w}", vs.len())));
                }
                bags[id - 1] = Some(vs);
            }
            _ => {
                let (k, _, _) = header.ok_or_else(|| err(line, "edge before header"))?;
                if toks.len() != 2 {
                    return Err(err(line, "tree edge must be `a b`"));
                }
                let (a, b) = (num(toks[0])?, num(toks[1])?);
                if a == 0 || b == 0 || a > k || b > k {
                    return Err(err(line, &format!("tree edge ({a}, {b}) names a missing bag")));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, _, n) = header.ok_or_else(|| err(0, "missing header"))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| err(0, &format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    TreeDecomposition::from_edges(n, bags, &edges)
}

pub fn write_pace(td: &TreeDecomposition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s td {} {} {}", td.len(), td.width() + 1, td.n_vertices);
    for (i, b) in td.bags.iter().enumerate() {
        let vs: Vec<String> = b.iter().map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(out, "b {} {}", i + 1, vs.join(" "));
    }
    for (a, b) in td.edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// Decomposition from an elimination ordering: each vertex's bag holds it
/// and its later neighbours in the fill graph; the bag hangs below the bag of
/// the earliest-eliminated among those neighbours.
pub fn from_elimination_order(h: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = h.n();
    if n == 0 {
        return TreeDecomposition { n_vertices: 0, bags: vec![Vec::new()], parent: vec![None] };
    }
    let mut rank = vec![0; n];
    order.iter().enumerate().for_each(|(i, &v)| rank[v] = i);
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| h.neighbors(v).iter().copied().collect()).collect();
    let mut later: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in order {
        let nb: Vec<usize> = adj[v].iter().copied().filter(|&u| rank[u] > rank[v]).collect();
        for &a in &nb {
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        later[v] = nb;
    }
    // Bag i belongs to order[i]; the last vertex's bag becomes the root.
    let k = n;
    let mut bags = Vec::with_capacity(k);
    let mut edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let mut b = later[v].clone();
        b.push(v);
        bags.push(b);
        let up = later[v].iter().map(|&u| rank[u]).min();
        // Isolated pieces are chained to the next bag to keep one tree.
        match up {
            Some(j) => edges.push((i, j)),
            None if i + 1 < k => edges.push((i, i + 1)),
            None => {}
        }
    }
    // Re-root at the last bag by reversing indices.
    let bags: Vec<Vec<usize>> = bags.into_iter().rev().collect();
    let edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (k - 1 - a, k - 1 - b)).collect();
    TreeDecomposition::from_edges(n, bags, &edges).expect("elimination tree is a tree")
}

fn fill_neighbours(h: &Graph, eliminated: u64, v: usize) -> u64 {
    // Vertices outside `eliminated + v` reachable from v through eliminated ones.
    let mut seen = 1u64 << v;
    let mut stack = vec![v];
    let mut out = 0u64;
    while let Some(x) = stack.pop() {
        for &y in h.neighbors(x) {
            if seen >> y & 1 == 1 {
                continue;
            }
            seen |= 1 << y;
            if eliminated >> y & 1 == 1 {
                stack.push(y);
            } else {
                out |= 1 << y;
            }
        }
    }
    out
}

/// Minimum-width elimination ordering by dynamic programming over vertex
/// subsets. Exponential; meant for hosts with at most 12 vertices.
pub fn exact_elimination_order(h: &Graph) -> Vec<usize> {
    let n = h.n();
    assert!(n <= 20, "exact treewidth is exponential in the host size");
    let full = (1usize << n) - 1;
    let mut best = vec![usize::MAX; 1 << n];
    let mut choice = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        for v in (0..n).filter(|&v| s >> v & 1 == 1) {
            let rest = s & !(1 << v);
            let q = fill_neighbours(h, rest as u64, v).count_ones() as usize;
            let cost = best[rest].max(q);
            if cost < best[s] {
                best[s] = cost;
                choice[s] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s];
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Greedy ordering that always eliminates a vertex of minimum fill degree
/// (lowest id on ties).
pub fn min_degree_order(h: &Graph) -> Vec<usize> {
    let n = h.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| h.neighbors(v).iter().copied().collect()).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&v) = alive.iter().min_by_key(|&&v| (adj[v].len(), v)) {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        alive.remove(&v);
        order.push(v);
    }
    order
}

/// Exact minimum width for hosts with at most 12 vertices, min-degree
/// heuristic beyond.
pub fn tree_decomposition(h: &Graph) -> TreeDecomposition {
    let order = if h.n() <= 12 { exact_elimination_order(h) } else { min_degree_order(h) };
    from_elimination_order(h, &order)
}
