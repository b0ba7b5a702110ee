use crate::GraphError;

/// Undirected simple graph on vertices `0..n` with optional positive integer
/// edge weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    // Parallel to `adj`: weight of the edge to `adj[u][i]`.
    weights: Option<Vec<Vec<u32>>>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], weights: None }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.insert_edge(u, v, None)?;
        }
        Ok(g)
    }

    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        g.weights = Some(vec![Vec::new(); n]);
        for &(u, v, w) in edges {
            if w == 0 {
                return Err(GraphError::BadWeight { u, v });
            }
            g.insert_edge(u, v, Some(w))?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, u: usize, v: usize, w: Option<u32>) -> Result<(), GraphError> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: u.max(v), n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj[u].binary_search(&v).is_ok() {
            return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
        }
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a].binary_search(&b).unwrap_err();
            self.adj[a].insert(pos, b);
            if let Some(ws) = self.weights.as_mut() {
                ws[a].insert(pos, w.unwrap_or(1));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sorted neighbour list of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of edge `uv`, 1 for unweighted graphs, `None` if absent.
    pub fn weight(&self, u: usize, v: usize) -> Option<u32> {
        let i = self.adj[u].binary_search(&v).ok()?;
        Some(self.weights.as_ref().map_or(1, |ws| ws[u][i]))
    }

    /// Largest edge weight (1 when unweighted or edgeless).
    pub fn max_weight(&self) -> u32 {
        self.weights.as_ref().and_then(|ws| ws.iter().flatten().copied().max()).unwrap_or(1)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn weighted_edges(&self) -> Vec<(usize, usize, u32)> {
        self.edges().map(|(u, v)| (u, v, self.weight(u, v).unwrap())).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        crate::components_after_removal(self, &[]).len() == 1
    }

    /// Neighbourhood of `u` as a bitmask; only valid when `n <= 64`.
    pub fn neighbor_mask(&self, u: usize) -> u64 {
        self.adj[u].iter().fold(0u64, |m, &v| m | (1 << v))
    }

    /// Subgraph induced by `keep` (in the given order), re-indexed to `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut out = Graph::empty(keep.len());
        if self.weights.is_some() {
            out.weights = Some(vec![Vec::new(); keep.len()]);
        }
        for (i, &u) in keep.iter().enumerate() {
            for &v in &self.adj[u] {
                let j = index[v];
                if j != usize::MAX && i < j {
                    out.insert_edge(i, j, self.weight(u, v)).expect("induced edge");
                }
            }
        }
        out
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut out = Graph::empty(self.n());
        if self.weights.is_some() {
            out.weights = Some(vec![Vec::new(); self.n()]);
        }
        for (u, v, w) in self.weighted_edges() {
            out.insert_edge(perm[u], perm[v], self.weights.as_ref().map(|_| w)).expect("relabel is a bijection");
        }
        out
    }
}
