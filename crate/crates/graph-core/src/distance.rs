use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::Graph;

/// All-pairs shortest-path table. Unreachable pairs hold [`DistanceMatrix::INF`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub const INF: u32 = u32::MAX;

    /// Builds a matrix from a full row-major table.
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let data: Vec<u32> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), n * n, "distance table must be square");
        DistanceMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    /// Largest finite entry.
    pub fn diameter(&self) -> u32 {
        self.data.iter().copied().filter(|&x| x != Self::INF).max().unwrap_or(0)
    }

    /// Every entry multiplied by `k` (infinity stays infinite).
    pub fn scaled(&self, k: u32) -> Self {
        let data = self.data.iter().map(|&x| if x == Self::INF { x } else { x * k }).collect();
        DistanceMatrix { n: self.n, data }
    }
}

/// Exact shortest-path distances: BFS from every source for unweighted
/// graphs, Dijkstra for weighted ones.
pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let mut data = vec![DistanceMatrix::INF; n * n];
    for s in 0..n {
        let row = &mut data[s * n..(s + 1) * n];
        if g.is_weighted() {
            dijkstra(g, s, row);
        } else {
            bfs(g, s, row);
        }
    }
    DistanceMatrix { n, data }
}

fn bfs(g: &Graph, s: usize, dist: &mut [u32]) {
    let mut queue = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == DistanceMatrix::INF {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

fn dijkstra(g: &Graph, s: usize, dist: &mut [u32]) {
    let mut heap = BinaryHeap::from([Reverse((0u32, s))]);
    dist[s] = 0;
    while let Some(Reverse((du, u))) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &v in g.neighbors(u) {
            let nd = du + g.weight(u, v).unwrap();
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
}
