//! Graphs, exact distances and generators shared by every solver.

pub mod corpus;
mod distance;
mod graph;
mod host;
mod parse;

pub use distance::{all_pairs_distances, DistanceMatrix};
pub use graph::Graph;
pub use host::{generate, theta_arms, HostSpec};
pub use parse::{parse_edge_list, parse_guest, write_edge_list, ParsedGraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge {0} {1}")]
    ParallelEdge(usize, usize),
    #[error("edge {u} {v} has weight 0")]
    BadWeight { u: usize, v: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("guest graph is disconnected")]
    Disconnected,
    #[error("invalid host: {0}")]
    InvalidHost(String),
}

/// Connected components of `g` after deleting `removed`, each sorted, listed
/// by smallest vertex id.
pub fn components_after_removal(g: &Graph, removed: &[usize]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    for &r in removed {
        label[r] = usize::MAX - 1;
    }
    let mut comps = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut comp = vec![s];
        label[s] = id;
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &v in g.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = id;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Degree gate: `false` (reject) iff a guest of maximum degree `g_delta`
/// cannot embed non-contractingly with distortion `d` into a host of maximum
/// degree `h_delta`, because the `d`-ball around an image holds at most
/// `sum_{i<d} h_delta (h_delta-1)^i` other vertices.
pub fn degree_gate(g_delta: usize, h_delta: usize, d: u32) -> bool {
    (g_delta as u128) <= ball_bound(h_delta, d)
}

/// `sum_{0<=i<d} h (h-1)^i`, saturating.
pub fn ball_bound(h_delta: usize, d: u32) -> u128 {
    let h = h_delta as u128;
    let mut total: u128 = 0;
    let mut term = h;
    for _ in 0..d {
        total = total.saturating_add(term);
        term = term.saturating_mul(h.saturating_sub(1));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_examples() {
        let p3 = corpus::path_graph(3);
        assert_eq!(components_after_removal(&p3, &[1]), vec![vec![0], vec![2]]);
        let c6 = corpus::cycle_graph(6);
        assert_eq!(components_after_removal(&c6, &[]), vec![(0..6).collect::<Vec<_>>()]);
        assert_eq!(components_after_removal(&c6, &[0, 3]), vec![vec![1, 2], vec![4, 5]]);
    }

    #[test]
    fn degree_gate_examples() {
        assert!(!degree_gate(5, 2, 2));
        assert!(degree_gate(2, 2, 1));
        assert!(!degree_gate(13, 3, 2));
        assert!(degree_gate(9, 3, 2));
    }

    #[test]
    fn degree_gate_saturates() {
        assert!(degree_gate(usize::MAX, 1000, 40));
    }
}
