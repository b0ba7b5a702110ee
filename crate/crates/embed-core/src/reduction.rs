use graph_core::{all_pairs_distances, DistanceMatrix, Graph};
use num_rational::Ratio;

use crate::EmbedError;

/// Host whose edges were subdivided `p` times. Original vertices keep their
/// ids and are red; subdivision vertices follow and are blue.
#[derive(Clone, Debug)]
pub struct RedBlueHost {
    pub graph: Graph,
    pub red: Vec<bool>,
    pub p: u32,
}

impl RedBlueHost {
    pub fn red_vertices(&self) -> Vec<usize> {
        (0..self.graph.n()).filter(|&v| self.red[v]).collect()
    }
}

/// Replaces every edge `uv` by a path `u b_1 .. b_p v` of fresh blue vertices.
/// Blue vertices are numbered edge by edge in lexicographic edge order.
pub fn subdivide_red_blue(h: &Graph, p: u32) -> RedBlueHost {
    let n = h.n();
    let p = p as usize;
    let total = n + h.edge_count() * p;
    let mut edges = Vec::with_capacity(h.edge_count() * (p + 1));
    let mut next = n;
    for (u, v) in h.edges() {
        let mut prev = u;
        for _ in 0..p {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, v));
    }
    let mut red = vec![false; total];
    red[..n].iter_mut().for_each(|r| *r = true);
    RedBlueHost { graph: Graph::from_edges(total, &edges).expect("subdivision is simple"), red, p: p as u32 }
}

/// One red-blue instance of the scaling reduction: the guest metric is
/// `guest_scale * D_G`, host edges have length `host_scale = p + 1`, and a
/// solution is a non-contracting embedding into the red vertices whose
/// expansion is at most `d`. Feasible iff the original problem has an
/// embedding with distortion at most `d` and contraction at most
/// `host_scale / guest_scale`.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub host: RedBlueHost,
    pub guest_scale: u32,
    pub host_scale: u32,
    pub d: Ratio<u64>,
}

impl ReductionInstance {
    pub fn guest_distances(&self, dg: &DistanceMatrix) -> DistanceMatrix {
        dg.scaled(self.guest_scale)
    }

    pub fn host_distances(&self) -> DistanceMatrix {
        all_pairs_distances(&self.host.graph)
    }

    /// Integer distortion when `d` is an integer.
    pub fn integer_d(&self) -> Option<u32> {
        self.d.is_integer().then(|| *self.d.numer() as u32)
    }
}

pub const DEFAULT_REDUCTION_BUDGET: usize = 10_000;

/// Instances of the scaling reduction for distortion `d_num / d_den`. The
/// contraction of any embedding is a ratio `P/Q` of a guest distance to a host
/// distance; each candidate ratio in lowest terms (with `Q <= N*n`) yields one
/// instance with host edges stretched to `P` and the guest metric scaled by
/// `Q`. The ratio 1/1, i.e. the unsubdivided non-contracting instance, comes
/// first.
pub fn gen_reduction_instances(
    g: &Graph,
    h: &Graph,
    d_num: u64,
    d_den: u64,
    budget: usize,
) -> Result<impl Iterator<Item = ReductionInstance>, EmbedError> {
    if d_den == 0 || d_num < d_den {
        return Err(EmbedError::BadDistortion { num: d_num, den: d_den });
    }
    let d = Ratio::new(d_num, d_den);
    let max_p = all_pairs_distances(g).diameter().max(1);
    let max_q = all_pairs_distances(h).diameter().max(1).min((g.n() * h.n()) as u32);
    let mut ratios = vec![(1u32, 1u32)];
    for q in 1..=max_q {
        for p in 1..=max_p {
            if (p, q) != (1, 1) && gcd(p, q) == 1 {
                ratios.push((p, q));
            }
        }
    }
    if ratios.len() > budget {
        return Err(EmbedError::ReductionBudget { needed: ratios.len(), budget });
    }
    let h = h.clone();
    Ok(ratios.into_iter().map(move |(p, q)| ReductionInstance {
        host: subdivide_red_blue(&h, p - 1),
        guest_scale: q,
        host_scale: p,
        d,
    }))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Structural precondition of the bijective red-blue variant: every host
/// path with `d + 1` edges has an internal red vertex, which for a uniform
/// subdivision holds iff `p <= d`.
pub fn bijective_reduction_gate(h_rb: &RedBlueHost, d: u32) -> bool {
    h_rb.p <= d
}
