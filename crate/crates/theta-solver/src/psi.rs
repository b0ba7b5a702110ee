use std::collections::BTreeMap;

use graph_core::{DistanceMatrix, Graph};

use crate::host::{Balls, ThetaHost};

/// Anchor map: the guest vertices placed in `B_s' ∪ B_t'` and their images.
pub type Psi = BTreeMap<usize, usize>;

const UNSET: usize = usize::MAX;
const OUT: usize = usize::MAX - 1;

struct Search<'a> {
    g: &'a Graph,
    dg: &'a DistanceMatrix,
    dh: &'a DistanceMatrix,
    d: u64,
    order: Vec<usize>,
    zone: Vec<usize>,
    n_far: usize,
    /// Host distance from each vertex to the nearest vertex outside the balls.
    to_far: Vec<u64>,
    in_small: Vec<bool>,
}

/// All anchor maps `Ψ`: non-contracting distortion-`d` maps of a guest
/// subset `U'` into `B_s' ∪ B_t'` such that the rest of the guest can still
/// sit outside both balls (each remaining vertex has degree at most `2d` and
/// is within reach of its placed neighbours), and at least one vertex lands
/// in `B_s ∪ B_t`.
///
/// The last condition loses nothing: an embedding that avoids both small
/// balls lies inside one arm and can be slid towards `s` without changing
/// any host distance. Pairwise non-contraction already confines the preimage
/// of each large ball to a guest ball of radius `4d^2`, so no explicit
/// centre guessing is needed. Maps are produced in lexicographic order of
/// the guest vertices' images along a breadth-first guest order.
pub fn enumerate_psi(g: &Graph, dg: &DistanceMatrix, host: &ThetaHost, balls: &Balls, d: u32) -> Vec<Psi> {
    let n = g.n();
    let dh = host.dist();
    let far = balls.far();
    let to_far = (0..dh.n()).map(|v| far.iter().map(|&x| dh.get(v, x) as u64).min().unwrap_or(u64::MAX)).collect();
    let in_small = (0..dh.n()).map(|v| balls.in_s[v] || balls.in_t[v]).collect();
    let s =
        Search { g, dg, dh, d: d as u64, order: bfs_order(g), zone: balls.zone(), n_far: far.len(), to_far, in_small };
    let mut out = Vec::new();
    let mut img = vec![UNSET; n];
    let mut used = vec![false; dh.n()];
    s.extend(0, &mut img, &mut used, 0, &mut out);
    out
}

fn bfs_order(g: &Graph) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    for root in 0..g.n() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        order.push(root);
        let mut i = order.len() - 1;
        while i < order.len() {
            for &w in g.neighbors(order[i]) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    order
}

impl Search<'_> {
    fn fits(&self, u: usize, h: usize, img: &[usize]) -> bool {
        self.order.iter().map(|&w| (w, img[w])).filter(|&(_, x)| x != UNSET).all(|(w, x)| {
            let dg = self.dg.get(u, w) as u64;
            if x == OUT {
                self.to_far[h] <= self.d * dg
            } else {
                let dh = self.dh.get(h, x) as u64;
                dg <= dh && dh <= self.d * dg
            }
        })
    }

    fn fits_out(&self, u: usize, img: &[usize], n_out: usize) -> bool {
        n_out < self.n_far
            && self.g.degree(u) as u64 <= 2 * self.d
            && img
                .iter()
                .enumerate()
                .all(|(w, &x)| x == UNSET || x == OUT || self.to_far[x] <= self.d * self.dg.get(u, w) as u64)
    }

    fn extend(&self, i: usize, img: &mut Vec<usize>, used: &mut Vec<bool>, n_out: usize, out: &mut Vec<Psi>) {
        if i == self.order.len() {
            if img.iter().any(|&x| x != OUT && self.in_small[x]) {
                out.push(img.iter().enumerate().filter(|&(_, &x)| x != OUT).map(|(u, &x)| (u, x)).collect());
            }
            return;
        }
        let u = self.order[i];
        for &h in &self.zone {
            if !used[h] && self.fits(u, h, img) {
                img[u] = h;
                used[h] = true;
                self.extend(i + 1, img, used, n_out, out);
                used[h] = false;
                img[u] = UNSET;
            }
        }
        if self.fits_out(u, img, n_out) {
            img[u] = OUT;
            self.extend(i + 1, img, used, n_out + 1, out);
            img[u] = UNSET;
        }
    }
}
