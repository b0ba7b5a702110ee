//! Exhaustive backtracking search for non-contracting embeddings, used as
//! ground truth for the dynamic programs.

use std::time::{Duration, Instant};

use embed_core::{Embedding, Ratio};
use graph_core::{DistanceMatrix, Graph};

/// Limits on an oracle run.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl SearchBudget {
    pub fn new(max_nodes: u64, max_time: Duration) -> Self {
        assert!(max_nodes > 0 && !max_time.is_zero(), "budget must be positive");
        SearchBudget { max_nodes, max_time }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 50_000_000, max_time: Duration::from_secs(60) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    Found(Embedding),
    Infeasible,
    BudgetExceeded,
}

impl OracleResult {
    pub fn is_found(&self) -> bool {
        matches!(self, OracleResult::Found(_))
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            OracleResult::Found(f) => Some(f),
            _ => None,
        }
    }
}

/// A fully specified search. Guest vertex `u` may only take host vertices in
/// `allowed[u]` (all of them when `None`), intersected with `codomain`.
#[derive(Clone, Debug)]
pub struct Problem<'a> {
    pub dg: &'a DistanceMatrix,
    pub dh: &'a DistanceMatrix,
    /// Expansion bound as a ratio.
    pub d: Ratio<u64>,
    pub bijective: bool,
    pub codomain: Option<&'a [usize]>,
    pub allowed: Option<Vec<Vec<usize>>>,
}

impl<'a> Problem<'a> {
    pub fn new(dg: &'a DistanceMatrix, dh: &'a DistanceMatrix, d: u32) -> Self {
        Problem { dg, dh, d: Ratio::from_integer(d as u64), bijective: false, codomain: None, allowed: None }
    }
}

/// Outcome plus the number of assignments tried.
#[derive(Clone, Debug)]
pub struct SearchStats {
    pub result: OracleResult,
    pub nodes: u64,
}

type Bits = Vec<u64>;

fn bits_with(len: usize, members: impl IntoIterator<Item = usize>) -> Bits {
    let mut b = vec![0u64; len.div_ceil(64)];
    for x in members {
        b[x / 64] |= 1 << (x % 64);
    }
    b
}

fn count(b: &Bits) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

fn members(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + t)
        })
    })
}

struct Search<'p, 'a> {
    p: &'p Problem<'a>,
    budget: SearchBudget,
    start: Instant,
    nodes: u64,
    out_of_budget: bool,
    image: Vec<Option<usize>>,
}

impl Search<'_, '_> {
    fn compatible(&self, u: usize, x: usize, v: usize, y: usize) -> bool {
        if x == y {
            return false;
        }
        let a = self.p.dg.get(u, v) as u64;
        let b = self.p.dh.get(x, y);
        if b == DistanceMatrix::INF {
            return false;
        }
        let b = b as u64;
        b >= a && b * self.p.d.denom() <= a * self.p.d.numer()
    }

    fn run(&mut self, cands: &[Bits]) -> bool {
        let n = self.image.len();
        // Most constrained unassigned guest vertex, lowest id on ties.
        let Some(u) = (0..n).filter(|&u| self.image[u].is_none()).min_by_key(|&u| (count(&cands[u]), u)) else {
            return true;
        };
        let options: Vec<usize> = members(&cands[u]).collect();
        for x in options {
            self.nodes += 1;
            if self.nodes > self.budget.max_nodes
                || (self.nodes.is_multiple_of(1024) && self.start.elapsed() > self.budget.max_time)
            {
                self.out_of_budget = true;
                return false;
            }
            let mut next = cands.to_vec();
            let mut dead = false;
            for v in 0..n {
                if v == u || self.image[v].is_some() {
                    continue;
                }
                let keep: Vec<usize> = members(&cands[v]).filter(|&y| self.compatible(u, x, v, y)).collect();
                if keep.is_empty() {
                    dead = true;
                    break;
                }
                next[v] = bits_with(self.p.dh.n(), keep);
            }
            if dead {
                continue;
            }
            self.image[u] = Some(x);
            if self.run(&next) {
                return true;
            }
            self.image[u] = None;
            if self.out_of_budget {
                return false;
            }
        }
        false
    }
}

/// Runs the search described by `p`.
pub fn search(p: &Problem, budget: SearchBudget) -> SearchStats {
    let n = p.dg.n();
    let nh = p.dh.n();
    let base: Vec<usize> = match p.codomain {
        Some(c) => c.to_vec(),
        None => (0..nh).collect(),
    };
    if p.bijective && base.len() != n {
        return SearchStats { result: OracleResult::Infeasible, nodes: 0 };
    }
    if n > base.len() {
        return SearchStats { result: OracleResult::Infeasible, nodes: 0 };
    }
    let cands: Vec<Bits> = (0..n)
        .map(|u| {
            let allowed = p.allowed.as_ref().map(|a| &a[u]);
            bits_with(nh, base.iter().copied().filter(|x| allowed.is_none_or(|a| a.contains(x))))
        })
        .collect();
    if cands.iter().any(|c| count(c) == 0) {
        return SearchStats { result: OracleResult::Infeasible, nodes: 0 };
    }
    let mut s = Search { p, budget, start: Instant::now(), nodes: 0, out_of_budget: false, image: vec![None; n] };
    let found = s.run(&cands);
    let result = if found {
        OracleResult::Found(Embedding::from_images(&s.image.iter().map(|x| x.unwrap()).collect::<Vec<_>>()))
    } else if s.out_of_budget {
        OracleResult::BudgetExceeded
    } else {
        OracleResult::Infeasible
    };
    SearchStats { result, nodes: s.nodes }
}

/// Decides whether `g` has a non-contracting distortion-`d` embedding into
/// `h` (onto `codomain` when `bijective`), returning a witness.
#[allow(clippy::too_many_arguments)]
pub fn brute_force_embed(
    _g: &Graph,
    dg: &DistanceMatrix,
    _h: &Graph,
    dh: &DistanceMatrix,
    d: u32,
    bijective: bool,
    codomain: Option<&[usize]>,
    budget: SearchBudget,
) -> OracleResult {
    let p = Problem { bijective, codomain, ..Problem::new(dg, dh, d) };
    search(&p, budget).result
}

/// Least integer `d <= d_max` admitting a non-contracting distortion-`d`
/// embedding, `Ok(None)` if there is none, `Err(())` if the budget ran out.
pub fn min_distortion_integer(
    g: &Graph,
    dg: &DistanceMatrix,
    h: &Graph,
    dh: &DistanceMatrix,
    d_max: u32,
    budget: SearchBudget,
) -> Result<Option<u32>, BudgetExceeded> {
    assert!(d_max >= 1);
    for d in 1..=d_max {
        match brute_force_embed(g, dg, h, dh, d, false, None, budget) {
            OracleResult::Found(_) => return Ok(Some(d)),
            OracleResult::Infeasible => {}
            OracleResult::BudgetExceeded => return Err(BudgetExceeded),
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Whether some injection of `g` into `h` has distortion (expansion times
/// contraction) at most `d`, contraction allowed. Exhaustive over injections
/// with pruning on the running product; desk-scale only.
pub fn exists_general_distortion(dg: &DistanceMatrix, dh: &DistanceMatrix, d: Ratio<u64>) -> bool {
    let n = dg.n();
    let nh = dh.n();
    if n > nh {
        return false;
    }
    if n <= 1 {
        return true;
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
        e: Ratio<u64>,
        c: Ratio<u64>,
        dg: &DistanceMatrix,
        dh: &DistanceMatrix,
        d: Ratio<u64>,
    ) -> bool {
        if i == dg.n() {
            return true;
        }
        for x in 0..dh.n() {
            if used[x] {
                continue;
            }
            let (mut e2, mut c2) = (e, c);
            for (j, &y) in img.iter().enumerate() {
                let a = dg.get(i, j) as u64;
                let b = dh.get(x, y) as u64;
                e2 = e2.max(Ratio::new(b, a));
                c2 = c2.max(Ratio::new(a, b));
            }
            if e2 * c2 > d {
                continue;
            }
            used[x] = true;
            img.push(x);
            if rec(i + 1, img, used, e2, c2, dg, dh, d) {
                return true;
            }
            img.pop();
            used[x] = false;
        }
        false
    }
    // Products of partial maxima only grow, so pruning on them is exact.
    let zero = Ratio::from_integer(0);
    rec(0, &mut Vec::new(), &mut vec![false; nh], zero, zero, dg, dh, d)
}
