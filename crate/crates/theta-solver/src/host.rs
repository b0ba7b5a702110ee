use graph_core::{all_pairs_distances, generate, theta_arms, DistanceMatrix, Graph, GraphError, HostSpec};

/// A generalized theta graph: `k` internally disjoint paths between the
/// terminals `s = 0` and `t = 1`.
#[derive(Clone, Debug)]
pub struct ThetaHost {
    lengths: Vec<usize>,
    graph: Graph,
    dist: DistanceMatrix,
    arms: Vec<Vec<usize>>,
    /// Arm and position of every host vertex other than `s` and `t`.
    place: Vec<Option<(usize, usize)>>,
}

impl ThetaHost {
    pub fn new(lengths: &[usize]) -> Result<Self, GraphError> {
        let graph = generate(&HostSpec::Theta(lengths.to_vec()))?;
        let arms = theta_arms(lengths);
        let mut place = vec![None; graph.n()];
        for (i, arm) in arms.iter().enumerate() {
            for (p, &v) in arm.iter().enumerate().take(arm.len() - 1).skip(1) {
                place[v] = Some((i, p));
            }
        }
        let dist = all_pairs_distances(&graph);
        Ok(ThetaHost { lengths: lengths.to_vec(), graph, dist, arms, place })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dist(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Number of arms.
    pub fn k(&self) -> usize {
        self.arms.len()
    }

    /// Vertex sequence of arm `i`, from `s` to `t`.
    pub fn arm(&self, i: usize) -> &[usize] {
        &self.arms[i]
    }

    pub fn s(&self) -> usize {
        0
    }

    pub fn t(&self) -> usize {
        1
    }

    /// Arm and position of `v`, `None` for the terminals.
    pub fn locate(&self, v: usize) -> Option<(usize, usize)> {
        self.place[v]
    }

    /// Whether `v` lies on arm `i` (the terminals lie on every arm), and at
    /// which position.
    pub fn position_on(&self, i: usize, v: usize) -> Option<usize> {
        match v {
            0 => Some(0),
            1 => Some(self.lengths[i]),
            _ => self.place[v].filter(|&(a, _)| a == i).map(|(_, p)| p),
        }
    }

    /// Balls around the terminals and the arm truncations for distortion `d`.
    pub fn balls(&self, d: u32) -> Balls {
        let n = self.graph.n();
        let (r, r2) = (d, 2 * d * d);
        let within = |c: usize, r: u32| -> Vec<bool> { (0..n).map(|v| self.dist.get(c, v) <= r).collect() };
        let in_s = within(0, r);
        let in_t = within(1, r);
        let in_s2 = within(0, r2);
        let in_t2 = within(1, r2);
        let arms = self
            .arms
            .iter()
            .enumerate()
            .map(|(i, arm)| {
                let inner: Vec<usize> = arm.iter().copied().filter(|&v| !in_s[v] && !in_t[v]).collect();
                let far: Vec<usize> = arm.iter().copied().filter(|&v| !in_s2[v] && !in_t2[v]).collect();
                let short = (self.lengths[i] as u64) < 4 * (d as u64).pow(2) + 2 * d as u64;
                ArmTruncation { s_end: far.first().copied(), t_end: far.last().copied(), inner, far, short }
            })
            .collect();
        Balls { d, in_s, in_t, in_s2, in_t2, arms }
    }
}

/// `B_s`, `B_t` (radius `d`) and `B_s'`, `B_t'` (radius `2d^2`) as
/// membership tables, with the per-arm truncations.
#[derive(Clone, Debug)]
pub struct Balls {
    pub d: u32,
    pub in_s: Vec<bool>,
    pub in_t: Vec<bool>,
    pub in_s2: Vec<bool>,
    pub in_t2: Vec<bool>,
    pub arms: Vec<ArmTruncation>,
}

impl Balls {
    fn members(mask: &[bool]) -> Vec<usize> {
        (0..mask.len()).filter(|&v| mask[v]).collect()
    }

    pub fn b_s(&self) -> Vec<usize> {
        Self::members(&self.in_s)
    }

    pub fn b_t(&self) -> Vec<usize> {
        Self::members(&self.in_t)
    }

    pub fn b_s2(&self) -> Vec<usize> {
        Self::members(&self.in_s2)
    }

    pub fn b_t2(&self) -> Vec<usize> {
        Self::members(&self.in_t2)
    }

    /// Host vertices in `B_s' ∪ B_t'`.
    pub fn zone(&self) -> Vec<usize> {
        (0..self.in_s2.len()).filter(|&v| self.in_s2[v] || self.in_t2[v]).collect()
    }

    /// Host vertices outside both large balls.
    pub fn far(&self) -> Vec<usize> {
        (0..self.in_s2.len()).filter(|&v| !self.in_s2[v] && !self.in_t2[v]).collect()
    }

    /// `B_s' ∩ B_t' ≠ ∅`: the host is too short for the arm decomposition.
    pub fn overlapping(&self) -> bool {
        self.in_s2.iter().zip(&self.in_t2).any(|(a, b)| *a && *b)
    }
}

/// `P_i' = P_i ∖ (B_s ∪ B_t)` and `P_i'' = P_i ∖ (B_s' ∪ B_t')` in arm order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArmTruncation {
    pub inner: Vec<usize>,
    pub far: Vec<usize>,
    /// End of `P_i''` next to `B_s'`.
    pub s_end: Option<usize>,
    /// End of `P_i''` next to `B_t'`.
    pub t_end: Option<usize>,
    /// Shorter than `4d^2 + 2d`: residual vertices on it are guessed.
    pub short: bool,
}
