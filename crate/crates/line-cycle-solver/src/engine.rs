//! Breadth-first search over chains of succeeding windows.

use std::collections::{HashSet, VecDeque};

use graph_core::DistanceMatrix;

use crate::window::{components, neighbors_of, pair_ok, Track};

const EMPTY: u8 = u8::MAX;

/// How the last window of a chain is accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum End {
    /// Nothing remains to the right.
    Any,
    /// Nothing remains to the right and this vertex holds the last occupied slot.
    Last(usize),
}

/// One run of the window program: a fixed anchor, the range of window
/// midpoints, and the acceptance rule at the end.
pub(crate) struct Frame<'a> {
    pub dg: &'a DistanceMatrix,
    pub nbr: &'a [u64],
    pub all: u64,
    pub d: u64,
    pub r: i64,
    pub track: Track,
    pub anchor: &'a [(usize, i64)],
    pub w: u64,
    pub lo: i64,
    pub hi: i64,
    pub end: End,
}

/// Shared state budget across runs.
pub(crate) struct Counter {
    pub used: u64,
    pub max: u64,
}

impl Counter {
    fn bump(&mut self) -> bool {
        self.used += 1;
        self.used <= self.max
    }
}

pub(crate) enum Run {
    Found(Vec<(usize, i64)>),
    Exhausted,
    Budget,
}

struct Info {
    dom: u64,
    left: u64,
    right: u64,
    l: u64,
    r: u64,
}

struct Node {
    mid: i64,
    slots: Box<[u8]>,
    parent: Option<usize>,
    r_set: u64,
}

impl Frame<'_> {
    fn fits(&self, u: usize, p: i64, placed: impl Iterator<Item = (usize, i64)>) -> bool {
        let (dg, d, t) = (self.dg, self.d, self.track);
        placed.chain(self.anchor.iter().copied()).all(|(v, q)| pair_ok(dg, d, t, u, p, v, q))
    }

    /// Feasibility conditions not already guaranteed by construction.
    fn analyze(&self, slots: &[u8]) -> Option<Info> {
        let r = self.r as usize;
        let mask = |s: &[u8]| s.iter().filter(|&&u| u != EMPTY).fold(0u64, |m, &u| m | 1 << u);
        let (left, zero, right) = (mask(&slots[..r]), mask(&slots[r..=r]), mask(&slots[r + 1..]));
        let dom = left | zero | right;
        if dom == 0 || neighbors_of(self.nbr, zero) & !dom != 0 {
            return None;
        }
        let (tl, tr) = (neighbors_of(self.nbr, left), neighbors_of(self.nbr, right));
        let (mut l, mut rr) = (0, 0);
        for c in components(self.nbr, self.all & !(self.w | dom)) {
            match (c & tl != 0, c & tr != 0) {
                (true, true) => return None,
                (true, false) => l |= c,
                (false, true) => rr |= c,
                _ => {}
            }
        }
        Some(Info { dom, left, right, l, r: rr })
    }

    fn is_source(&self, i: &Info) -> bool {
        let rest = self.all & !(self.w | i.dom);
        neighbors_of(self.nbr, i.left) & rest == 0 && i.r == rest
    }

    fn is_sink(&self, slots: &[u8], i: &Info) -> bool {
        let rest = self.all & !(self.w | i.dom);
        if neighbors_of(self.nbr, i.right) & rest != 0 || i.l != rest {
            return false;
        }
        match self.end {
            End::Any => true,
            End::Last(v) => slots.iter().rposition(|&u| u != EMPTY).is_some_and(|j| slots[j] as usize == v),
        }
    }

    fn place(&self, mid: i64, j: usize) -> i64 {
        mid - self.r + j as i64
    }

    /// Windows at `lo` that satisfy the source conditions, in slot order.
    fn sources(&self, counter: &mut Counter, out: &mut Vec<Box<[u8]>>) -> bool {
        let width = 2 * self.r as usize + 1;
        let mut slots = Vec::with_capacity(width);
        self.extend_source(&mut slots, 0, counter, out)
    }

    fn extend_source(&self, slots: &mut Vec<u8>, used: u64, counter: &mut Counter, out: &mut Vec<Box<[u8]>>) -> bool {
        let width = 2 * self.r as usize + 1;
        if slots.len() == width {
            if !counter.bump() {
                return false;
            }
            if let Some(i) = self.analyze(slots) {
                if self.is_source(&i) {
                    out.push(slots.clone().into_boxed_slice());
                }
            }
            return true;
        }
        let j = slots.len();
        let p = self.place(self.lo, j);
        slots.push(EMPTY);
        let ok = self.extend_source(slots, used, counter, out);
        slots.pop();
        if !ok {
            return false;
        }
        let free = self.all & !(self.w | used);
        for u in (0..64).filter(|&u| free >> u & 1 == 1) {
            let placed = slots
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != EMPTY)
                .map(|(k, &v)| (v as usize, self.place(self.lo, k)));
            if !self.fits(u, p, placed) {
                continue;
            }
            slots.push(u as u8);
            let ok = self.extend_source(slots, used | 1 << u, counter, out);
            slots.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    fn collect(&self, nodes: &[Node], mut at: usize) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = self.anchor.to_vec();
        loop {
            let node = &nodes[at];
            for (j, &u) in node.slots.iter().enumerate() {
                if u != EMPTY && !out.iter().any(|&(v, _)| v == u as usize) {
                    out.push((u as usize, self.place(node.mid, j)));
                }
            }
            match node.parent {
                Some(p) => at = p,
                None => return out,
            }
        }
    }

    pub fn run(&self, counter: &mut Counter) -> Run {
        if self.lo > self.hi {
            return Run::Exhausted;
        }
        let mut starts = Vec::new();
        if !self.sources(counter, &mut starts) {
            return Run::Budget;
        }
        let mut nodes: Vec<Node> = Vec::new();
        let mut seen: HashSet<(i64, Box<[u8]>)> = HashSet::new();
        let mut queue = VecDeque::new();
        for s in starts {
            let info = self.analyze(&s).expect("source is feasible");
            if self.is_sink(&s, &info) {
                nodes.push(Node { mid: self.lo, slots: s, parent: None, r_set: info.r });
                return Run::Found(self.collect(&nodes, nodes.len() - 1));
            }
            seen.insert((self.lo, s.clone()));
            nodes.push(Node { mid: self.lo, slots: s, parent: None, r_set: info.r });
            queue.push_back(nodes.len() - 1);
        }
        let width = 2 * self.r as usize + 1;
        while let Some(at) = queue.pop_front() {
            let (mid, r_set) = (nodes[at].mid, nodes[at].r_set);
            if mid >= self.hi {
                continue;
            }
            let next_mid = mid + 1;
            let mut base: Vec<u8> = nodes[at].slots[1..].to_vec();
            let leaving = nodes[at].slots[0];
            let p = self.place(next_mid, width - 1);
            let candidates = std::iter::once(EMPTY).chain((0..64u8).filter(|&u| r_set >> u & 1 == 1));
            for u in candidates {
                if u != EMPTY {
                    let placed = base
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v != EMPTY)
                        .map(|(k, &v)| (v as usize, self.place(next_mid, k)));
                    if !self.fits(u as usize, p, placed) {
                        continue;
                    }
                }
                base.push(u);
                let key = (next_mid, base.clone().into_boxed_slice());
                base.pop();
                if seen.contains(&key) {
                    continue;
                }
                if !counter.bump() {
                    return Run::Budget;
                }
                seen.insert(key.clone());
                let Some(info) = self.analyze(&key.1) else { continue };
                if leaving != EMPTY && info.l >> leaving & 1 == 0 {
                    continue;
                }
                let sink = self.is_sink(&key.1, &info);
                nodes.push(Node { mid: next_mid, slots: key.1, parent: Some(at), r_set: info.r });
                if sink {
                    return Run::Found(self.collect(&nodes, nodes.len() - 1));
                }
                queue.push_back(nodes.len() - 1);
            }
        }
        Run::Exhausted
    }
}
