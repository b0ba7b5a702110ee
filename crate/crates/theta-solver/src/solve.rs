use std::collections::BTreeMap;

use embed_core::{union_embedding, verify_nc_distortion, Embedding, Outcome, SolveError};
use graph_core::{DistanceMatrix, Graph};
use oracle::OracleResult;
use rayon::prelude::*;

use crate::arm::{
    full_component_embedding, last_vertex_candidates, short_arm_guesses, shortest_component_embedding, ArmMap,
};
use crate::config::{classify_components, enumerate_configurations, ArmPlan, Component, Form, Role};
use crate::host::{Balls, ThetaHost};
use crate::psi::{enumerate_psi, Psi};
use crate::Options;

/// Guest vertex to host vertex.
type Part = BTreeMap<usize, usize>;

struct Instance<'a> {
    g: &'a Graph,
    dg: &'a DistanceMatrix,
    host: &'a ThetaHost,
    balls: Balls,
    d: u32,
    opts: &'a Options,
}

/// Decides whether `g` has a non-contracting distortion-`d` embedding into
/// the theta graph `host`, returning a verified witness.
pub fn embed_into_theta(
    g: &Graph,
    dg: &DistanceMatrix,
    host: &ThetaHost,
    d: u32,
) -> Result<Option<Embedding>, SolveError> {
    embed_into_theta_with(g, dg, host, d, &Options::default()).map(|o| o.embedding)
}

/// [`embed_into_theta`] with explicit limits. The work counter is the number
/// of anchor maps examined, or oracle nodes on the short-host fallback.
pub fn embed_into_theta_with(
    g: &Graph,
    dg: &DistanceMatrix,
    host: &ThetaHost,
    d: u32,
    opts: &Options,
) -> Result<Outcome, SolveError> {
    check_guest(g, dg, d)?;
    let out = decide(g, dg, host, d, opts)?;
    if opts.cross_check_cycle && host.k() == 2 {
        cross_check(g, dg, host, d, &out)?;
    }
    Ok(out)
}

fn check_guest(g: &Graph, dg: &DistanceMatrix, d: u32) -> Result<(), SolveError> {
    if g.n() == 0 || g.n() > 64 {
        return Err(SolveError::Input(format!("guest must have 1..=64 vertices, got {}", g.n())));
    }
    if dg.n() != g.n() {
        return Err(SolveError::Input("distance matrix does not match the guest".into()));
    }
    if !g.is_connected() {
        return Err(SolveError::Input("guest is disconnected".into()));
    }
    if g.is_weighted() {
        return Err(SolveError::Input("theta solver takes unweighted guests".into()));
    }
    if d == 0 {
        return Err(SolveError::Input("distortion must be at least 1".into()));
    }
    Ok(())
}

/// Largest guest degree any embedding can support: `(k+1)d`, or more when
/// the arms are so short that a `d`-ball holds more host vertices.
fn degree_bound(host: &ThetaHost, d: u32) -> usize {
    let dh = host.dist();
    let ball = (0..dh.n()).map(|v| (0..dh.n()).filter(|&x| dh.get(v, x) <= d).count()).max().unwrap_or(1);
    ((host.k() + 1) * d as usize).max(ball - 1)
}

fn decide(g: &Graph, dg: &DistanceMatrix, host: &ThetaHost, d: u32, opts: &Options) -> Result<Outcome, SolveError> {
    let h = host.graph();
    if g.n() > h.n() || g.max_degree() > degree_bound(host, d) {
        return Ok(Outcome::infeasible(0));
    }
    let balls = host.balls(d);
    if balls.overlapping() {
        let stats = oracle::search(&oracle::Problem::new(dg, host.dist(), d), opts.oracle_budget);
        return match stats.result {
            OracleResult::Found(f) => Ok(Outcome::found(verified(g, dg, host, d, f)?, stats.nodes)),
            OracleResult::Infeasible => Ok(Outcome::infeasible(stats.nodes)),
            OracleResult::BudgetExceeded => Err(SolveError::BudgetExceeded),
        };
    }
    let psis = enumerate_psi(g, dg, host, &balls, d);
    let inst = Instance { g, dg, host, balls, d, opts };
    let found = psis.par_iter().find_map_first(|psi| match inst.solve(psi) {
        Ok(None) => None,
        other => Some(other),
    });
    let nodes = psis.len() as u64;
    match found {
        Some(Ok(Some(f))) => Ok(Outcome::found(f, nodes)),
        Some(Err(e)) => Err(e),
        _ => Ok(Outcome::infeasible(nodes)),
    }
}

fn verified(g: &Graph, dg: &DistanceMatrix, host: &ThetaHost, d: u32, f: Embedding) -> Result<Embedding, SolveError> {
    match verify_nc_distortion(g, host.graph(), dg, host.dist(), &f, d) {
        Ok(v) if v.is_ok() => Ok(f),
        Ok(v) => Err(SolveError::Unverified(format!("{v:?}"))),
        Err(e) => Err(SolveError::Unverified(e.to_string())),
    }
}

/// Compares the verdict with the cycle solver: a two-arm theta graph is the
/// cycle `s, arm 0, t, arm 1 reversed`.
fn cross_check(g: &Graph, dg: &DistanceMatrix, host: &ThetaHost, d: u32, out: &Outcome) -> Result<(), SolveError> {
    let n = host.graph().n();
    let cyc = line_cycle_solver::embed_into_cycle(g, dg, n, d)?;
    if cyc.is_some() != out.embedding.is_some() {
        return Err(SolveError::Unverified(format!(
            "theta verdict {} disagrees with the cycle solver",
            out.embedding.is_some()
        )));
    }
    Ok(())
}

impl Instance<'_> {
    fn solve(&self, psi: &Psi) -> Result<Option<Embedding>, SolveError> {
        let Some(comps) = classify_components(self.g, self.host, &self.balls, psi) else {
            return Ok(None);
        };
        // Away from both small balls a vertex sees one arm on each side.
        let small = |x: &usize| psi.get(x).is_some_and(|&h| self.balls.in_s[h] || self.balls.in_t[h]);
        if (0..self.g.n()).any(|x| !small(&x) && self.g.degree(x) > 2 * self.d as usize) {
            return Ok(None);
        }
        for cfg in enumerate_configurations(&comps, self.host.k()) {
            let mut per_arm = Vec::with_capacity(cfg.plans.len());
            for (i, plan) in cfg.plans.iter().enumerate() {
                let cands = self.arm_candidates(psi, &comps, i, plan)?;
                if cands.is_empty() {
                    break;
                }
                per_arm.push(cands);
            }
            if per_arm.len() < cfg.plans.len() {
                continue;
            }
            if let Some(f) = self.assemble(psi, &per_arm) {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    /// Tries every combination of per-arm placements; the first one that is
    /// injective and passes full verification wins.
    fn assemble(&self, psi: &Psi, per_arm: &[Vec<Part>]) -> Option<Embedding> {
        let mut pick = vec![0usize; per_arm.len()];
        loop {
            let mut parts = vec![psi.clone()];
            parts.extend(pick.iter().zip(per_arm).map(|(&j, c)| c[j].clone()));
            if let Ok(f) = union_embedding(self.g.n(), &parts) {
                if f.is_total() && f.injectivity_violation().is_none() {
                    if let Ok(v) =
                        verify_nc_distortion(self.g, self.host.graph(), self.dg, self.host.dist(), &f, self.d)
                    {
                        if v.is_ok() {
                            return Some(f);
                        }
                    }
                }
            }
            let mut i = 0;
            while i < pick.len() && pick[i] + 1 == per_arm[i].len() {
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                return None;
            }
            pick[i] += 1;
        }
    }

    /// Anchored vertices on arm `i` inside `ball`, by arm position.
    fn side(&self, psi: &Psi, i: usize, ball: &[bool]) -> ArmMap {
        psi.iter()
            .filter(|&(_, &h)| ball[h])
            .filter_map(|(&x, &h)| self.host.position_on(i, h).map(|p| (x, p)))
            .collect()
    }

    fn residual(psi: &Psi, comp: &Component) -> u64 {
        psi.keys().fold(comp.vertices, |m, &x| m & !(1 << x))
    }

    /// Placements of the residual vertices assigned to arm `i`.
    fn arm_candidates(
        &self,
        psi: &Psi,
        comps: &[Component],
        i: usize,
        plan: &ArmPlan,
    ) -> Result<Vec<Part>, SolveError> {
        if plan.form == Form::Empty {
            return Ok(vec![Part::new()]);
        }
        let trunc = &self.balls.arms[i];
        if trunc.short {
            let free = plan.components.iter().fold(0, |m, &c| m | Self::residual(psi, &comps[c]));
            return Ok(short_arm_guesses(self.dg, self.host.dist(), free, &trunc.far, psi, self.d));
        }
        let len = self.host.lengths()[i];
        let arm = self.host.arm(i);
        let lengths = self.host.lengths();
        let around = (0..lengths.len()).filter(|&j| j != i).map(|j| lengths[j]).min().expect("two arms");
        let s_side = self.side(psi, i, &self.balls.in_s2);
        let t_side = self.side(psi, i, &self.balls.in_t2);
        let lines = &self.opts.line;
        let to_host = |comp: &Component, m: ArmMap, flip: bool| -> Part {
            let res = Self::residual(psi, comp);
            m.into_iter()
                .filter(|&(x, _)| res >> x & 1 == 1)
                .map(|(x, p)| (x, arm[if flip { len - p } else { p }]))
                .collect()
        };
        if plan.form == Form::Full {
            let comp = &comps[plan.components[0]];
            let m = full_component_embedding(self.dg, comp.vertices, &s_side, &t_side, len, around, self.d, lines)?;
            return Ok(m.map(|m| vec![to_host(comp, m, false)]).unwrap_or_default());
        }
        let mut lists: Vec<Vec<Part>> = Vec::new();
        for &c in &plan.components {
            let comp = &comps[c];
            let flip = comp.role == Role::T;
            let fixed: ArmMap = match flip {
                false => s_side.clone(),
                true => t_side.iter().map(|(&x, &p)| (x, len - p)).collect(),
            };
            let Some((&a, _)) = fixed.iter().min_by_key(|&(&x, &p)| (p, x)) else {
                return Ok(Vec::new());
            };
            let lasts = last_vertex_candidates(comp.vertices, a, self.dg, self.d) & Self::residual(psi, comp);
            let mut list: Vec<Part> = Vec::new();
            for last in (0..64).filter(|&x| lasts >> x & 1 == 1) {
                if let Some(m) =
                    shortest_component_embedding(self.dg, comp.vertices, &fixed, len, around, last, self.d, lines)?
                {
                    let part = to_host(comp, m, flip);
                    if !list.contains(&part) {
                        list.push(part);
                    }
                }
            }
            lists.push(list);
        }
        Ok(match lists.as_slice() {
            [one] => one.clone(),
            [a, b] => a
                .iter()
                .flat_map(|x| b.iter().map(move |y| (x, y)))
                .filter(|(x, y)| x.values().all(|h| !y.values().any(|k| k == h)))
                .map(|(x, y)| x.iter().chain(y).map(|(&u, &h)| (u, h)).collect())
                .collect(),
            _ => Vec::new(),
        })
    }
}
