//! The scaling reduction run end to end: general distortion, contraction
//! allowed, decided through red-blue instances.

use embed_core::{
    bijective_reduction_gate, distortion_report, gen_reduction_instances, Embedding, Ratio, ReductionInstance,
    DEFAULT_REDUCTION_BUDGET,
};
use oracle::{search, OracleResult, Problem};
use treewidth_solver::{bijective_embed_tw_with, make_nice, tree_decomposition};

use crate::dispatch::{Limits, SolverKind};
use crate::input::{Guest, Host};
use crate::CliError;

/// Outcome of the pipeline: the witness (a map into the original host), the
/// number of red-blue instances examined and the summed work counters.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub embedding: Option<Embedding>,
    pub instances: usize,
    pub nodes: u64,
}

/// Solves one red-blue instance. Red vertices keep their original ids, so a
/// witness is directly a map into the unsubdivided host.
pub fn solve_instance(
    guest: &Guest,
    inst: &ReductionInstance,
    bijective: bool,
    solver: SolverKind,
    limits: &Limits,
) -> Result<(Option<Embedding>, u64), CliError> {
    let dg = inst.guest_distances(&guest.dist);
    let dh = inst.host_distances();
    let red = inst.host.red_vertices();
    let use_tw = match solver {
        SolverKind::Auto => bijective && inst.integer_d().is_some(),
        SolverKind::Tw => true,
        SolverKind::Oracle => false,
        k => return Err(CliError::Input(format!("solver `{k}` cannot run red-blue instances (use tw or oracle)"))),
    };
    if use_tw {
        let d = inst.integer_d().ok_or_else(|| CliError::Input("the tw solver needs an integer distortion".into()))?;
        if !bijective {
            return Err(CliError::Input("the tw solver is bijective only".into()));
        }
        let h = &inst.host.graph;
        let ntd = make_nice(&tree_decomposition(h), h).map_err(|e| CliError::Input(e.to_string()))?;
        let mut opts = treewidth_solver::Options::default();
        if let Some(m) = limits.max_states {
            opts.max_states = m;
        }
        let out = bijective_embed_tw_with(&guest.graph, &dg, h, &dh, &ntd, d, Some(&red), &opts)?;
        return Ok((out.embedding, out.nodes));
    }
    let p = Problem { d: inst.d, bijective, codomain: Some(&red), ..Problem::new(&dg, &dh, 1) };
    let stats = search(&p, limits.oracle);
    match stats.result {
        OracleResult::Found(f) => Ok((Some(f), stats.nodes)),
        OracleResult::Infeasible => Ok((None, stats.nodes)),
        OracleResult::BudgetExceeded => Err(CliError::Budget),
    }
}

/// Decides whether some injection (a bijection when `bijective`) of the
/// guest into the host has distortion at most `d`, contraction allowed.
/// Bijective runs only try integer contractions with at most `d`
/// subdivisions per edge, since a bijection's contraction is realised on a
/// host edge.
pub fn run_pipeline(
    guest: &Guest,
    host: &Host,
    d: Ratio<u64>,
    bijective: bool,
    solver: SolverKind,
    limits: &Limits,
) -> Result<PipelineOutcome, CliError> {
    if bijective && guest.graph.n() != host.n() {
        return Ok(PipelineOutcome { embedding: None, instances: 0, nodes: 0 });
    }
    let floor_d = (d.numer() / d.denom()) as u32;
    let instances =
        gen_reduction_instances(&guest.graph, &host.graph, *d.numer(), *d.denom(), DEFAULT_REDUCTION_BUDGET)
            .map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = PipelineOutcome { embedding: None, instances: 0, nodes: 0 };
    for inst in instances {
        if bijective && (inst.guest_scale != 1 || !bijective_reduction_gate(&inst.host, floor_d)) {
            continue;
        }
        out.instances += 1;
        let (f, nodes) = solve_instance(guest, &inst, bijective, solver, limits)?;
        out.nodes += nodes;
        if let Some(f) = f {
            let report = distortion_report(&guest.graph, &host.graph, &guest.dist, &host.dist, &f)
                .map_err(|e| CliError::Unverified(e.to_string()))?;
            if report.distortion > d {
                return Err(CliError::Unverified(format!("pipeline witness has distortion {}", report.distortion)));
            }
            out.embedding = Some(f);
            return Ok(out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use graph_core::corpus::{cycle_graph, path_graph};
    use oracle::exists_general_distortion;

    use super::*;

    #[test]
    fn contraction_is_allowed() {
        // P3 into K3: any map contracts the end pair, but distortion 2 is
        // reachable. The non-contracting problem has no solution at all.
        let g = Guest::new(path_graph(3));
        let k3 = Host::parse("cycle:3").unwrap();
        let lim = Limits::default();
        for (d, want) in [(Ratio::new(3, 2), false), (Ratio::from_integer(2), true)] {
            let out = run_pipeline(&g, &k3, d, false, SolverKind::Auto, &lim).unwrap();
            assert_eq!(out.embedding.is_some(), want, "d={d}");
            assert_eq!(want, exists_general_distortion(&g.dist, &k3.dist, d));
        }
    }

    #[test]
    fn bijective_runs_use_the_tw_solver() {
        let g = Guest::new(cycle_graph(6));
        let h = Host::parse("cycle:6").unwrap();
        let lim = Limits::default();
        let tw = run_pipeline(&g, &h, Ratio::from_integer(1), true, SolverKind::Auto, &lim).unwrap();
        let or = run_pipeline(&g, &h, Ratio::from_integer(1), true, SolverKind::Oracle, &lim).unwrap();
        assert!(tw.embedding.is_some() && or.embedding.is_some());
        let p6 = Guest::new(path_graph(6));
        for d in 1..=5 {
            let d = Ratio::from_integer(d);
            let tw = run_pipeline(&p6, &h, d, true, SolverKind::Tw, &lim).unwrap();
            let or = run_pipeline(&p6, &h, d, true, SolverKind::Oracle, &lim).unwrap();
            assert_eq!(tw.embedding.is_some(), or.embedding.is_some(), "d={d}");
        }
    }
}
