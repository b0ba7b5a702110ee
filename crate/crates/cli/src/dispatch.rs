//! Choosing a solver for an instance and running it.

use std::fmt;
use std::str::FromStr;

use ctw_solver::connectify;
use embed_core::{verify_nc_distortion, Embedding, Outcome, SolveError};
use oracle::{search, OracleResult, Problem, SearchBudget};
use treewidth_solver::{make_nice, tree_decomposition, NiceTreeDecomposition};

use crate::input::{Guest, Host, HostKind};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Auto,
    Cycle,
    Line,
    Tw,
    Ctw,
    Theta,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::Auto,
        SolverKind::Cycle,
        SolverKind::Line,
        SolverKind::Tw,
        SolverKind::Ctw,
        SolverKind::Theta,
        SolverKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Auto => "auto",
            SolverKind::Cycle => "cycle",
            SolverKind::Line => "line",
            SolverKind::Tw => "tw",
            SolverKind::Ctw => "ctw",
            SolverKind::Theta => "theta",
            SolverKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown solver `{s}` (auto|cycle|line|tw|ctw|theta|oracle)"))
    }
}

/// Work limits handed to the solvers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    /// Cap on dynamic-programming states; each solver's default when `None`.
    pub max_states: Option<u64>,
    pub oracle: SearchBudget,
}

/// A decided instance: the witness if feasible, the solver that ran and
/// its work counter.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub embedding: Option<Embedding>,
    pub solver: SolverKind,
    pub nodes: u64,
}

/// The solver `--solver auto` picks: the bijective program for bijective
/// runs, otherwise the one matching the host family. Weighted guests on a
/// theta go to the connected-treewidth program, which handles edge weights.
pub fn auto_solver(host: &Host, bijective: bool, weighted: bool) -> SolverKind {
    if bijective {
        return SolverKind::Tw;
    }
    match host.kind {
        HostKind::Cycle(_) => SolverKind::Cycle,
        HostKind::Path(_) => SolverKind::Line,
        HostKind::Theta(_) if !weighted => SolverKind::Theta,
        HostKind::Theta(_) | HostKind::File => SolverKind::Ctw,
    }
}

fn resolve(solver: SolverKind, host: &Host, bijective: bool, weighted: bool) -> Result<SolverKind, CliError> {
    let kind = match solver {
        SolverKind::Auto => auto_solver(host, bijective, weighted),
        k => k,
    };
    let fits = match kind {
        SolverKind::Cycle => matches!(host.kind, HostKind::Cycle(_)),
        SolverKind::Line => matches!(host.kind, HostKind::Path(_)),
        SolverKind::Theta => matches!(host.kind, HostKind::Theta(_)),
        _ => true,
    };
    if !fits {
        return Err(CliError::Input(format!("solver `{kind}` does not handle this host family")));
    }
    match (kind, bijective) {
        (SolverKind::Oracle, _) | (SolverKind::Tw, true) => Ok(kind),
        (SolverKind::Tw, false) => Err(CliError::Input("solver `tw` is bijective only (add --bijective)".into())),
        (_, true) => Err(CliError::Input(format!("solver `{kind}` has no bijective mode (use tw or oracle)"))),
        (_, false) => Ok(kind),
    }
}

/// Nice decomposition of the host, from `--td` if given, computed otherwise.
pub fn nice_decomposition(host: &Host) -> Result<NiceTreeDecomposition, CliError> {
    let td = match &host.td {
        Some(td) => td.clone(),
        None => tree_decomposition(&host.graph),
    };
    make_nice(&td, &host.graph).map_err(|e| CliError::Input(e.to_string()))
}

/// Decides a non-contracting distortion-`d` instance with the chosen solver
/// and checks any witness against the full metrics before returning it.
pub fn solve(
    guest: &Guest,
    host: &Host,
    d: u32,
    bijective: bool,
    solver: SolverKind,
    limits: &Limits,
) -> Result<Verdict, CliError> {
    let (g, dg, h, dh) = (&guest.graph, &guest.dist, &host.graph, &host.dist);
    let kind = resolve(solver, host, bijective, g.is_weighted())?;
    let out: Outcome = match kind {
        SolverKind::Cycle | SolverKind::Line => {
            let mut opts = line_cycle_solver::Options { oracle_budget: limits.oracle, ..Default::default() };
            if let Some(m) = limits.max_states {
                opts.max_states = m;
            }
            if kind == SolverKind::Cycle {
                line_cycle_solver::embed_into_cycle_with(g, dg, h.n(), d, &opts)?
            } else {
                line_cycle_solver::embed_into_line_with(g, dg, h.n(), d, &opts)?
            }
        }
        SolverKind::Theta => {
            let HostKind::Theta(theta) = &host.kind else { unreachable!("checked by resolve") };
            let mut line = line_cycle_solver::Options { oracle_budget: limits.oracle, ..Default::default() };
            if let Some(m) = limits.max_states {
                line.max_states = m;
            }
            let opts = theta_solver::Options { line, oracle_budget: limits.oracle, ..Default::default() };
            theta_solver::embed_into_theta_with(g, dg, theta, d, &opts)?
        }
        SolverKind::Tw => {
            let ntd = nice_decomposition(host)?;
            let mut opts = treewidth_solver::Options::default();
            if let Some(m) = limits.max_states {
                opts.max_states = m;
            }
            treewidth_solver::bijective_embed_tw_with(g, dg, h, dh, &ntd, d, None, &opts)?
        }
        SolverKind::Ctw => {
            let ntd = nice_decomposition(host)?;
            let cnd = connectify(&ntd, h, dh).map_err(|e| CliError::Input(e.to_string()))?;
            let mut opts = ctw_solver::Options::default();
            if let Some(m) = limits.max_states {
                opts.max_states = m;
            }
            ctw_solver::embed_ctw_with(g, dg, h, dh, &cnd.ntd, d, &opts)?
        }
        SolverKind::Oracle => {
            if d == 0 {
                return Err(CliError::Input("distortion must be at least 1".into()));
            }
            let p = Problem { bijective, ..Problem::new(dg, dh, d) };
            let stats = search(&p, limits.oracle);
            match stats.result {
                OracleResult::Found(f) => Outcome::found(f, stats.nodes),
                OracleResult::Infeasible => Outcome::infeasible(stats.nodes),
                OracleResult::BudgetExceeded => return Err(CliError::Budget),
            }
        }
        SolverKind::Auto => unreachable!("resolved above"),
    };
    if let Some(f) = &out.embedding {
        let check = verify_nc_distortion(g, h, dg, dh, f, d).map_err(|e| CliError::Unverified(e.to_string()))?;
        if !check.is_ok() {
            return Err(CliError::Unverified(format!("{check:?}")));
        }
        if bijective && f.guest_n() != h.n() {
            return Err(CliError::Unverified("bijective witness does not cover the host".into()));
        }
    }
    Ok(Verdict { embedding: out.embedding, solver: kind, nodes: out.nodes })
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Input(m) => CliError::Input(m),
            SolveError::BudgetExceeded => CliError::Budget,
            SolveError::Unverified(m) => CliError::Unverified(m),
        }
    }
}
