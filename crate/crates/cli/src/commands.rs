use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use embed_core::{
    distortion_report, fmt_ratio, gen_reduction_instances, host_dot, verify_nc_ratio, Embedding, EmbeddingJson,
    Verification, DEFAULT_REDUCTION_BUDGET,
};
use graph_core::corpus::{connected_graphs, random_connected, trees, unicyclic_graphs};
use graph_core::write_edge_list;
use oracle::SearchBudget;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treewidth_solver::{tree_decomposition, write_pace};

use crate::args::{BenchArgs, Command, Family, GenCommand, InstanceArgs, LimitArgs, OracleArgs, SolveArgs, VerifyArgs};
use crate::dispatch::{solve, Limits, SolverKind};
use crate::input::{read_file, Distortion, Guest, Host};
use crate::pipeline::run_pipeline;
use crate::{CliError, EXIT_FOUND, EXIT_INFEASIBLE};

pub(crate) fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Solve(a) => solve_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Oracle(a) => oracle_cmd(a, out),
        Command::Gen(a) => gen_cmd(a, out),
        Command::Bench(a) => bench_cmd(a, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn limits(a: &LimitArgs) -> Result<Limits, CliError> {
    if a.oracle_nodes == 0 || a.time_limit == 0 {
        return Err(CliError::Input("search limits must be positive".into()));
    }
    Ok(Limits {
        max_states: a.max_states,
        oracle: SearchBudget::new(a.oracle_nodes, Duration::from_secs(a.time_limit)),
    })
}

fn load(a: &InstanceArgs) -> Result<(Guest, Host), CliError> {
    let guest = Guest::read(&a.graph, a.weighted)?;
    let mut host = Host::parse(&a.host)?;
    if let Some(td) = &a.td {
        host.read_td(td)?;
    }
    Ok((guest, host))
}

/// JSON for a witness, keyed and valued by the input labels.
fn embedding_json(guest: &Guest, host: &Host, f: &Embedding) -> Result<String, CliError> {
    let report = distortion_report(&guest.graph, &host.graph, &guest.dist, &host.dist, f)
        .map_err(|e| CliError::Unverified(e.to_string()))?;
    let mut json = EmbeddingJson::new(f, Some(&report));
    json.map = f.map().iter().map(|(&u, &x)| (guest.labels[u] as usize, host.labels[x] as usize)).collect();
    Ok(json.to_json())
}

fn solve_cmd(a: SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (guest, host) = load(&a.instance)?;
    let lim = limits(&a.limits)?;
    let bij = a.instance.bijective;
    let f = match Distortion::parse(&a.distortion)? {
        Distortion::Integer(d) => solve(&guest, &host, d, bij, a.solver, &lim)?.embedding,
        Distortion::Fraction(d) => run_pipeline(&guest, &host, d, bij, a.solver, &lim)?.embedding,
    };
    if let Some(path) = &a.dot {
        fs::write(path, host_dot(&host.graph, f.as_ref(), None)).map_err(io)?;
    }
    match f {
        Some(f) => {
            writeln!(out, "{}", embedding_json(&guest, &host, &f)?).map_err(io)?;
            Ok(EXIT_FOUND)
        }
        None => {
            writeln!(out, "infeasible").map_err(io)?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (guest, host) = load(&a.instance)?;
    let d = Distortion::parse(&a.distortion)?;
    let path = &a.embedding;
    let json =
        EmbeddingJson::parse(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (&u, &x) in &json.map {
        let gu =
            guest.index_of(u as u64).ok_or_else(|| CliError::Input(format!("guest vertex {u} is not in the graph")))?;
        let hx =
            host.index_of(x as u64).ok_or_else(|| CliError::Input(format!("host vertex {x} is not in the host")))?;
        map.insert(gu, hx);
    }
    let f = Embedding::new(guest.graph.n(), map);
    let (g, h, dg, dh) = (&guest.graph, &host.graph, &guest.dist, &host.dist);
    let pair = |u: usize, v: usize| (guest.labels[u], guest.labels[v]);
    let problem = match d {
        Distortion::Integer(_) => match verify_nc_ratio(g, h, dg, dh, &f, d.ratio()) {
            Err(e) => Some(e.to_string()),
            Ok(Verification::Ok) => None,
            Ok(Verification::Violation { u, v, guest_dist, host_dist, kind }) => {
                let (u, v) = pair(u, v);
                Some(format!("{kind:?} on pair ({u}, {v}): D_G = {guest_dist}, D_H = {host_dist}").to_lowercase())
            }
        },
        Distortion::Fraction(r) => match distortion_report(g, h, dg, dh, &f) {
            Err(e) => Some(e.to_string()),
            Ok(rep) if rep.distortion <= r => None,
            Ok(rep) => {
                let (eu, ev) = rep.expansion_witness.map_or((0, 0), |(u, v)| pair(u, v));
                let (cu, cv) = rep.contraction_witness.map_or((0, 0), |(u, v)| pair(u, v));
                Some(format!(
                    "distortion {} exceeds {}: expansion {} on pair ({eu}, {ev}), contraction {} on pair ({cu}, {cv})",
                    fmt_ratio(&rep.distortion),
                    fmt_ratio(&r),
                    fmt_ratio(&rep.expansion),
                    fmt_ratio(&rep.contraction)
                ))
            }
        },
    };
    let problem = problem.or_else(|| {
        (a.instance.bijective && f.guest_n() != host.n()).then(|| "embedding is not onto the host".to_string())
    });
    match problem {
        None => {
            let rep = distortion_report(g, h, dg, dh, &f).map_err(|e| CliError::Unverified(e.to_string()))?;
            let line = format!(
                "ok expansion {} contraction {} distortion {}",
                fmt_ratio(&rep.expansion),
                fmt_ratio(&rep.contraction),
                fmt_ratio(&rep.distortion)
            );
            writeln!(out, "{line}").map_err(io)?;
            Ok(EXIT_FOUND)
        }
        Some(msg) => {
            writeln!(out, "violation: {msg}").map_err(io)?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn oracle_cmd(a: OracleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (guest, host) = load(&a.instance)?;
    let lim = limits(&a.limits)?;
    let bij = a.instance.bijective;
    if let Some(d_max) = a.max_distortion {
        if d_max == 0 {
            return Err(CliError::Input("--max-distortion must be at least 1".into()));
        }
        for d in 1..=d_max {
            if solve(&guest, &host, d, bij, SolverKind::Oracle, &lim)?.embedding.is_some() {
                writeln!(out, "{d}").map_err(io)?;
                return Ok(EXIT_FOUND);
            }
        }
        writeln!(out, "none").map_err(io)?;
        return Ok(EXIT_INFEASIBLE);
    }
    let f = match Distortion::parse(a.distortion.as_deref().unwrap_or_default())? {
        Distortion::Integer(d) => solve(&guest, &host, d, bij, SolverKind::Oracle, &lim)?.embedding,
        Distortion::Fraction(d) => run_pipeline(&guest, &host, d, bij, SolverKind::Oracle, &lim)?.embedding,
    };
    match f {
        Some(f) => {
            writeln!(out, "{}", embedding_json(&guest, &host, &f)?).map_err(io)?;
            Ok(EXIT_FOUND)
        }
        None => {
            writeln!(out, "infeasible").map_err(io)?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text).map_err(|e| CliError::Input(format!("{}: {e}", dir.join(name).display())))
}

fn gen_cmd(a: GenCommand, out: &mut dyn Write) -> Result<i32, CliError> {
    match a {
        GenCommand::Host { spec, dot, td } => {
            let host = Host::parse(&spec)?;
            let text = if dot {
                host_dot(&host.graph, None, None)
            } else if td {
                write_pace(&tree_decomposition(&host.graph))
            } else {
                write_edge_list(&host.graph)
            };
            write!(out, "{text}").map_err(io)?;
        }
        GenCommand::Random { n, max_degree, extra, seed } => {
            if n < 2 || max_degree < 2 {
                return Err(CliError::Input("random guests need n >= 2 and max degree >= 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            write!(out, "{}", write_edge_list(&random_connected(&mut rng, n, max_degree, extra))).map_err(io)?;
        }
        GenCommand::Corpus { n, family, out: dir } => {
            if !(2..=9).contains(&n) {
                return Err(CliError::Input("corpus size must be in 2..=9".into()));
            }
            let (name, graphs) = match family {
                Family::Connected => ("connected", connected_graphs(n)),
                Family::Trees => ("tree", trees(n)),
                Family::Unicyclic => ("unicyclic", unicyclic_graphs(n)),
            };
            fs::create_dir_all(&dir).map_err(io)?;
            for (i, g) in graphs.iter().enumerate() {
                write_file(&dir, &format!("{name}_{n}_{i:04}.txt"), &write_edge_list(g))?;
            }
            writeln!(out, "{} graphs", graphs.len()).map_err(io)?;
        }
        GenCommand::Reduction { graph, host, distortion, weighted, out: dir } => {
            let guest = Guest::read(&graph, weighted)?;
            let host = Host::parse(&host)?;
            let d = Distortion::parse(&distortion)?.ratio();
            let instances =
                gen_reduction_instances(&guest.graph, &host.graph, *d.numer(), *d.denom(), DEFAULT_REDUCTION_BUDGET)
                    .map_err(|e| CliError::Input(e.to_string()))?;
            fs::create_dir_all(&dir).map_err(io)?;
            writeln!(out, "instance,host_scale,guest_scale,vertices,red").map_err(io)?;
            for (i, inst) in instances.enumerate() {
                let red = inst.host.red_vertices();
                let red_list: Vec<String> = red.iter().map(|v| v.to_string()).collect();
                write_file(&dir, &format!("instance_{i:04}.txt"), &write_edge_list(&inst.host.graph))?;
                write_file(&dir, &format!("instance_{i:04}.red"), &(red_list.join(" ") + "\n"))?;
                let n = inst.host.graph.n();
                writeln!(out, "{i},{},{},{n},{}", inst.host_scale, inst.guest_scale, red.len()).map_err(io)?;
            }
        }
    }
    Ok(EXIT_FOUND)
}

fn bench_cmd(a: BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let lim = limits(&a.limits)?;
    let mut guests: Vec<(String, Guest)> = Vec::new();
    for path in &a.graph {
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        guests.push((name, Guest::read(path, a.weighted)?));
    }
    if let Some(n) = a.corpus {
        if !(2..=8).contains(&n) {
            return Err(CliError::Input("--corpus must be in 2..=8".into()));
        }
        for k in 2..=n {
            for (i, g) in connected_graphs(k).into_iter().enumerate() {
                guests.push((format!("connected_{k}_{i:04}"), Guest::new(g)));
            }
        }
    }
    if guests.is_empty() {
        return Err(CliError::Input("bench needs --graph or --corpus".into()));
    }
    let hosts = a.host.iter().map(|s| Host::parse(s).map(|h| (s.clone(), h))).collect::<Result<Vec<_>, _>>()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "solver", "verdict", "nodes", "millis"]).map_err(|e| CliError::Input(e.to_string()))?;
    for (gname, guest) in &guests {
        for (hname, host) in &hosts {
            for &d in &a.distortion {
                for &solver in &a.solver {
                    let start = Instant::now();
                    let (kind, verdict, nodes) = match solve(guest, host, d, a.bijective, solver, &lim) {
                        Ok(v) => (v.solver.name(), if v.embedding.is_some() { "found" } else { "infeasible" }, v.nodes),
                        Err(CliError::Budget) => (solver.name(), "budget", 0),
                        Err(CliError::Input(_)) => (solver.name(), "input-error", 0),
                        Err(e @ CliError::Unverified(_)) => return Err(e),
                    };
                    let millis = start.elapsed().as_millis();
                    let instance = format!("{gname}@{hname}@d{d}");
                    w.write_record([
                        instance,
                        kind.to_string(),
                        verdict.to_string(),
                        nodes.to_string(),
                        millis.to_string(),
                    ])
                    .map_err(|e| CliError::Input(e.to_string()))?;
                }
            }
        }
    }
    w.flush().map_err(io)?;
    Ok(EXIT_FOUND)
}
