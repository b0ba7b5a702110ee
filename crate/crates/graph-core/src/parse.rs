use std::collections::BTreeSet;

use crate::{Graph, GraphError};

/// A graph read from an edge list together with the original vertex labels:
/// vertex `i` of `graph` was written as `labels[i]` in the input.
#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub labels: Vec<u64>,
}

impl ParsedGraph {
    /// Dense id of an input label.
    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }
}

/// Parses the edge-list format: one `u v` (or `u v w` when `weighted`) per
/// line, `#` starts a comment, blank lines are skipped. Labels are re-indexed
/// to `0..n` in increasing label order.
pub fn parse_edge_list(text: &str, weighted: bool) -> Result<ParsedGraph, GraphError> {
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let expected = if weighted { 3 } else { 2 };
        if fields.len() != expected {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| {
            s.parse::<u64>().map_err(|_| GraphError::Parse { line: line_no, message: format!("invalid {what} `{s}`") })
        };
        let u = num(fields[0], "vertex")?;
        let v = num(fields[1], "vertex")?;
        let w = if weighted {
            let w = num(fields[2], "weight")?;
            if w == 0 || w > u32::MAX as u64 {
                return Err(GraphError::Parse { line: line_no, message: format!("weight {w} out of range") });
            }
            w as u32
        } else {
            1
        };
        raw.push((line_no, u, v, w));
    }
    let labels: Vec<u64> = raw.iter().flat_map(|&(_, u, v, _)| [u, v]).collect::<BTreeSet<_>>().into_iter().collect();
    let idx = |x: u64| labels.binary_search(&x).unwrap();
    let mut edges = Vec::with_capacity(raw.len());
    let mut seen = BTreeSet::new();
    for &(line, u, v, w) in &raw {
        if u == v {
            return Err(GraphError::Parse { line, message: format!("self-loop on vertex {u}") });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(GraphError::Parse { line, message: format!("duplicate edge {u} {v}") });
        }
        edges.push((idx(u), idx(v), w));
    }
    let graph = if weighted {
        Graph::from_weighted_edges(labels.len(), &edges)?
    } else {
        let plain: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        Graph::from_edges(labels.len(), &plain)?
    };
    Ok(ParsedGraph { graph, labels })
}

/// Like [`parse_edge_list`] but rejects empty or disconnected graphs, as
/// required for guests.
pub fn parse_guest(text: &str, weighted: bool) -> Result<ParsedGraph, GraphError> {
    let parsed = parse_edge_list(text, weighted)?;
    if parsed.graph.n() == 0 {
        return Err(GraphError::Parse { line: 0, message: "graph has no edges".into() });
    }
    if !parsed.graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    Ok(parsed)
}

/// Writes a graph in edge-list format.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.weighted_edges() {
        if g.is_weighted() {
            out.push_str(&format!("{u} {v} {w}\n"));
        } else {
            out.push_str(&format!("{u} {v}\n"));
        }
    }
    out
}
