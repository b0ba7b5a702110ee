//! Reading guests, hosts, decompositions and distortion values.

use std::fs;
use std::path::Path;

use embed_core::Ratio;
use graph_core::{all_pairs_distances, generate, parse_edge_list, parse_guest, DistanceMatrix, Graph, HostSpec};
use theta_solver::ThetaHost;
use treewidth_solver::{parse_pace, TreeDecomposition};

use crate::CliError;

/// A guest graph with its metric and the labels used in its input file.
#[derive(Clone, Debug)]
pub struct Guest {
    pub graph: Graph,
    pub dist: DistanceMatrix,
    pub labels: Vec<u64>,
}

impl Guest {
    pub fn new(graph: Graph) -> Self {
        let labels = (0..graph.n() as u64).collect();
        Guest { dist: all_pairs_distances(&graph), graph, labels }
    }

    pub fn read(path: &Path, weighted: bool) -> Result<Self, CliError> {
        let text = read_file(path)?;
        let parsed = parse_guest(&text, weighted).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(Guest { dist: all_pairs_distances(&parsed.graph), graph: parsed.graph, labels: parsed.labels })
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }
}

/// Host family as given on the command line.
#[derive(Clone, Debug)]
pub enum HostKind {
    Path(usize),
    Cycle(usize),
    Theta(Box<ThetaHost>),
    File,
}

/// A host graph with its metric, labels and an optional decomposition.
#[derive(Clone, Debug)]
pub struct Host {
    pub kind: HostKind,
    pub graph: Graph,
    pub dist: DistanceMatrix,
    pub labels: Vec<u64>,
    pub td: Option<TreeDecomposition>,
}

impl Host {
    /// Parses `path:N`, `cycle:N`, `theta:l1,...,lk` or `file:PATH`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (family, arg) =
            spec.split_once(':').ok_or_else(|| CliError::Input(format!("host `{spec}`: expected FAMILY:ARG")))?;
        let number = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| CliError::Input(format!("host `{spec}`: invalid number `{s}`")))
        };
        match family {
            "path" => Self::generated(HostKind::Path(number(arg)?), HostSpec::Path(number(arg)?)),
            "cycle" => Self::generated(HostKind::Cycle(number(arg)?), HostSpec::Cycle(number(arg)?)),
            "theta" => {
                let lengths = arg.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
                let theta = ThetaHost::new(&lengths).map_err(|e| CliError::Input(format!("host `{spec}`: {e}")))?;
                Ok(Self::from_graph(HostKind::Theta(Box::new(theta.clone())), theta.graph().clone()))
            }
            "file" => {
                let path = Path::new(arg);
                let parsed = parse_edge_list(&read_file(path)?, false)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                if parsed.graph.n() == 0 {
                    return Err(CliError::Input(format!("{}: host has no edges", path.display())));
                }
                let mut host = Self::from_graph(HostKind::File, parsed.graph);
                host.labels = parsed.labels;
                Ok(host)
            }
            _ => Err(CliError::Input(format!("host `{spec}`: unknown family `{family}`"))),
        }
    }

    fn generated(kind: HostKind, spec: HostSpec) -> Result<Self, CliError> {
        let graph = generate(&spec).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Self::from_graph(kind, graph))
    }

    pub fn from_graph(kind: HostKind, graph: Graph) -> Self {
        let labels = (0..graph.n() as u64).collect();
        Host { kind, dist: all_pairs_distances(&graph), graph, labels, td: None }
    }

    /// Attaches a PACE decomposition whose vertex `i` is the host vertex
    /// with the `i`-th smallest label.
    pub fn read_td(&mut self, path: &Path) -> Result<(), CliError> {
        let td = parse_pace(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        td.validate(&self.graph).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.td = Some(td);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }
}

/// Distortion as written: an integer runs the non-contracting solvers, a
/// fraction `a/b` runs the scaling reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distortion {
    Integer(u32),
    Fraction(Ratio<u64>),
}

impl Distortion {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Input(format!("distortion `{s}`: expected a positive integer or a/b"));
        match s.split_once('/') {
            None => match s.trim().parse::<u32>() {
                Ok(d) if d >= 1 => Ok(Distortion::Integer(d)),
                _ => Err(bad()),
            },
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                if b == 0 || a < b || a > u32::MAX as u64 {
                    return Err(CliError::Input(format!("distortion `{s}`: must be a ratio >= 1")));
                }
                Ok(Distortion::Fraction(Ratio::new(a, b)))
            }
        }
    }

    pub fn ratio(self) -> Ratio<u64> {
        match self {
            Distortion::Integer(d) => Ratio::from_integer(d as u64),
            Distortion::Fraction(r) => r,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn host_specs() {
        assert_eq!(Host::parse("cycle:8").unwrap().n(), 8);
        assert_eq!(Host::parse("path:5").unwrap().graph.edge_count(), 4);
        assert_eq!(Host::parse("theta:2,3,4").unwrap().n(), 2 + 1 + 2 + 3);
        for bad in ["cycle", "cycle:x", "cycle:2", "theta:1,1", "blob:3", "file:/nonexistent"] {
            assert!(matches!(Host::parse(bad), Err(CliError::Input(_))), "{bad}");
        }
    }

    #[test]
    fn distortions() {
        assert_eq!(Distortion::parse("3").unwrap(), Distortion::Integer(3));
        assert_eq!(Distortion::parse("6/4").unwrap(), Distortion::Fraction(Ratio::new(3, 2)));
        assert_eq!(Distortion::parse("2/1").unwrap().ratio(), Ratio::from_integer(2));
        for bad in ["0", "-1", "1/2", "3/0", "a/b", ""] {
            assert!(Distortion::parse(bad).is_err(), "{bad}");
        }
    }
}
