use crate::{Graph, GraphError};

/// Description of a host graph family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HostSpec {
    /// Path on `N` vertices `0..N`.
    Path(usize),
    /// Cycle on `N` vertices, position `i` adjacent to `i±1 mod N`.
    Cycle(usize),
    /// Generalized theta graph: `k` internally disjoint s–t paths of the given lengths.
    Theta(Vec<usize>),
    General(Graph),
}

impl HostSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        match self {
            HostSpec::Path(n) if *n == 0 => Err(GraphError::InvalidHost("path needs N >= 1".into())),
            HostSpec::Cycle(n) if *n < 3 => Err(GraphError::InvalidHost("cycle needs N >= 3".into())),
            HostSpec::Theta(arms) => {
                if arms.len() < 2 {
                    return Err(GraphError::InvalidHost("theta needs at least two arms".into()));
                }
                if arms.contains(&0) {
                    return Err(GraphError::InvalidHost("theta arm lengths must be >= 1".into()));
                }
                if arms.iter().filter(|&&l| l == 1).count() > 1 {
                    return Err(GraphError::InvalidHost(
                        "at most one theta arm may have length 1 (no parallel edges)".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Vertex sequences of the arms of a theta graph as laid out by [`generate`]:
/// each sequence runs from `s = 0` to `t = 1`.
pub fn theta_arms(lengths: &[usize]) -> Vec<Vec<usize>> {
    let mut next = 2;
    lengths
        .iter()
        .map(|&l| {
            let mut arm = vec![0];
            arm.extend(next..next + l - 1);
            next += l - 1;
            arm.push(1);
            arm
        })
        .collect()
}

pub fn generate(spec: &HostSpec) -> Result<Graph, GraphError> {
    spec.validate()?;
    match spec {
        HostSpec::Path(n) => Graph::from_edges(*n, &(1..*n).map(|i| (i - 1, i)).collect::<Vec<_>>()),
        HostSpec::Cycle(n) => Graph::from_edges(*n, &(0..*n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()),
        HostSpec::Theta(lengths) => {
            let arms = theta_arms(lengths);
            let n = 2 + lengths.iter().map(|l| l - 1).sum::<usize>();
            let edges: Vec<_> = arms.iter().flat_map(|a| a.windows(2).map(|w| (w[0], w[1]))).collect();
            Graph::from_edges(n, &edges)
        }
        HostSpec::General(g) => Ok(g.clone()),
    }
}
