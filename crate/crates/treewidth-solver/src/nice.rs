use graph_core::Graph;

use crate::td::TreeDecomposition;
use crate::TdError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted host vertices.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// A rooted decomposition whose nodes are leaves, introduces, forgets and
/// binary joins, with empty leaf and root bags. Nodes are stored children
/// first, so the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub n_vertices: usize,
    pub nodes: Vec<NiceNode>,
}

/// Chooses the steps leading from a lower bag to an upper one.
pub type StepFn<'a> = dyn Fn(&[usize], &[usize]) -> Vec<Step> + 'a;

/// One move between adjacent bags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Introduce(usize),
    Forget(usize),
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len()];
        for (i, x) in self.nodes.iter().enumerate() {
            for &c in &x.children {
                parent[c] = Some(i);
            }
        }
        parent
    }

    /// The same bags as a plain tree decomposition rooted at node 0.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let k = self.len();
        // Reverse the order so that the root becomes node 0.
        let bags = self.nodes.iter().rev().map(|x| x.bag.clone()).collect();
        let edges: Vec<(usize, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, x)| x.children.iter().map(move |&c| (k - 1 - i, k - 1 - c)))
            .collect();
        TreeDecomposition::from_edges(self.n_vertices, bags, &edges).expect("nice decomposition is a tree")
    }

    /// Checks the node-kind rules and the decomposition axioms.
    pub fn validate(&self, h: &Graph) -> Result<(), TdError> {
        let bad = |i: usize, m: &str| Err(TdError::NotNice(format!("node {i}: {m}")));
        if self.is_empty() {
            return Err(TdError::NotNice("no nodes".into()));
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return bad(self.root(), "root bag is not empty");
        }
        let mut has_parent = vec![false; self.len()];
        for (i, x) in self.nodes.iter().enumerate() {
            if x.bag.windows(2).any(|w| w[0] >= w[1]) {
                return bad(i, "bag is not sorted and duplicate-free");
            }
            for &c in &x.children {
                if c >= i || has_parent[c] {
                    return bad(i, "children must precede their parent and have one parent");
                }
                has_parent[c] = true;
            }
            let child = |j: usize| &self.nodes[x.children[j]].bag;
            let ok = match (x.kind, x.children.len()) {
                (NodeKind::Leaf, 0) => x.bag.is_empty(),
                (NodeKind::Introduce(v), 1) => {
                    !child(0).contains(&v) && x.bag.contains(&v) && without(&x.bag, v) == *child(0)
                }
                (NodeKind::Forget(v), 1) => {
                    !x.bag.contains(&v) && child(0).contains(&v) && without(child(0), v) == x.bag
                }
                (NodeKind::Join, 2) => *child(0) == x.bag && *child(1) == x.bag,
                _ => false,
            };
            if !ok {
                return bad(i, &format!("{:?} does not match its children", x.kind));
            }
        }
        if has_parent[..self.root()].iter().any(|p| !p) {
            return Err(TdError::NotATree("a non-root node has no parent".into()));
        }
        self.to_tree_decomposition().validate(h)
    }
}

fn without(bag: &[usize], v: usize) -> Vec<usize> {
    bag.iter().copied().filter(|&x| x != v).collect()
}

/// Forget what the upper bag lacks, then introduce what it adds, each in
/// increasing vertex order. Never exceeds the larger of the two bags.
pub fn default_steps(lower: &[usize], upper: &[usize]) -> Vec<Step> {
    let forget = lower.iter().filter(|v| !upper.contains(v)).map(|&v| Step::Forget(v));
    let introduce = upper.iter().filter(|v| !lower.contains(v)).map(|&v| Step::Introduce(v));
    forget.chain(introduce).collect()
}

/// Nice decomposition with the default step order.
pub fn make_nice(td: &TreeDecomposition, h: &Graph) -> Result<NiceTreeDecomposition, TdError> {
    make_nice_with(td, h, &default_steps)
}

/// Nice decomposition in which the path from a child bag (or the empty leaf
/// bag) up to its parent bag, and from the root bag down to the empty root,
/// follows `steps(lower, upper)`. The steps must turn `lower` into `upper`.
pub fn make_nice_with(td: &TreeDecomposition, h: &Graph, steps: &StepFn<'_>) -> Result<NiceTreeDecomposition, TdError> {
    td.validate(h)?;
    let children = td.children();
    let mut nodes: Vec<NiceNode> = Vec::new();
    // Post-order over the decomposition tree.
    let mut order = Vec::with_capacity(td.len());
    let mut stack = vec![(0usize, false)];
    while let Some((t, done)) = stack.pop() {
        if done {
            order.push(t);
        } else {
            stack.push((t, true));
            stack.extend(children[t].iter().rev().map(|&c| (c, false)));
        }
    }
    let mut top = vec![usize::MAX; td.len()];
    for &t in &order {
        let bag = &td.bags[t];
        let mut tops: Vec<usize> = Vec::new();
        if children[t].is_empty() {
            nodes.push(NiceNode { kind: NodeKind::Leaf, bag: Vec::new(), children: Vec::new() });
            let leaf = nodes.len() - 1;
            tops.push(climb(&mut nodes, leaf, bag, steps)?);
        }
        for &c in &children[t] {
            tops.push(climb(&mut nodes, top[c], bag, steps)?);
        }
        let mut acc = tops[0];
        for &other in &tops[1..] {
            nodes.push(NiceNode { kind: NodeKind::Join, bag: bag.clone(), children: vec![acc, other] });
            acc = nodes.len() - 1;
        }
        top[t] = acc;
    }
    climb(&mut nodes, top[0], &[], steps)?;
    let nice = NiceTreeDecomposition { n_vertices: td.n_vertices, nodes };
    nice.validate(h)?;
    Ok(nice)
}

/// Appends the chain from node `from` up to a node with bag `upper`.
fn climb(nodes: &mut Vec<NiceNode>, from: usize, upper: &[usize], steps: &StepFn<'_>) -> Result<usize, TdError> {
    let mut at = from;
    let mut bag = nodes[from].bag.clone();
    for step in steps(&bag, upper) {
        let kind = match step {
            Step::Introduce(v) if bag.binary_search(&v).is_err() => {
                bag.insert(bag.binary_search(&v).unwrap_err(), v);
                NodeKind::Introduce(v)
            }
            Step::Forget(v) if bag.binary_search(&v).is_ok() => {
                bag.remove(bag.binary_search(&v).unwrap());
                NodeKind::Forget(v)
            }
            _ => return Err(TdError::NotNice(format!("step {step:?} does not apply to bag {bag:?}"))),
        };
        nodes.push(NiceNode { kind, bag: bag.clone(), children: vec![at] });
        at = nodes.len() - 1;
    }
    if bag != upper {
        return Err(TdError::NotNice(format!("steps end at {bag:?}, expected {upper:?}")));
    }
    Ok(at)
}
