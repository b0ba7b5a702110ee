use std::collections::BTreeMap;

use embed_core::{subdivide_red_blue, verify_nc_distortion, Embedding};
use graph_core::corpus::{
    connected_graphs, cycle_graph, path_graph, random_connected, star_graph, trees, unicyclic_graphs,
};
use graph_core::{all_pairs_distances, DistanceMatrix, Graph};
use oracle::{brute_force_embed, SearchBudget};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treewidth_solver::*;

/// Independent check: tries every bijection from the guest onto `codomain`.
fn permutation_oracle(dg: &DistanceMatrix, dh: &DistanceMatrix, codomain: &[usize], d: u32) -> bool {
    fn rec(dg: &DistanceMatrix, dh: &DistanceMatrix, d: u32, free: &mut Vec<usize>, image: &mut Vec<usize>) -> bool {
        let u = image.len();
        if u == dg.n() {
            return true;
        }
        for i in 0..free.len() {
            let x = free[i];
            let ok = image.iter().enumerate().all(|(v, &y)| {
                let (a, b) = (dg.get(u, v), dh.get(x, y));
                b >= a && b <= d * a
            });
            if ok {
                free.swap_remove(i);
                image.push(x);
                if rec(dg, dh, d, free, image) {
                    return true;
                }
                image.pop();
                free.push(x);
                let last = free.len() - 1;
                free.swap(i, last);
            }
        }
        false
    }
    codomain.len() == dg.n() && rec(dg, dh, d, &mut codomain.to_vec(), &mut Vec::new())
}

fn nice(h: &Graph) -> NiceTreeDecomposition {
    make_nice(&tree_decomposition(h), h).unwrap()
}

fn solve(g: &Graph, h: &Graph, d: u32) -> Option<Embedding> {
    let f = bijective_embed_tw(g, h, &nice(h), d, None).unwrap();
    if let Some(f) = &f {
        let (dg, dh) = (all_pairs_distances(g), all_pairs_distances(h));
        assert!(verify_nc_distortion(g, h, &dg, &dh, f, d).unwrap().is_ok());
        let mut images = f.images();
        images.sort_unstable();
        assert_eq!(images, (0..h.n()).collect::<Vec<_>>());
    }
    f
}

#[test]
fn ball_union_examples() {
    let c10 = cycle_graph(10);
    assert_eq!(ball_union(&c10, &all_pairs_distances(&c10), &[0], 2), vec![0, 1, 2, 8, 9]);
    let p5 = path_graph(5);
    let dh = all_pairs_distances(&p5);
    assert_eq!(ball_union(&p5, &dh, &[0, 4], 1), vec![0, 1, 3, 4]);
    assert_eq!(ball_union(&p5, &dh, &[0, 1, 2, 3, 4], 0), vec![0, 1, 2, 3, 4]);
}

#[test]
fn decomposition_axioms() {
    let p3 = path_graph(3);
    let td = TreeDecomposition::from_edges(3, vec![vec![0, 1], vec![1, 2]], &[(0, 1)]).unwrap();
    assert!(td.validate(&p3).is_ok());
    assert_eq!(td.width(), 1);
    let missing = TreeDecomposition::from_edges(3, vec![vec![0, 1], vec![1]], &[(0, 1)]).unwrap();
    assert_eq!(missing.validate(&p3), Err(TdError::UncoveredVertex(2)));
    let no_edge = TreeDecomposition::from_edges(3, vec![vec![0, 1], vec![2]], &[(0, 1)]).unwrap();
    assert_eq!(no_edge.validate(&p3), Err(TdError::UncoveredEdge(1, 2)));
    let split = TreeDecomposition::from_edges(3, vec![vec![0, 1], vec![2], vec![1, 2]], &[(0, 1), (1, 2)]).unwrap();
    assert_eq!(split.validate(&p3), Err(TdError::DisconnectedOccurrence(1)));
    assert!(matches!(
        TreeDecomposition::from_edges(3, vec![vec![0], vec![1], vec![2]], &[(0, 1), (1, 0)]),
        Err(TdError::NotATree(_))
    ));
}

#[test]
fn exact_widths() {
    let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let cases = [(path_graph(6), 1), (cycle_graph(7), 2), (star_graph(5), 1), (k4, 3)];
    for (h, w) in cases {
        let td = tree_decomposition(&h);
        td.validate(&h).unwrap();
        assert_eq!(td.width(), w);
        let heuristic = from_elimination_order(&h, &min_degree_order(&h));
        heuristic.validate(&h).unwrap();
        assert!(heuristic.width() >= w);
    }
    // A disconnected host still gets a single tree.
    let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
    tree_decomposition(&two).validate(&two).unwrap();
}

#[test]
fn pace_round_trip_and_errors() {
    let text = "c a path\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n";
    let td = parse_pace(text).unwrap();
    assert_eq!(td.bags, vec![vec![0, 1], vec![1, 2]]);
    assert_eq!(parse_pace(&write_pace(&td)).unwrap(), td);
    let bad = [
        ("b 1 1\n", 1),
        ("s td 1 1 3\nb 1 1 2\n", 2),
        ("s td 1 2 3\nb 2 1\n", 2),
        ("s td 1 2 3\nb 1 4\n", 2),
        ("s td 2 2 3\nb 1 1\nb 2 2\n1 3\n", 4),
        ("s td 1 2 3\nb 1 x\n", 2),
    ];
    for (t, line) in bad {
        match parse_pace(t) {
            Err(TdError::Parse { line: l, .. }) => assert_eq!(l, line, "{t:?}"),
            other => panic!("{t:?} gave {other:?}"),
        }
    }
    assert!(matches!(parse_pace("s td 2 1 2\nb 1 1\nb 2 2\n"), Err(TdError::NotATree(_))));
}

fn assert_nice(ntd: &NiceTreeDecomposition, h: &Graph) {
    ntd.validate(h).unwrap();
    for x in &ntd.nodes {
        assert!(x.children.len() <= 2);
    }
}

#[test]
fn make_nice_examples() {
    let k3 = cycle_graph(3);
    let single = TreeDecomposition::from_edges(3, vec![vec![0, 1, 2]], &[]).unwrap();
    let ntd = make_nice(&single, &k3).unwrap();
    assert_nice(&ntd, &k3);
    let kinds: Vec<NodeKind> = ntd.nodes.iter().map(|x| x.kind).collect();
    use NodeKind::*;
    assert_eq!(kinds, [Leaf, Introduce(0), Introduce(1), Introduce(2), Forget(0), Forget(1), Forget(2)]);

    let p3 = path_graph(3);
    let td = TreeDecomposition::from_edges(3, vec![vec![0, 1], vec![1, 2]], &[(0, 1)]).unwrap();
    let ntd = make_nice(&td, &p3).unwrap();
    assert_nice(&ntd, &p3);
    assert_eq!(ntd.width(), 1);

    // A bag with three children needs two joins.
    let star = star_graph(3);
    let td =
        TreeDecomposition::from_edges(4, vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]], &[(0, 1), (0, 2), (0, 3)])
            .unwrap();
    let ntd = make_nice(&td, &star).unwrap();
    assert_nice(&ntd, &star);
    assert_eq!(ntd.nodes.iter().filter(|x| x.kind == Join).count(), 2);

    let broken = TreeDecomposition::from_edges(3, vec![vec![0, 1], vec![2]], &[(0, 1)]).unwrap();
    assert_eq!(make_nice(&broken, &p3), Err(TdError::UncoveredEdge(1, 2)));
}

#[test]
fn make_nice_preserves_width_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(2..=12);
        let t = random_connected(&mut rng, n, 4, 0);
        // The natural decomposition: bag {parent(v), v} for each non-root v,
        // hung below the bag of its parent, or below the first bag at the root.
        let mut parent = vec![usize::MAX; n];
        let mut order = vec![0];
        parent[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            for &y in t.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    order.push(y);
                }
            }
        }
        let bag_of = |v: usize| order.iter().position(|&x| x == v).unwrap() - 1;
        let bags: Vec<Vec<usize>> = order[1..].iter().map(|&v| vec![parent[v], v]).collect();
        let tree_edges: Vec<(usize, usize)> = order[2..]
            .iter()
            .map(|&v| if parent[v] == 0 { (0, bag_of(v)) } else { (bag_of(parent[v]), bag_of(v)) })
            .collect();
        let td = TreeDecomposition::from_edges(n, bags, &tree_edges).unwrap();
        td.validate(&t).unwrap();
        let ntd = make_nice(&td, &t).unwrap();
        assert_nice(&ntd, &t);
        assert_eq!(ntd.width(), td.width());
        assert!(ntd.len() <= 4 * (td.width() + 1) * n + 4);
    }
}

#[test]
fn solver_examples() {
    let p4 = path_graph(4);
    assert!(solve(&p4, &p4, 1).is_some());
    let c4 = cycle_graph(4);
    let k13 = star_graph(3);
    let dk = all_pairs_distances(&k13);
    let all: Vec<usize> = (0..4).collect();
    for d in 1..=3 {
        for g in [&c4, &p4] {
            let expected = permutation_oracle(&all_pairs_distances(g), &dk, &all, d);
            assert!(!expected, "a star centre must hold a guest vertex adjacent to all others");
            assert_eq!(solve(g, &k13, d).is_some(), expected);
        }
    }
    let c6 = cycle_graph(6);
    assert!(solve(&c6, &c6, 1).is_some());
    // The ends of P6 are 5 apart, more than any two vertices of C6.
    let p6 = path_graph(6);
    assert!((1..=5).all(|d| solve(&p6, &c6, d).is_none()));
    let (dc, dp) = (all_pairs_distances(&c6), all_pairs_distances(&p6));
    let all: Vec<usize> = (0..6).collect();
    for d in 1..=5 {
        assert_eq!(solve(&c6, &p6, d).is_some(), permutation_oracle(&dc, &dp, &all, d), "d={d}");
    }
}

#[test]
fn rejects_bad_input() {
    let p4 = path_graph(4);
    let p5 = path_graph(5);
    let ntd = nice(&p5);
    assert!(bijective_embed_tw(&p4, &p5, &ntd, 1, None).is_err());
    assert!(bijective_embed_tw(&p4, &p5, &ntd, 0, Some(&[0, 1, 2, 3])).is_err());
    assert!(bijective_embed_tw(&p4, &p5, &ntd, 1, Some(&[0, 1, 2, 2])).is_err());
    let two = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
    assert!(bijective_embed_tw(&two, &p5, &ntd, 1, None).is_err());
    assert!(bijective_embed_tw(&p5, &p5, &nice(&p4), 1, None).is_err());
}

#[test]
fn matches_permutation_oracle_up_to_five() {
    let mut mismatches = Vec::new();
    for n in 1..=5 {
        let hosts: Vec<Graph> = trees(n).into_iter().chain(unicyclic_graphs(n)).collect();
        for h in &hosts {
            let dh = all_pairs_distances(h);
            let ntd = nice(h);
            let all: Vec<usize> = (0..n).collect();
            for g in connected_graphs(n) {
                let dg = all_pairs_distances(&g);
                for d in 1..=3 {
                    let expected = permutation_oracle(&dg, &dh, &all, d);
                    let got = bijective_embed_tw(&g, h, &ntd, d, None).unwrap().is_some();
                    if got != expected {
                        mismatches.push((g.clone(), h.clone(), d));
                    }
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn red_blue_variant_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut found = 0;
    for _ in 0..60 {
        let n = rng.gen_range(2..=5);
        let h = random_connected(&mut rng, n, 3, 1);
        let g = random_connected(&mut rng, n, 3, 1);
        let p = rng.gen_range(0..=2);
        let rb = subdivide_red_blue(&h, p);
        let red = rb.red_vertices();
        let scale = rng.gen_range(1..=p + 1);
        let dg = all_pairs_distances(&g).scaled(scale);
        let dh = all_pairs_distances(&rb.graph);
        let ntd = nice(&rb.graph);
        for d in 1..=3 {
            let out =
                bijective_embed_tw_with(&g, &dg, &rb.graph, &dh, &ntd, d, Some(&red), &Options::default()).unwrap();
            let oracle =
                brute_force_embed(&g, &dg, &rb.graph, &dh, d, true, Some(&red), SearchBudget::default()).is_found();
            assert_eq!(out.embedding.is_some(), oracle, "{g:?} into {h:?} subdivided {p}, scale {scale}, d={d}");
            assert_eq!(oracle, permutation_oracle(&dg, &dh, &red, d));
            found += out.embedding.is_some() as usize;
        }
    }
    assert!(found > 0);
}

/// The node whose bag is `{0}` and whose only descendant is a leaf.
fn lowest_bag_zero(ntd: &NiceTreeDecomposition) -> usize {
    (0..ntd.len())
        .find(|&u| ntd.nodes[u].bag == [0] && ntd.nodes[u].kind == NodeKind::Introduce(0))
        .expect("an introduce of vertex 0 over a leaf")
}

#[test]
fn feasibility_examples() {
    let c6 = cycle_graph(6);
    let dc = all_pairs_distances(&c6);
    let ntd = nice(&c6);
    let inst = TwInstance::new(&c6, &dc, &c6, &dc, &ntd, 1, None).unwrap();
    let identity = Embedding::from_images(&[0, 1, 2, 3, 4, 5]);
    for u in 0..ntd.len() {
        assert!(tw_feasible(&inst, &inst.restrict(u, &identity)));
    }

    // Below the bag {0} only host 0 is present. The rest of the guest, path
    // 2-3-4, touches hosts 1 and 5, both above the bag.
    let u = lowest_bag_zero(&ntd);
    assert_eq!(inst.ball(u), [0, 1, 5]);
    let map: BTreeMap<usize, usize> = [(0, 0), (1, 1), (5, 5)].into();
    let state = |below: u64| TwPartialEmbedding { node: u, map: map.clone(), below };
    assert!(tw_feasible(&inst, &state(0b1)));
    // Component {2,3,4} split between the two sides.
    assert!(!tw_feasible(&inst, &state(0b101)));
    // Wholly below, yet attached to vertices mapped above.
    assert!(!tw_feasible(&inst, &state(0b11101)));
    // A vertex on the bag side marked as above.
    assert!(!tw_feasible(&inst, &state(0b0)));
    // Not a bijection onto the ball.
    assert!(!tw_feasible(&inst, &TwPartialEmbedding { node: u, map: [(0, 0), (1, 1)].into(), below: 1 }));

    // Guest: path 0..6 with vertex 7 hanging off 2. On P8 with d = 1 the
    // placement 0,1,2,3 on hosts 2..5 is isometric, but guest 2 sits on the
    // bag {3,4} and its neighbour 7 is not placed.
    let mut edges: Vec<(usize, usize)> = (1..7).map(|i| (i - 1, i)).collect();
    edges.push((2, 7));
    let g = Graph::from_edges(8, &edges).unwrap();
    let dg = all_pairs_distances(&g);
    let p8 = path_graph(8);
    let dp = all_pairs_distances(&p8);
    let bags: Vec<Vec<usize>> = (0..7).map(|i| vec![i, i + 1]).collect();
    let td = TreeDecomposition::from_edges(8, bags, &(1..7).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap();
    let ntd = make_nice(&td, &p8).unwrap();
    let inst = TwInstance::new(&g, &dg, &p8, &dp, &ntd, 1, None).unwrap();
    let u = (0..ntd.len()).find(|&u| ntd.nodes[u].bag == [3, 4]).unwrap();
    assert_eq!(inst.ball(u), [2, 3, 4, 5]);
    let f = Embedding::from_images(&[2, 3, 4, 5, 6, 7, 1, 0]);
    let state = inst.restrict(u, &f);
    assert_eq!(state.map, [(0, 2), (1, 3), (2, 4), (3, 5)].into());
    assert!(!tw_feasible(&inst, &state));
}

#[test]
fn succession_examples() {
    let p6 = path_graph(6);
    let dp = all_pairs_distances(&p6);
    let ntd = nice(&p6);
    let inst = TwInstance::new(&p6, &dp, &p6, &dp, &ntd, 1, None).unwrap();
    let identity = Embedding::from_images(&[0, 1, 2, 3, 4, 5]);
    let parents = ntd.parents();
    let mut checked = 0;
    for (v, &parent) in parents.iter().enumerate() {
        let Some(u) = parent else { continue };
        let (f_u, f_v) = (inst.restrict(u, &identity), inst.restrict(v, &identity));
        match ntd.nodes[u].kind {
            NodeKind::Join => {
                let c = &ntd.nodes[u].children;
                let (a, b) = (inst.restrict(c[0], &identity), inst.restrict(c[1], &identity));
                assert!(tw_join_succeeds(&inst, &f_u, &a, &b));
            }
            _ => {
                assert!(tw_succeeds(&inst, &f_u, &f_v));
                checked += 1;
            }
        }
        if let NodeKind::Introduce(a) = ntd.nodes[u].kind {
            // Lower set of the parent missing the guest on the new vertex.
            let mut bad = f_u.clone();
            bad.below &= !(1 << a);
            assert!(!tw_succeeds(&inst, &bad, &f_v));
            // Pointwise disagreement on the child's ball.
            if let Some((&x, _)) = f_v.map.iter().next() {
                let mut moved = f_u.clone();
                let other = *moved.map.keys().find(|&&y| y != x).unwrap_or(&x);
                if other != x {
                    let (px, py) = (moved.map[&x], moved.map[&other]);
                    moved.map.insert(x, py);
                    moved.map.insert(other, px);
                    assert!(!tw_succeeds(&inst, &moved, &f_v));
                }
            }
        }
    }
    assert!(checked > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every state induced by a witness is feasible and successive states
    /// succeed one another.
    #[test]
    fn witness_restrictions_are_consistent(seed in 0u64..10_000, d in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=7);
        let extra = rng.gen_range(0..=2);
        let h = random_connected(&mut rng, n, 3, extra);
        let g = random_connected(&mut rng, n, 4, 2);
        let ntd = nice(&h);
        if let Some(f) = solve(&g, &h, d) {
            let (dg, dh) = (all_pairs_distances(&g), all_pairs_distances(&h));
            let inst = TwInstance::new(&g, &dg, &h, &dh, &ntd, d, None).unwrap();
            let parents = ntd.parents();
            for (v, &parent) in parents.iter().enumerate() {
                let f_v = inst.restrict(v, &f);
                prop_assert!(tw_feasible(&inst, &f_v));
                if let Some(u) = parent {
                    if ntd.nodes[u].kind != NodeKind::Join {
                        prop_assert!(tw_succeeds(&inst, &inst.restrict(u, &f), &f_v));
                    }
                }
            }
        }
    }

    /// Any bijective distortion-`d` map found by the oracle is matched.
    #[test]
    fn oracle_solutions_are_found(seed in 0u64..10_000, d in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=7);
        let h = random_connected(&mut rng, n, 3, 1);
        let g = random_connected(&mut rng, n, 3, 1);
        let (dg, dh) = (all_pairs_distances(&g), all_pairs_distances(&h));
        let oracle = brute_force_embed(&g, &dg, &h, &dh, d, true, None, SearchBudget::default()).is_found();
        prop_assert_eq!(solve(&g, &h, d).is_some(), oracle);
    }
}
