use std::collections::BTreeMap;

use embed_core::{verify_nc_distortion, Embedding, SolveError};
use graph_core::corpus::{connected_graphs, cycle_graph, path_graph, random_connected, star_graph};
use graph_core::{all_pairs_distances, DistanceMatrix, Graph};
use line_cycle_solver::{embed_into_cycle, Options as LineOptions};
use oracle::{brute_force_embed, OracleResult, SearchBudget};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use theta_solver::{
    classify_components, embed_into_theta, embed_into_theta_with, enumerate_configurations, enumerate_psi,
    last_vertex_candidates, shortest_component_embedding, Component, Form, Options, Psi, Role, ThetaHost,
};

fn oracle_feasible(g: &Graph, host: &ThetaHost, d: u32) -> bool {
    let dg = all_pairs_distances(g);
    match brute_force_embed(g, &dg, host.graph(), host.dist(), d, false, None, SearchBudget::default()) {
        OracleResult::Found(_) => true,
        OracleResult::Infeasible => false,
        OracleResult::BudgetExceeded => panic!("oracle budget exceeded"),
    }
}

fn mask(xs: &[usize]) -> u64 {
    xs.iter().fold(0, |m, &x| m | 1 << x)
}

/// Every component left after removing the vertices mapped near a terminal
/// lies on a single arm.
fn components_stay_on_one_arm(g: &Graph, host: &ThetaHost, d: u32, f: &Embedding) -> bool {
    let balls = host.balls(d);
    let near: Vec<usize> = (0..g.n())
        .filter(|&x| {
            let h = f.get(x).unwrap();
            balls.in_s[h] || balls.in_t[h]
        })
        .collect();
    graph_core::components_after_removal(g, &near).iter().all(|c| {
        let arms: Vec<usize> = c.iter().map(|&x| host.locate(f.get(x).unwrap()).expect("interior vertex").0).collect();
        arms.windows(2).all(|w| w[0] == w[1])
    })
}

fn checked(g: &Graph, host: &ThetaHost, d: u32) -> bool {
    let dg = all_pairs_distances(g);
    match embed_into_theta(g, &dg, host, d).unwrap() {
        Some(f) => {
            let v = verify_nc_distortion(g, host.graph(), &dg, host.dist(), &f, d).unwrap();
            assert!(v.is_ok(), "unverified witness");
            if !host.balls(d).overlapping() {
                assert!(components_stay_on_one_arm(g, host, d, &f));
            }
            true
        }
        None => false,
    }
}

#[test]
fn ball_examples() {
    let host = ThetaHost::new(&[10, 10]).unwrap();
    let balls = host.balls(1);
    assert_eq!(balls.b_s().len(), 3);
    assert_eq!(balls.b_s(), vec![0, 2, 11]);
    assert_eq!(balls.b_s2().len(), 5);
    assert!(!balls.overlapping());
    // Positions 2..=8 stay outside the small balls, 3..=7 outside the large ones.
    assert_eq!(balls.arms[0].inner, (3..=9).collect::<Vec<_>>());
    assert_eq!(balls.arms[0].far, (4..=8).collect::<Vec<_>>());
    assert_eq!((balls.arms[0].s_end, balls.arms[0].t_end), (Some(4), Some(8)));
    assert!(!balls.arms[0].short);

    let host = ThetaHost::new(&[5, 20]).unwrap();
    let balls = host.balls(1);
    assert!(balls.arms[0].short && balls.arms[0].far.is_empty());
    assert_eq!(balls.arms[0].s_end, None);
    assert!(!balls.arms[1].short);
    assert!(ThetaHost::new(&[4, 4]).unwrap().balls(1).overlapping());
    assert!(ThetaHost::new(&[1, 1]).is_err());
}

proptest! {
    #[test]
    fn small_balls_sit_inside_large_ones(arms in prop::collection::vec(2usize..12, 2..5), d in 1u32..4) {
        let host = ThetaHost::new(&arms).unwrap();
        let balls = host.balls(d);
        for v in 0..host.graph().n() {
            prop_assert!(!balls.in_s[v] || balls.in_s2[v]);
            prop_assert!(!balls.in_t[v] || balls.in_t2[v]);
            prop_assert_eq!(balls.in_s[v], host.dist().get(0, v) <= d);
        }
        for (i, t) in balls.arms.iter().enumerate() {
            prop_assert!(t.far.iter().all(|v| t.inner.contains(v)));
            prop_assert!(t.inner.iter().all(|&v| host.position_on(i, v).is_some()));
        }
    }
}

/// Maps of every guest vertex to a zone vertex or to "outside", filtered
/// by the conditions the anchor enumeration promises.
fn psi_by_filter(g: &Graph, host: &ThetaHost, d: u32) -> Vec<Psi> {
    let dg = all_pairs_distances(g);
    let dh = host.dist();
    let balls = host.balls(d);
    let zone = balls.zone();
    let far = balls.far();
    let to_far = |h: usize| far.iter().map(|&x| dh.get(h, x)).min().unwrap_or(u32::MAX) as u64;
    let n = g.n();
    let choices = zone.len() + 1;
    let mut out = Vec::new();
    for code in 0..choices.pow(n as u32) {
        let img: Vec<Option<usize>> = (0..n)
            .map(|u| {
                let c = code / choices.pow(u as u32) % choices;
                (c < zone.len()).then(|| zone[c])
            })
            .collect();
        let placed: Vec<(usize, usize)> = (0..n).filter_map(|u| img[u].map(|h| (u, h))).collect();
        let outside: Vec<usize> = (0..n).filter(|&u| img[u].is_none()).collect();
        let d = d as u64;
        let ok = placed.iter().all(|&(u, h)| {
            placed.iter().all(|&(w, x)| {
                let (a, b) = (dg.get(u, w) as u64, dh.get(h, x) as u64);
                u == w || (a <= b && b <= d * a)
            }) && outside.iter().all(|&w| to_far(h) <= d * dg.get(u, w) as u64)
        }) && outside.len() <= far.len()
            && outside.iter().all(|&u| g.degree(u) as u64 <= 2 * d)
            && placed.iter().any(|&(_, h)| balls.in_s[h] || balls.in_t[h]);
        if ok {
            out.push(placed.into_iter().collect());
        }
    }
    out.sort();
    out
}

#[test]
fn psi_enumeration_matches_a_direct_filter() {
    let host = ThetaHost::new(&[3, 3]).unwrap();
    let g = host.graph().clone();
    let dg = all_pairs_distances(&g);
    let balls = host.balls(1);
    let psis = enumerate_psi(&g, &dg, &host, &balls, 1);
    let identity: Psi = (0..g.n()).map(|v| (v, v)).collect();
    assert!(psis.contains(&identity));

    let c6 = cycle_graph(6);
    let dg = all_pairs_distances(&c6);
    let mut psis = enumerate_psi(&c6, &dg, &host, &balls, 1);
    psis.sort();
    // The host is itself a 6-cycle: its 12 automorphisms.
    assert_eq!(psis.len(), 12);
    assert_eq!(psis, psi_by_filter(&c6, &host, 1));

    let host = ThetaHost::new(&[5, 5]).unwrap();
    let balls = host.balls(1);
    for g in [path_graph(4), star_graph(3), cycle_graph(4)] {
        let dg = all_pairs_distances(&g);
        let mut psis = enumerate_psi(&g, &dg, &host, &balls, 1);
        psis.sort();
        assert_eq!(psis, psi_by_filter(&g, &host, 1));
    }
}

#[test]
fn component_classification() {
    let host = ThetaHost::new(&[10, 10]).unwrap();
    let balls = host.balls(1);
    // Arm 0 runs 0, 2, 3, ..., 10, 1.
    let g = path_graph(4);
    let psi: Psi = [(0, 0), (1, 2), (2, 3)].into_iter().collect();
    let comps = classify_components(&g, &host, &balls, &psi).unwrap();
    assert_eq!(comps, vec![Component { vertices: mask(&[2, 3]), role: Role::S, arm: Some(0) }]);

    let g = path_graph(11);
    let arm = host.arm(0).to_vec();
    let psi: Psi = [0, 1, 2, 8, 9, 10].iter().map(|&p| (p, arm[p])).collect();
    let comps = classify_components(&g, &host, &balls, &psi).unwrap();
    assert_eq!(comps, vec![Component { vertices: mask(&[2, 3, 4, 5, 6, 7, 8]), role: Role::Full, arm: Some(0) }]);

    // Anchored vertices of one component on two arms.
    let g = path_graph(3);
    let psi: Psi = [(0, host.arm(0)[3]), (2, host.arm(1)[3])].into_iter().collect();
    assert_eq!(classify_components(&g, &host, &balls, &psi), None);
}

#[test]
fn configuration_examples() {
    let cfgs = enumerate_configurations(&[], 3);
    assert_eq!(cfgs.len(), 1);
    assert!(cfgs[0].plans.iter().all(|p| p.form == Form::Empty && p.form.number() == 5));
    assert_eq!(cfgs[0].empty_arms(), vec![0, 1, 2]);

    let s = Component { vertices: 1, role: Role::S, arm: None };
    let cfgs = enumerate_configurations(std::slice::from_ref(&s), 2);
    assert_eq!(cfgs.len(), 2);
    assert!(cfgs.iter().all(|c| c.plans.iter().filter(|p| p.form == Form::SComponent).count() == 1));
    let pinned = Component { arm: Some(1), ..s.clone() };
    assert_eq!(enumerate_configurations(&[pinned], 2).len(), 1);

    let t = Component { vertices: 2, role: Role::T, arm: None };
    let full = Component { vertices: 4, role: Role::Full, arm: None };
    let cfgs = enumerate_configurations(&[s.clone(), t.clone(), full.clone()], 2);
    // The full component takes an arm alone, s and t share the other.
    assert_eq!(cfgs.len(), 2);
    for c in &cfgs {
        let mut forms: Vec<u8> = c.plans.iter().map(|p| p.form.number()).collect();
        forms.sort();
        assert_eq!(forms, vec![3, 4]);
    }
    let many: Vec<Component> = (0..5).map(|i| Component { vertices: 1 << i, role: Role::S, arm: None }).collect();
    assert!(enumerate_configurations(&many, 2).is_empty());
    for k in 2..=3 {
        for a in 0..=2 * k {
            let comps: Vec<Component> = (0..a)
                .map(|i| Component { vertices: 1 << i, role: [Role::S, Role::T, Role::Full][i % 3], arm: None })
                .collect();
            assert!(enumerate_configurations(&comps, k).len() <= k.pow(2 * k as u32));
        }
    }
}

#[test]
fn last_vertex_examples() {
    let g = path_graph(6);
    let dg = all_pairs_distances(&g);
    assert_eq!(last_vertex_candidates(mask(&[3]), 0, &dg, 1), mask(&[3]));
    assert_eq!(last_vertex_candidates(mask(&[1, 2, 3, 4, 5]), 0, &dg, 1), mask(&[4, 5]));
    assert_eq!(last_vertex_candidates(mask(&[1, 2, 3, 4, 5]), 0, &dg, 2), mask(&[1, 2, 3, 4, 5]));
}

#[test]
fn shortest_component_examples() {
    let opts = LineOptions::default();
    let g = path_graph(2);
    let dg = all_pairs_distances(&g);
    let fixed: BTreeMap<usize, usize> = [(0, 3)].into_iter().collect();
    let f = shortest_component_embedding(&dg, mask(&[1]), &fixed, 20, 20, 1, 1, &opts).unwrap().unwrap();
    assert_eq!(f, [(0, 3), (1, 4)].into_iter().collect());

    // A two-vertex tail at d = 2: compare with the least last position over
    // all placements after the anchor.
    let g = path_graph(3);
    let dg = all_pairs_distances(&g);
    let f = shortest_component_embedding(&dg, mask(&[1, 2]), &fixed, 20, 20, 2, 2, &opts).unwrap().unwrap();
    let ok = |p: usize, q: usize| {
        let pairs = [(0, 1, 3, p), (0, 2, 3, q), (1, 2, p, q)];
        p != q
            && pairs.iter().all(|&(x, y, a, b)| {
                let (e, h) = (dg.get(x, y) as usize, a.abs_diff(b));
                e <= h && h <= 2 * e
            })
    };
    let best =
        (4..20).flat_map(|p| (4..20).map(move |q| (p, q))).filter(|&(p, q)| q > p && ok(p, q)).map(|(_, q)| q).min();
    assert_eq!(f.get(&2).copied(), best);
    assert!(f[&2] + 1 >= 3);

    let host = ThetaHost::new(&[6, 9]).unwrap();
    let g = path_graph(8);
    let dg = all_pairs_distances(&g);
    let fixed: BTreeMap<usize, usize> = [(0, 0), (1, 1), (2, 2)].into_iter().collect();
    for last in 3..8 {
        if let Some(f) =
            shortest_component_embedding(&dg, mask(&[3, 4, 5, 6, 7]), &fixed, 9, 6, last, 1, &opts).unwrap()
        {
            assert!(f[&last] + 1 >= 8);
            assert!(f.values().all(|&p| p <= f[&last]));
        }
    }
    assert_eq!(host.lengths(), &[6, 9]);
}

#[test]
fn solver_examples() {
    let host = ThetaHost::new(&[3, 3]).unwrap();
    let g = host.graph().clone();
    assert!(checked(&g, &host, 1));
    let host = ThetaHost::new(&[3, 3, 3]).unwrap();
    assert!(checked(&cycle_graph(6), &host, 1));
    let host = ThetaHost::new(&[5, 5, 5]).unwrap();
    for d in 1..=3 {
        assert_eq!(checked(&star_graph(4), &host, d), oracle_feasible(&star_graph(4), &host, d), "d = {d}");
    }
    // The isometric 17-cycle of theta(5, 12) needs distances around the
    // short arm.
    let host = ThetaHost::new(&[5, 12]).unwrap();
    assert!(checked(&cycle_graph(17), &host, 1));
    assert!(!checked(&cycle_graph(16), &host, 1));
    assert!(checked(&path_graph(9), &host, 1));
    assert!(!checked(&path_graph(10), &host, 1));
}

#[test]
fn rejects_bad_input() {
    let host = ThetaHost::new(&[5, 5]).unwrap();
    let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
    let dg = all_pairs_distances(&g);
    assert!(matches!(embed_into_theta(&g, &dg, &host, 1), Err(SolveError::Input(_))));
    let g = path_graph(3);
    let dg = all_pairs_distances(&g);
    assert!(matches!(embed_into_theta(&g, &dg, &host, 0), Err(SolveError::Input(_))));
    let w = Graph::from_weighted_edges(2, &[(0, 1, 2)]).unwrap();
    let dw = all_pairs_distances(&w);
    assert!(matches!(embed_into_theta(&w, &dw, &host, 1), Err(SolveError::Input(_))));
    let g = path_graph(20);
    let dg = all_pairs_distances(&g);
    assert_eq!(embed_into_theta(&g, &dg, &host, 3).unwrap(), None);
}

fn theta_hosts(max_k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut arms = vec![1];
    loop {
        if arms.len() >= 2 && arms.iter().filter(|&&l| l == 1).count() <= 1 {
            out.push(arms.clone());
        }
        // Next non-decreasing sequence.
        if arms.len() < max_k {
            let last = *arms.last().unwrap();
            arms.push(last);
            continue;
        }
        while let Some(l) = arms.pop() {
            if l < max_len {
                arms.push(l + 1);
                break;
            }
        }
        if arms.is_empty() {
            return out;
        }
    }
}

#[test]
fn matches_oracle_on_small_hosts() {
    let hosts = theta_hosts(3, 4);
    assert_eq!(hosts.len(), 9 + 16);
    let mut feasible = 0;
    for arms in hosts {
        let host = ThetaHost::new(&arms).unwrap();
        for n in 1..=5 {
            for g in connected_graphs(n) {
                for d in 1..=2 {
                    let got = checked(&g, &host, d);
                    assert_eq!(
                        got,
                        oracle_feasible(&g, &host, d),
                        "{arms:?} {:?} d={d}",
                        g.edges().collect::<Vec<_>>()
                    );
                    feasible += got as usize;
                }
            }
        }
    }
    assert_eq!(feasible, 636);
}

/// Connected pieces of the host, sometimes with one extra chord.
fn host_piece(rng: &mut impl Rng, h: &Graph, n: usize) -> Graph {
    let mut keep = vec![rng.gen_range(0..h.n())];
    while keep.len() < n {
        let cand: Vec<usize> =
            keep.iter().flat_map(|&x| h.neighbors(x).to_vec()).filter(|y| !keep.contains(y)).collect();
        if cand.is_empty() {
            break;
        }
        keep.push(cand[rng.gen_range(0..cand.len())]);
    }
    keep.sort();
    let g = h.induced(&keep);
    let (a, b) = (rng.gen_range(0..g.n()), rng.gen_range(0..g.n()));
    if rng.gen_bool(0.5) && a != b && !g.has_edge(a, b) {
        let mut e: Vec<_> = g.edges().collect();
        e.push((a.min(b), a.max(b)));
        return Graph::from_edges(g.n(), &e).unwrap();
    }
    g
}

#[test]
fn matches_oracle_on_long_arms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut total, mut feasible) = (0, 0);
    for arms in [vec![5, 12], vec![5, 5, 14], vec![6, 15], vec![5, 7, 11], vec![6, 6, 6]] {
        let host = ThetaHost::new(&arms).unwrap();
        assert!(!host.balls(1).overlapping());
        let mut guests: Vec<Graph> = (2..=14).map(path_graph).chain((3..=17).map(cycle_graph)).collect();
        guests.extend((0..60).map(|i| host_piece(&mut rng, host.graph(), 5 + i % 11)));
        guests.extend((0..20).map(|i| random_connected(&mut rng, 7 + i % 6, 3, i % 2)));
        for g in guests.iter().filter(|g| g.is_connected()) {
            let got = checked(g, &host, 1);
            assert_eq!(got, oracle_feasible(g, &host, 1), "{arms:?} {:?}", g.edges().collect::<Vec<_>>());
            total += 1;
            feasible += got as usize;
        }
    }
    assert_eq!((total, feasible), (540, 184));
}

#[test]
fn two_arms_agree_with_the_cycle_solver() {
    let opts = Options { cross_check_cycle: true, ..Options::default() };
    for a in 1..=6 {
        for b in a.max(2)..=6 {
            let host = ThetaHost::new(&[a, b]).unwrap();
            for n in 1..=5 {
                for g in connected_graphs(n) {
                    let dg: DistanceMatrix = all_pairs_distances(&g);
                    for d in 1..=2 {
                        let theta = embed_into_theta_with(&g, &dg, &host, d, &opts).unwrap().embedding.is_some();
                        let cycle = embed_into_cycle(&g, &dg, a + b, d).unwrap().is_some();
                        assert_eq!(theta, cycle, "[{a}, {b}] d={d}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn random_instances_match_oracle(
        arms in prop::collection::vec(5usize..9, 2..4),
        n in 3usize..9,
        extra in 0usize..3,
        seed in any::<u64>(),
    ) {
        let host = ThetaHost::new(&arms).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(&mut rng, n, 3, extra);
        prop_assert_eq!(checked(&g, &host, 1), oracle_feasible(&g, &host, 1));
    }
}
