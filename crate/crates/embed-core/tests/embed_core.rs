use std::collections::BTreeMap;

use embed_core::*;
use graph_core::corpus::{connected_graphs, cycle_graph, path_graph, random_connected, star_graph, trees};
use graph_core::{all_pairs_distances, DistanceMatrix, Graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(g: &Graph, h: &Graph) -> (DistanceMatrix, DistanceMatrix) {
    (all_pairs_distances(g), all_pairs_distances(h))
}

fn r(a: u64, b: u64) -> Ratio<u64> {
    Ratio::new(a, b)
}

#[test]
fn report_examples() {
    let c6 = cycle_graph(6);
    let (d6, _) = ctx(&c6, &c6);
    let id = Embedding::from_images(&[0, 1, 2, 3, 4, 5]);
    let rep = distortion_report(&c6, &c6, &d6, &d6, &id).unwrap();
    assert_eq!((rep.expansion, rep.contraction, rep.distortion), (r(1, 1), r(1, 1), r(1, 1)));

    let p2 = path_graph(2);
    let (dp, _) = ctx(&p2, &c6);
    let anti = Embedding::from_images(&[0, 3]);
    let rep = distortion_report(&p2, &c6, &dp, &d6, &anti).unwrap();
    assert_eq!((rep.expansion, rep.contraction, rep.distortion), (r(3, 1), r(1, 3), r(1, 1)));
    assert!(rep.is_non_contracting());

    let c4 = cycle_graph(4);
    let c8 = cycle_graph(8);
    let (d4, d8) = ctx(&c4, &c8);
    let dbl = Embedding::from_images(&[0, 2, 4, 6]);
    // i -> 2i is an isometry scaled by 2: every pair expands by exactly 2.
    let rep = distortion_report(&c4, &c8, &d4, &d8, &dbl).unwrap();
    assert_eq!((rep.expansion, rep.contraction, rep.distortion), (r(2, 1), r(1, 2), r(1, 1)));
    assert_eq!(fmt_ratio(&rep.expansion), "2/1");
}

#[test]
fn report_rejects_bad_maps() {
    let p3 = path_graph(3);
    let c8 = cycle_graph(8);
    let (dg, dh) = ctx(&p3, &c8);
    let collapse = Embedding::from_images(&[0, 1, 1]);
    assert!(matches!(distortion_report(&p3, &c8, &dg, &dh, &collapse), Err(EmbedError::NotInjective { .. })));
    assert!(matches!(
        verify_nc_distortion(&p3, &c8, &dg, &dh, &collapse, 3),
        Err(EmbedError::NotInjective { a: 1, b: 2, host: 1 })
    ));
    let partial = Embedding::new(3, BTreeMap::from([(0, 0), (1, 1)]));
    assert!(matches!(distortion_report(&p3, &c8, &dg, &dh, &partial), Err(EmbedError::Partial { missing: 2 })));
}

#[test]
fn verify_examples() {
    let c6 = cycle_graph(6);
    let d6 = all_pairs_distances(&c6);
    assert!(verify_nc_distortion(&c6, &c6, &d6, &d6, &Embedding::from_images(&[0, 1, 2, 3, 4, 5]), 1).unwrap().is_ok());
    let c4 = cycle_graph(4);
    let c8 = cycle_graph(8);
    let (d4, d8) = ctx(&c4, &c8);
    let dbl = Embedding::from_images(&[0, 2, 4, 6]);
    assert!(verify_nc_distortion(&c4, &c8, &d4, &d8, &dbl, 2).unwrap().is_ok());
    assert_eq!(
        verify_nc_distortion(&c4, &c8, &d4, &d8, &dbl, 1).unwrap(),
        Verification::Violation { u: 0, v: 1, guest_dist: 1, host_dist: 2, kind: ViolationKind::Expansion }
    );
}

#[test]
fn subdivision_examples() {
    let c3 = cycle_graph(3);
    let rb = subdivide_red_blue(&c3, 1);
    assert_eq!(rb.graph.n(), 6);
    assert!(rb.graph.is_connected() && rb.graph.max_degree() == 2 && rb.graph.edge_count() == 6);
    for (u, v) in rb.graph.edges() {
        assert_ne!(rb.red[u], rb.red[v], "colours alternate");
    }
    let same = subdivide_red_blue(&c3, 0);
    assert_eq!(same.graph, c3);
    assert!(same.red.iter().all(|&x| x));
    let p = subdivide_red_blue(&path_graph(2), 3);
    assert_eq!(p.graph.n(), 5);
    assert_eq!(all_pairs_distances(&p.graph).get(0, 1), 4);
}

#[test]
fn bijective_gate_examples() {
    let c3 = cycle_graph(3);
    for d in 1..4 {
        assert!(bijective_reduction_gate(&subdivide_red_blue(&c3, 0), d));
        assert!(bijective_reduction_gate(&subdivide_red_blue(&c3, d), d));
        assert!(!bijective_reduction_gate(&subdivide_red_blue(&c3, d + 1), d));
    }
    assert!(bijective_reduction_gate(&subdivide_red_blue(&c3, 2), 2));
}

#[test]
fn union_examples() {
    let a = BTreeMap::from([(0, 0)]);
    let b = BTreeMap::from([(0, 0), (1, 2)]);
    let u = union_embedding(2, &[a.clone(), b]).unwrap();
    assert_eq!(u.map(), &BTreeMap::from([(0, 0), (1, 2)]));
    assert!(u.is_total());
    let c = BTreeMap::from([(0, 1)]);
    assert_eq!(union_embedding(2, &[a, c]), Err(EmbedError::Conflict { vertex: 0, first: 0, second: 1 }));
    let arcs = [
        BTreeMap::from([(0, 0), (1, 1), (2, 2)]),
        BTreeMap::from([(2, 2), (3, 3), (4, 4)]),
        BTreeMap::from([(4, 4), (5, 5), (0, 0)]),
    ];
    assert_eq!(union_embedding(6, &arcs).unwrap(), Embedding::from_images(&[0, 1, 2, 3, 4, 5]));
}

#[test]
fn json_keys_are_numeric_order() {
    let f = Embedding::from_images(&[5, 4, 3, 2, 1, 0, 9, 8, 7, 6, 10, 11]);
    let s = EmbeddingJson::new(&f, None).to_json();
    assert!(s.starts_with("{\"map\":{\"0\":5,\"1\":4,\"2\":3"));
    assert!(s.find("\"9\"").unwrap() < s.find("\"10\"").unwrap());
    let back = EmbeddingJson::parse(&s).unwrap();
    assert_eq!(back.embedding(12), f);
}

#[test]
fn json_carries_ratios() {
    let c4 = cycle_graph(4);
    let c8 = cycle_graph(8);
    let (d4, d8) = ctx(&c4, &c8);
    let f = Embedding::from_images(&[0, 2, 4, 6]);
    let rep = distortion_report(&c4, &c8, &d4, &d8, &f).unwrap();
    let s = EmbeddingJson::new(&f, Some(&rep)).to_json();
    assert_eq!(s, r#"{"map":{"0":0,"1":2,"2":4,"3":6},"expansion":"2/1","contraction":"1/2","distortion":"1/1"}"#);
}

#[test]
fn dot_marks_preimages_and_colours() {
    let rb = subdivide_red_blue(&path_graph(2), 1);
    let f = Embedding::from_images(&[1]);
    let dot = host_dot(&rb.graph, Some(&f), Some(&rb.red));
    assert!(dot.contains("1 [label=\"1:0\", color=red, style=filled"));
    assert!(dot.contains("2 [label=\"2\", color=blue]"));
    assert!(dot.contains("0 -- 2;"));
}

// Independent test oracle: all injections of the guest into the allowed host
// vertices, accepting when guest metric `dg` and host metric `dh` satisfy the
// non-contracting bound with expansion at most `d`.
fn exists_nc(dg: &DistanceMatrix, dh: &DistanceMatrix, allowed: &[usize], d: Ratio<u64>) -> bool {
    fn rec(
        i: usize,
        img: &mut Vec<usize>,
        dg: &DistanceMatrix,
        dh: &DistanceMatrix,
        allowed: &[usize],
        d: Ratio<u64>,
    ) -> bool {
        if i == dg.n() {
            return true;
        }
        for &x in allowed {
            if img.contains(&x) {
                continue;
            }
            let ok = (0..i).all(|j| {
                let a = dg.get(i, j) as u64;
                let b = dh.get(x, img[j]) as u64;
                b >= a && b * d.denom() <= a * d.numer()
            });
            if ok {
                img.push(x);
                if rec(i + 1, img, dg, dh, allowed, d) {
                    return true;
                }
                img.pop();
            }
        }
        false
    }
    rec(0, &mut Vec::new(), dg, dh, allowed, d)
}

// General (possibly contracting) distortion by enumerating all injections.
fn exists_general(g: &Graph, h: &Graph, d: Ratio<u64>) -> bool {
    let (dg, dh) = ctx(g, h);
    let n = g.n();
    fn rec(i: usize, img: &mut Vec<usize>, n: usize, nh: usize, found: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if i == n {
            return found(img);
        }
        for x in 0..nh {
            if !img.contains(&x) {
                img.push(x);
                if rec(i + 1, img, n, nh, found) {
                    return true;
                }
                img.pop();
            }
        }
        false
    }
    let mut check = |img: &[usize]| {
        let f = Embedding::from_images(img);
        distortion_report(g, h, &dg, &dh, &f).unwrap().distortion <= d
    };
    rec(0, &mut Vec::new(), n, h.n(), &mut check)
}

fn pipeline(g: &Graph, h: &Graph, d: Ratio<u64>) -> bool {
    let dg = all_pairs_distances(g);
    gen_reduction_instances(g, h, *d.numer(), *d.denom(), DEFAULT_REDUCTION_BUDGET)
        .unwrap()
        .any(|inst| exists_nc(&inst.guest_distances(&dg), &inst.host_distances(), &inst.host.red_vertices(), inst.d))
}

#[test]
fn reduction_examples() {
    let p2 = path_graph(2);
    let p3 = path_graph(3);
    let first = gen_reduction_instances(&p2, &p3, 2, 1, 100).unwrap().next().unwrap();
    assert_eq!((first.host.p, first.guest_scale, first.integer_d()), (0, 1, Some(2)));
    assert!(pipeline(&p2, &p3, r(2, 1)));
    assert!(!pipeline(&cycle_graph(4), &path_graph(4), r(1, 1)));
    assert!(matches!(gen_reduction_instances(&p2, &p3, 2, 1, 0), Err(EmbedError::ReductionBudget { .. })));
}

// The reduction is exact for the general problem, including fractional
// distortion and embeddings that contract.
#[test]
fn reduction_matches_general_search() {
    let guests = [path_graph(3), path_graph(4), cycle_graph(4), star_graph(3), cycle_graph(3)];
    let hosts = [path_graph(4), cycle_graph(5), star_graph(3), path_graph(5)];
    for g in &guests {
        for h in &hosts {
            if g.n() > h.n() {
                continue;
            }
            for d in [r(1, 1), r(3, 2), r(2, 1), r(5, 2), r(3, 1)] {
                assert_eq!(
                    pipeline(g, h, d),
                    exists_general(g, h, d),
                    "{:?} {:?} {d}",
                    g.edges().collect::<Vec<_>>(),
                    h.edges().collect::<Vec<_>>()
                );
            }
        }
    }
}

#[test]
fn subdivision_distance_law_exhaustive() {
    let mut hosts: Vec<Graph> = (1..=6).flat_map(connected_graphs).collect();
    hosts.extend((7..=9).flat_map(trees));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    hosts.extend((0..20).map(|i| random_connected(&mut rng, 10 + i % 3, 4, 5)));
    for h in &hosts {
        let dh = all_pairs_distances(h);
        for p in 0..=4 {
            let rb = subdivide_red_blue(h, p);
            let d2 = all_pairs_distances(&rb.graph);
            assert_eq!(rb.graph.edge_count(), h.edge_count() * (p as usize + 1));
            for u in 0..h.n() {
                for v in 0..h.n() {
                    assert_eq!(d2.get(u, v), (p + 1) * dh.get(u, v));
                }
            }
        }
    }
}

fn arb_instance() -> impl Strategy<Value = (Graph, Graph, Vec<usize>)> {
    (2usize..=6, 0usize..=4, any::<u64>()).prop_map(|(n, extra_host, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(&mut rng, n, 3, 2);
        let h = random_connected(&mut rng, n + extra_host, 3, 3);
        let mut hosts: Vec<usize> = (0..h.n()).collect();
        rand::seq::SliceRandom::shuffle(&mut hosts[..], &mut rng);
        hosts.truncate(n);
        (g, h, hosts)
    })
}

proptest! {
    #[test]
    fn verify_agrees_with_report((g, h, img) in arb_instance(), d in 1u32..5) {
        let (dg, dh) = ctx(&g, &h);
        let f = Embedding::from_images(&img);
        let rep = distortion_report(&g, &h, &dg, &dh, &f).unwrap();
        let ok = verify_nc_distortion(&g, &h, &dg, &dh, &f, d).unwrap().is_ok();
        prop_assert_eq!(ok, rep.is_non_contracting() && rep.expansion <= Ratio::from_integer(d as u64));
        prop_assert_eq!(rep.distortion, rep.expansion * rep.contraction);
    }

    #[test]
    fn verify_is_monotone_in_d((g, h, img) in arb_instance(), d in 1u32..5) {
        let (dg, dh) = ctx(&g, &h);
        let f = Embedding::from_images(&img);
        if verify_nc_distortion(&g, &h, &dg, &dh, &f, d).unwrap().is_ok() {
            prop_assert!(verify_nc_distortion(&g, &h, &dg, &dh, &f, d + 1).unwrap().is_ok());
        }
    }

    #[test]
    fn total_distortion_at_least_one((g, h, img) in arb_instance()) {
        let (dg, dh) = ctx(&g, &h);
        let rep = distortion_report(&g, &h, &dg, &dh, &Embedding::from_images(&img)).unwrap();
        prop_assert!(rep.distortion >= Ratio::from_integer(1));
    }
}
