use pdsp_core::geodesics::{is_geodesic, DistanceOracle};
use pdsp_core::instances::gen::{corpus, gen_grid, path_instance, TerminalScheme, WeightScheme};
use pdsp_core::instances::{annotate, make_nice, NiceInstance, NiceOutcome};
use pdsp_core::pipeline::{prepare, NiceReport, Preparation};
use pdsp_core::plane::{edge_of, rev};
use pdsp_core::rings::{dag_structure, DagStructure, decompose, split_sets, RingDecomposition};
use pdsp_core::skeleton::{check_tree, dualize_skeleton, follow, geodesic_steiner_tree, refine, ring_linkage};
use pdsp_core::{Dsp, Rational};
use proptest::prelude::*;

fn nice(inst: &Dsp) -> Vec<NiceInstance<Rational>> {
    match make_nice(inst).unwrap() {
        NiceOutcome::Instances(v) => v,
        NiceOutcome::NoReport => Vec::new(),
    }
}

#[test]
fn single_pair_tree_is_one_geodesic() {
    let inst = nice(&gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::Corners, 0)).remove(0).inst;
    let t = geodesic_steiner_tree(&inst).unwrap();
    assert_eq!(t.spinal.len(), 1);
    let o = DistanceOracle::new(&inst.graph);
    assert!(is_geodesic(&inst.graph, &o, &t.spinal_vertices(&inst.graph)[0]).unwrap());
    assert_eq!(t.principal.len(), 2);
}

#[test]
fn collinear_pairs_on_a_path() {
    let inst = nice(&path_instance(6, &[(0, 2), (3, 5)])).remove(0).inst;
    let t = geodesic_steiner_tree(&inst).unwrap();
    assert!(t.spinal.len() <= 3);
    check_tree(&inst.graph, &t, &inst.terminals()).unwrap();
}

#[test]
fn two_pair_grid_spinal_paths_are_geodesic() {
    for ni in nice(&gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::CrossCorners, 0)) {
        let g = &ni.inst.graph;
        let o = DistanceOracle::new(g);
        let t = geodesic_steiner_tree(&ni.inst).unwrap();
        for p in t.spinal_vertices(g) {
            assert!(is_geodesic(g, &o, &p).unwrap());
        }
    }
}

#[test]
fn linkage_examples() {
    let inst = nice(&path_instance(3, &[(0, 2)])).remove(0).inst;
    let g = &inst.graph;
    let o = DistanceOracle::new(g);
    let t = geodesic_steiner_tree(&inst).unwrap();
    let d = decompose(&inst, &o, &t.principal).unwrap();
    let st = dag_structure(g, &o, &inst.pairs, &d.rings[0]).unwrap();
    let one = ring_linkage(g, &st, 1).unwrap();
    assert_eq!(one.len(), 1);
    assert!(ring_linkage(g, &st, 2).is_none());
}

#[test]
fn linkage_over_split_rings() {
    let nested = nice(&path_instance(6, &[(0, 5), (1, 4)])).remove(0).inst;
    let o = DistanceOracle::new(&nested.graph);
    let t = geodesic_steiner_tree(&nested).unwrap();
    let d = decompose(&nested, &o, &t.principal).unwrap();
    let wide = d.rings.iter().find(|r| split_sets(&nested.pairs, &r.x, &r.y).unwrap().split.len() == 2).unwrap();
    let st = dag_structure(&nested.graph, &o, &nested.pairs, wide).unwrap();
    assert!(ring_linkage(&nested.graph, &st, 2).is_none());


    let g = gen_grid(2, 4, WeightScheme::Unit, TerminalScheme::Corners, 0).graph;
    let arcs: Vec<usize> = (0..g.num_darts()).filter(|&a| g.head(a) == g.tail(a) + 1).collect();
    let rows = DagStructure { vertices: (0..8).collect(), arcs: arcs.clone(), t_x: vec![0, 4], t_y: vec![3, 7] };
    let paths = ring_linkage(&g, &rows, 2).unwrap();
    let mut got: Vec<Vec<usize>> = paths.iter().map(|p| p.vertices.clone()).collect();
    got.sort();
    assert_eq!(got, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    for p in &paths {
        assert!(p.darts.iter().all(|a| arcs.contains(a)));
    }
    assert!(ring_linkage(&g, &rows, 3).is_none());
}

#[test]
fn refine_without_rings_keeps_the_tree() {
    let inst = nice(&gen_grid(2, 3, WeightScheme::Unit, TerminalScheme::Corners, 0)).remove(0).inst;
    let dap = annotate(&inst).unwrap();
    let t = geodesic_steiner_tree(&inst).unwrap();
    let empty = RingDecomposition { t_hat: t.principal.clone(), rings: Vec::new() };
    let (out, t2, stats) = refine(&inst, &dap.ann, &t, &empty, &[]).unwrap();
    assert_eq!((out.dap.graph.n(), out.dap.graph.m()), (inst.graph.n(), inst.graph.m()));
    assert_eq!(t2.in_edge, t.in_edge);
    assert_eq!(stats.subdivided, 0);
}

#[test]
fn refine_with_a_ring_spans_the_terminals() {
    for (name, inst) in corpus() {
        for ni in nice(&inst) {
            let mut r = NiceReport::default();
            if let Preparation::Ready(p) = prepare(ni, &mut r).unwrap() {
                let terms = p.refined.dap.terminals();
                check_tree(&p.refined.dap.graph, &p.refined_tree, &terms).unwrap();
                assert!(r.refine.spinal_paths <= 6 * r.k, "{name}: {}", r.refine.spinal_paths);
            }
        }
    }
}

#[test]
fn single_edge_skeleton_is_a_dual_path() {
    let inst = nice(&path_instance(2, &[(0, 1)])).remove(0).inst;
    let dap = annotate(&inst).unwrap();
    let t = geodesic_steiner_tree(&inst).unwrap();
    let (out, sk, _) = dualize_skeleton(&dap, &t).unwrap();
    assert_eq!(sk.spinal.len(), 1);
    let g = &out.dap.graph;
    let p = &sk.spinal[0];
    let ends = [g.left(p[0]), g.right(*p.last().unwrap())];
    assert!(ends.contains(&sk.terminal_faces[0]) && ends.contains(&sk.terminal_faces[1]));
    for w in p.windows(2) {
        assert_eq!(g.right(w[0]), g.left(w[1]));
    }
}

#[test]
fn skeleton_shape_on_corpus() {
    for (name, inst) in corpus() {
        for ni in nice(&inst) {
            let mut r = NiceReport::default();
            if let Preparation::Ready(_) = prepare(ni, &mut r).unwrap() {
                assert!(r.skeleton_spinal <= r.skeleton_bound, "{name}");
                assert!(r.steiner_geodesic, "{name}");
            }
        }
    }
}

#[test]
fn follow_sides_cover_every_corner() {
    let g = gen_grid(3, 4, WeightScheme::Unit, TerminalScheme::Corners, 0).graph;
    let path = [0usize, 1, 5, 6, 10, 11];
    let darts: Vec<usize> = path.windows(2).map(|w| g.find_dart(w[0], w[1]).unwrap()).collect();
    let back: Vec<usize> = darts.iter().rev().map(|&d| rev(d)).collect();
    let right = follow(&g, &darts);
    let left = follow(&g, &back);
    let expected: usize = path[1..path.len() - 1].iter().map(|&v| g.degree(v) - 2).sum();
    assert_eq!(right.len() + left.len(), expected);
    assert!(right.iter().all(|d| !left.iter().any(|x| edge_of(*x) == edge_of(*d))));
    for w in right.windows(2) {
        assert_eq!(g.right(w[0]), g.left(w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn follow_walks_are_disjoint(rows in 2usize..4, cols in 2usize..5, k in 1usize..4, seed in 0u64..1000) {
        prop_assume!(2 * k <= rows * cols);
        let inst = gen_grid(rows, cols, WeightScheme::Random { lo: 1, hi: 3 }, TerminalScheme::Random { k }, seed);
        for ni in nice(&inst) {
            let mut r = NiceReport::default();
            if let Preparation::Ready(p) = prepare(ni, &mut r).unwrap() {
                let mut used = vec![false; p.dual.dap.graph.m()];
                for w in &p.skeleton.follow {
                    for &d in w {
                        prop_assert!(!used[edge_of(d)]);
                        used[edge_of(d)] = true;
                    }
                }
                prop_assert!(r.skeleton_spinal <= r.skeleton_bound);
            }
        }
    }
}
