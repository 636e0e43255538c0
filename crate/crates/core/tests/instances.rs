use pdsp_core::geodesics::{is_geodesic, st_dag, DistanceOracle};
use pdsp_core::instances::gen::{corpus, crafted, from_coordinates, gen_grid, gen_random_dag, gen_spiral, path_instance, TerminalScheme, WeightScheme};
use pdsp_core::instances::io::{dap_from_json, dap_to_json, dsp_from_json, dsp_to_json, solution_from_json, solution_to_json};
use pdsp_core::instances::oracle::{solve_dag, solve_dap, solve_dsp, Limits};
use pdsp_core::instances::{all_ok, annotate, check_dsp, is_nice, make_nice, reduce_dag_to_dsp, DagInstance, DspInstance, NiceOutcome, Solution};
use pdsp_core::{q, Dsp, Error};
use proptest::prelude::*;

fn nices(inst: &Dsp) -> Vec<Dsp> {
    match make_nice(inst).unwrap() {
        NiceOutcome::Instances(v) => v.into_iter().map(|n| n.inst).collect(),
        NiceOutcome::NoReport => Vec::new(),
    }
}

#[test]
fn already_nice_instance_is_kept() {
    let inst = path_instance(4, &[(0, 3)]);
    let out = nices(&inst);
    assert_eq!(out.len(), 1);
    assert!(is_nice(&out[0]));
    assert_eq!((out[0].graph.n(), out[0].graph.m()), (6, 5));
}

#[test]
fn separated_terminals_report_no() {
    let g = from_coordinates(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (4.0, 0.0)], &[(0, 1, q(1, 1)), (2, 3, q(1, 1))], None);
    let inst = DspInstance { graph: g, pairs: vec![(0, 3)] };
    assert_eq!(make_nice(&inst).unwrap(), NiceOutcome::NoReport);
    let rep = path_instance(4, &[(0, 2), (2, 3)]);
    assert_eq!(make_nice(&rep).unwrap(), NiceOutcome::NoReport);
}

#[test]
fn grid_corner_pair_keeps_only_dag_edges() {
    let inst = gen_grid(3, 3, WeightScheme::Random { lo: 1, hi: 5 }, TerminalScheme::Corners, 7);
    let o = DistanceOracle::new(&inst.graph);
    let dag = st_dag(&inst.graph, &o, 0, 8).unwrap();
    let out = nices(&inst);
    assert_eq!(out.len(), 1);
    assert!(is_nice(&out[0]));
    assert_eq!(out[0].graph.m(), dag.arcs.len() + 2);
}

#[test]
fn annotation_examples() {
    let p = nices(&path_instance(3, &[(0, 2)])).remove(0);
    let dap = annotate(&p).unwrap();
    assert_eq!(dap.ann[0].iter().filter(|&&b| b).count(), p.graph.m());

    let sq = from_coordinates(
        &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        &[(0, 1, q(1, 1)), (1, 2, q(1, 1)), (2, 3, q(1, 1)), (3, 0, q(1, 1))],
        Some(0),
    );
    let dap = annotate(&DspInstance { graph: sq, pairs: vec![(0, 2)] }).unwrap();
    assert_eq!(dap.ann[0].iter().filter(|&&b| b).count(), 4);

    let cross = gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::CrossCorners, 0);
    let dap = annotate(&cross).unwrap();
    assert_ne!(dap.ann[0], dap.ann[1]);
    let shared = (0..dap.graph.m()).filter(|&e| {
        let a = dap.ann[0][2 * e] || dap.ann[0][2 * e + 1];
        let b = dap.ann[1][2 * e] || dap.ann[1][2 * e + 1];
        a && b
    });
    assert!(shared.count() > 0);
}

fn dag_of(points: &[(f64, f64)], arcs: &[(usize, usize)], pairs: Vec<(usize, usize)>) -> DagInstance<pdsp_core::Rational> {
    let edges: Vec<_> = arcs.iter().map(|&(u, v)| (u, v, q(1, 1))).collect();
    let graph = from_coordinates(points, &edges, None);
    let arcs = (0..graph.m()).map(|e| 2 * e).collect();
    DagInstance { graph, arcs, pairs }
}

#[test]
fn dag_reduction_examples() {
    let single = dag_of(&[(0.0, 0.0), (1.0, 0.0)], &[(0, 1)], vec![(0, 1)]);
    let r = reduce_dag_to_dsp(&single).unwrap().unwrap();
    assert_eq!((r.inst.graph.n(), r.inst.graph.m()), (2, 1));

    let skip = dag_of(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)], &[(0, 1), (1, 2), (0, 2)], vec![(0, 2)]);
    let r = reduce_dag_to_dsp(&skip).unwrap().unwrap();
    assert_eq!(r.order, vec![0, 1, 2]);
    assert_eq!((r.inst.graph.n(), r.inst.graph.m()), (4, 4));

    let back = dag_of(&[(0.0, 0.0), (1.0, 0.0)], &[(0, 1)], vec![(1, 0)]);
    assert!(reduce_dag_to_dsp(&back).unwrap().is_none());
}

#[test]
fn four_vertex_dag_with_two_pairs() {
    let d = dag_of(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)], &[(0, 1), (2, 3), (0, 3), (2, 1)], vec![(0, 1), (2, 3)]);
    let r = reduce_dag_to_dsp(&d).unwrap().unwrap();
    let lim = Limits::default();
    assert_eq!(solve_dag(&d, lim).unwrap().is_some(), solve_dsp(&r.inst, lim).unwrap().is_some());
}

#[test]
fn generators_are_deterministic() {
    let a = gen_grid(3, 3, WeightScheme::Random { lo: 1, hi: 5 }, TerminalScheme::Corners, 7);
    let b = gen_grid(3, 3, WeightScheme::Random { lo: 1, hi: 5 }, TerminalScheme::Corners, 7);
    assert_eq!(a, b);
    assert_eq!(gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::Corners, 0).pairs, vec![(0, 8)]);
    let two = gen_grid(2, 2, WeightScheme::Unit, TerminalScheme::Corners, 0);
    let sol = solve_dsp(&two, Limits::default()).unwrap().unwrap();
    assert_eq!(sol.paths[0].len(), 3);
    assert_eq!(gen_spiral(2, 2), gen_spiral(2, 2));
}

#[test]
fn oracle_examples() {
    let g3 = gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::Corners, 0);
    let sol = solve_dsp(&g3, Limits::default()).unwrap().unwrap();
    assert_eq!(sol.paths[0], vec![0, 1, 2, 5, 8]);
    assert!(is_geodesic(&g3.graph, &DistanceOracle::new(&g3.graph), &sol.paths[0]).unwrap());

    let overlap = path_instance(4, &[(0, 2), (1, 3)]);
    assert_eq!(solve_dsp(&overlap, Limits::default()).unwrap(), None);

    let sq = from_coordinates(
        &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        &[(0, 1, q(1, 1)), (1, 2, q(1, 1)), (2, 3, q(1, 1)), (3, 0, q(1, 1))],
        Some(0),
    );
    let inst = DspInstance { graph: sq, pairs: vec![(0, 1), (3, 2)] };
    assert_eq!(solve_dsp(&inst, Limits::default()).unwrap().unwrap().paths, vec![vec![0, 1], vec![3, 2]]);

    let tight = Limits { max_vertices: 4, max_nodes: 10 };
    assert_eq!(solve_dsp(&g3, tight), Err(Error::LimitExceeded));
}

#[test]
fn io_round_trips() {
    for (_, inst) in corpus() {
        let text = dsp_to_json(&inst);
        let back = dsp_from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(dsp_to_json(&back), text);
    }
    let nice = nices(&gen_grid(2, 3, WeightScheme::Unit, TerminalScheme::CrossCorners, 0)).remove(0);
    let dap = annotate(&nice).unwrap();
    assert_eq!(dap_from_json(&dap_to_json(&dap)).unwrap(), dap);
    let sol = Solution { paths: vec![vec![0, 1, 2]] };
    assert_eq!(solution_from_json(&solution_to_json(&sol)).unwrap(), sol);
    assert!(matches!(dsp_from_json("{"), Err(Error::Parse(_))));
}

#[test]
fn check_reports_each_invariant() {
    let g3 = gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::Corners, 0);
    assert!(all_ok(&check_dsp(&g3, &Solution { paths: vec![vec![0, 3, 4, 5, 8]] })));
    let detour = check_dsp(&g3, &Solution { paths: vec![vec![0, 1, 4, 3, 6, 7, 8]] });
    assert!(!all_ok(&detour));
    assert!(detour.iter().any(|c| c.name == "geodesic" && !c.ok));
    let wrong_end = check_dsp(&g3, &Solution { paths: vec![vec![0, 1, 2]] });
    assert!(wrong_end.iter().any(|c| c.name == "endpoints" && !c.ok));
}

#[test]
fn corpus_shape() {
    let c = corpus();
    assert!(c.len() >= 50);
    for (name, inst) in &c {
        assert!(inst.graph.n() <= 14, "{name}");
        assert!((1..=3).contains(&inst.k()), "{name}");
    }
    assert!(crafted().iter().any(|(n, _)| n == "cut-vertex"));
}

#[test]
fn reductions_preserve_solvability_on_corpus() {
    let lim = Limits::default();
    for (name, inst) in corpus() {
        if inst.graph.n() > 12 {
            continue;
        }
        let direct = solve_dsp(&inst, lim).unwrap().is_some();
        let via_nice = match make_nice(&inst).unwrap() {
            NiceOutcome::NoReport => false,
            NiceOutcome::Instances(v) => v.iter().all(|n| solve_dsp(&n.inst, lim).unwrap().is_some()),
        };
        assert_eq!(direct, via_nice, "{name}");
        if let NiceOutcome::Instances(v) = make_nice(&inst).unwrap() {
            for n in v {
                let dap = annotate(&n.inst).unwrap();
                assert_eq!(solve_dap(&dap, lim).unwrap().is_some(), solve_dsp(&n.inst, lim).unwrap().is_some(), "{name}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn dag_reduction_preserves_solvability(seed in 0u64..10_000, k in 1usize..3) {
        let dag = gen_random_dag(seed, 10, k);
        let lim = Limits::default();
        let left = solve_dag(&dag, lim).unwrap().is_some();
        let right = match reduce_dag_to_dsp(&dag).unwrap() {
            None => false,
            Some(r) => solve_dsp(&r.inst, lim).unwrap().is_some(),
        };
        prop_assert_eq!(left, right);
    }
}
