use pdsp_core::analysis::{classify_handles, load, load_report, pull, winding_number, HandleKind, RootedRing};
use pdsp_core::instances::gen::{gen_grid, gen_spiral, spiral_rings, spiral_vertex, TerminalScheme, WeightScheme};
use pdsp_core::plane::{edge_of, PlaneGraph};
use pdsp_core::{Error, Rational};

fn grid(rows: usize, cols: usize) -> PlaneGraph<Rational> {
    gen_grid(rows, cols, WeightScheme::Unit, TerminalScheme::Corners, 0).graph
}

#[test]
fn disjoint_paths_have_no_handles() {
    let g = grid(3, 3);
    assert!(classify_handles(&g, &[0, 1, 2], &[6, 7, 8], &[]).unwrap().is_empty());
    assert!(classify_handles(&g, &[3, 4, 5], &[1, 4, 7], &[]).unwrap().is_empty());
    assert_eq!(load(&g, &[vec![0, 1, 2]], &[6, 7, 8]), 0);
}

#[test]
fn regular_handle_is_pulled() {
    let g = grid(3, 4);
    let q = [4, 5, 6, 7];
    let p = vec![1, 5, 9, 10, 6, 2];
    let hs = classify_handles(&g, &p, &q, &[]).unwrap();
    assert_eq!(hs.len(), 1);
    assert_eq!(hs[0].path, vec![5, 9, 10, 6]);
    assert_eq!((hs[0].kind, hs[0].empty), (HandleKind::Regular, true));
    let pulled = pull(&q, &hs[0]).unwrap();
    assert_eq!(pulled, vec![4, 5, 9, 10, 6, 7]);
    assert_eq!(load(&g, &[p.clone()], &q), 4);
    assert_eq!(load(&g, &[p.clone()], &pulled), 2);
    let rep = load_report(&g, &[p], &q, &[]).unwrap();
    assert_eq!((rep.load, rep.upper_comb_load, rep.pulls), (4, 2, 1));
}

#[test]
fn pocket_with_a_terminal_is_not_empty() {
    let g = grid(4, 5);
    let q = [5, 6, 7, 8, 9];
    let p = [6, 11, 16, 17, 18, 13, 8];
    let with = classify_handles(&g, &p, &q, &[12]).unwrap();
    assert_eq!((with[0].kind, with[0].empty), (HandleKind::Regular, false));
    assert_eq!(pull(&q, &with[0]), Err(Error::NotEmptyHandle));
    let without = classify_handles(&g, &p, &q, &[0]).unwrap();
    assert!(without[0].empty);
}

#[test]
fn handle_around_an_endpoint_winds() {
    let g = grid(3, 4);
    let q = [5, 4, 8, 9, 10, 11];
    let p = [4, 0, 1, 2, 6, 10];
    let hs = classify_handles(&g, &p, &q, &[]).unwrap();
    assert_eq!(hs.len(), 1);
    assert_eq!(hs[0].kind, HandleKind::Winding);
    assert_eq!(pull(&q, &hs[0]), Err(Error::NotEmptyHandle));
}

fn spiral_reference(g: &PlaneGraph<Rational>, rings: usize) -> RootedRing {
    let e = |u: usize, v: usize| edge_of(g.find_dart(u, v).unwrap());
    let mut edges = Vec::new();
    for r in (1..rings).rev() {
        edges.push(e(spiral_vertex(r, 0), spiral_vertex(r, 1)));
        edges.push(e(spiral_vertex(r - 1, 0), spiral_vertex(r, 1)));
    }
    edges.push(e(spiral_vertex(0, 0), spiral_vertex(0, 1)));
    RootedRing::from_edges(g, g.outer_face(), &edges).unwrap()
}

#[test]
fn spiral_geodesic_winds_once_per_turn() {
    for turns in 1..=3 {
        let inst = gen_spiral(turns, 1);
        let g = &inst.graph;
        let rings = spiral_rings(turns);
        let ring = spiral_reference(g, rings);
        assert_eq!(g.face_walk(ring.c2).len(), 3);
        let diagonal: Vec<usize> = (0..rings).map(|r| spiral_vertex(r, r)).collect();
        assert_eq!(winding_number(g, &diagonal, &ring).unwrap(), -(turns as i64));
        let back: Vec<usize> = diagonal.iter().rev().copied().collect();
        assert_eq!(winding_number(g, &back, &ring).unwrap(), turns as i64);
        let spoke: Vec<usize> = (0..rings).map(|r| spiral_vertex(r, 0)).collect();
        assert_eq!(winding_number(g, &spoke, &ring).unwrap(), 0);
    }
}
