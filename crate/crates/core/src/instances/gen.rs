//! Reproducible instance generators and the shipped test corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instances::{DagInstance, DspInstance};
use crate::plane::{Dart, PlaneGraph};
use crate::{Graph, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightScheme {
    Unit,
    /// Integer weights drawn uniformly from `lo..=hi`.
    Random { lo: i64, hi: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalScheme {
    /// One pair between opposite corners.
    Corners,
    /// Both diagonals as pairs.
    CrossCorners,
    Random { k: usize },
}

/// Straight-line embedding from coordinates; rotations sorted by angle.
pub fn from_coordinates(points: &[(f64, f64)], edges: &[(usize, usize, Rational)], outer_hint: Option<Dart>) -> Graph {
    let mut rot: Vec<Vec<(f64, usize)>> = vec![Vec::new(); points.len()];
    for (e, &(u, v, _)) in edges.iter().enumerate() {
        for (a, b) in [(u, v), (v, u)] {
            let ang = (points[b].1 - points[a].1).atan2(points[b].0 - points[a].0);
            rot[a].push((ang, e));
        }
    }
    let rotations: Vec<Vec<usize>> = rot
        .into_iter()
        .map(|mut r| {
            r.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            r.into_iter().map(|(_, e)| e).collect()
        })
        .collect();
    PlaneGraph::new(points.len(), edges, &rotations, outer_hint).expect("straight-line embedding is planar")
}

fn grid_graph(rows: usize, cols: usize, ws: WeightScheme, rng: &mut ChaCha8Rng) -> Graph {
    let mut points = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            points.push((c as f64, r as f64));
        }
    }
    let mut edges = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| match ws {
        WeightScheme::Unit => Rational::from_integer(1),
        WeightScheme::Random { lo, hi } => Rational::from_integer(rng.gen_range(lo..=hi)),
    };
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1, weight(rng)));
            }
            if r + 1 < rows {
                edges.push((v, v + cols, weight(rng)));
            }
        }
    }
    from_coordinates(&points, &edges, Some(0))
}

fn random_pairs(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    (0..k).map(|i| (vs[2 * i], vs[2 * i + 1])).collect()
}

/// Grid with vertex `r * cols + c` at column `c`, row `r` (rows grow upward).
pub fn gen_grid(rows: usize, cols: usize, ws: WeightScheme, ts: TerminalScheme, seed: u64) -> DspInstance<Rational> {
    assert!(rows >= 2 && cols >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = grid_graph(rows, cols, ws, &mut rng);
    let n = rows * cols;
    let pairs = match ts {
        TerminalScheme::Corners => vec![(0, n - 1)],
        TerminalScheme::CrossCorners => vec![(0, n - 1), (cols - 1, (rows - 1) * cols)],
        TerminalScheme::Random { k } => random_pairs(n, k.min(n / 2), &mut rng),
    };
    DspInstance { graph, pairs }
}

/// Ring count of a spiral with the given number of turns.
pub fn spiral_rings(turns: usize) -> usize {
    3 * turns + 1
}

/// Vertex id of slot `a` on ring `r` of a spiral.
pub fn spiral_vertex(r: usize, a: usize) -> usize {
    3 * r + a % 3
}

/// Nested triangles joined by straight spokes (weight 2) and twisted
/// diagonals (weight 1). Pair `i` runs from slot `i` of the innermost ring to
/// the outermost ring; its unique geodesic follows the diagonals and turns
/// `turns` times around the centre.
pub fn gen_spiral(turns: usize, k: usize) -> DspInstance<Rational> {
    if turns == 0 {
        return gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::Random { k: k.clamp(1, 3) }, 0);
    }
    let k = k.clamp(1, 3);
    let rings = spiral_rings(turns);
    let mut points = Vec::new();
    for r in 0..rings {
        for a in 0..3 {
            let ang = 2.0 * std::f64::consts::PI * a as f64 / 3.0;
            let rad = (r + 1) as f64;
            points.push((rad * ang.cos(), rad * ang.sin()));
        }
    }
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    let mut edges = Vec::new();
    for r in 0..rings {
        for a in 0..3 {
            edges.push((spiral_vertex(r, a), spiral_vertex(r, a + 1), two));
        }
    }
    let hint = 2 * 3 * (rings - 1);
    for r in 0..rings - 1 {
        for a in 0..3 {
            edges.push((spiral_vertex(r, a), spiral_vertex(r + 1, a), two));
            edges.push((spiral_vertex(r, a), spiral_vertex(r + 1, a + 1), one));
        }
    }
    let graph = from_coordinates(&points, &edges, Some(hint));
    let pairs = (0..k).map(|i| (spiral_vertex(0, i), spiral_vertex(rings - 1, i))).collect();
    DspInstance { graph, pairs }
}

/// Random planar DAG on a small grid with optional diagonals, oriented by a
/// random vertex ranking.
pub fn gen_random_dag(seed: u64, max_vertices: usize, k: usize) -> DagInstance<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = loop {
        let r = rng.gen_range(2..=3);
        let c = rng.gen_range(2..=4);
        if r * c <= max_vertices {
            break (r, c);
        }
    };
    let mut points = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            points.push((c as f64, r as f64));
        }
    }
    let one = Rational::from_integer(1);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols && rng.gen_bool(0.85) {
                edges.push((v, v + 1, one));
            }
            if r + 1 < rows && rng.gen_bool(0.85) {
                edges.push((v, v + cols, one));
            }
            if c + 1 < cols && r + 1 < rows && rng.gen_bool(0.3) {
                edges.push((v, v + cols + 1, one));
            }
        }
    }
    let graph = from_coordinates(&points, &edges, None);
    let n = rows * cols;
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    let arcs = (0..graph.m())
        .map(|e| {
            let (u, v) = graph.ends(e);
            if rank[u] < rank[v] {
                2 * e
            } else {
                2 * e + 1
            }
        })
        .collect();
    let mut by_rank: Vec<usize> = (0..n).collect();
    by_rank.sort_by_key(|&v| rank[v]);
    let k = k.clamp(1, 2);
    let mut pairs = Vec::new();
    let lows: Vec<usize> = by_rank[..n / 2].to_vec();
    let highs: Vec<usize> = by_rank[n / 2..].to_vec();
    let mut lo = lows.clone();
    let mut hi = highs.clone();
    lo.shuffle(&mut rng);
    hi.shuffle(&mut rng);
    for i in 0..k.min(lo.len()).min(hi.len()) {
        pairs.push((lo[i], hi[i]));
    }
    DagInstance { graph, arcs, pairs }
}

/// Unit-weight path `0 - 1 - ... - (n-1)`.
pub fn path_instance(n: usize, pairs: &[(usize, usize)]) -> DspInstance<Rational> {
    let one = Rational::from_integer(1);
    let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, one)).collect();
    DspInstance { graph: from_coordinates(&pts, &edges, None), pairs: pairs.to_vec() }
}

/// Hand-built instances, mostly without solutions.
pub fn crafted() -> Vec<(String, DspInstance<Rational>)> {
    let one = Rational::from_integer(1);
    let ten = Rational::from_integer(10);
    let mut out = Vec::new();

    // Star through one centre with a heavy outer cycle.
    let pts = [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
    let edges = [(1, 0, one), (0, 2, one), (3, 0, one), (0, 4, one), (1, 3, ten), (3, 2, ten), (2, 4, ten), (4, 1, ten)];
    let g = from_coordinates(&pts, &edges, Some(8));
    out.push(("cut-vertex".to_string(), DspInstance { graph: g, pairs: vec![(1, 2), (3, 4)] }));

    let g3 = gen_grid(3, 3, WeightScheme::Unit, TerminalScheme::CrossCorners, 0);
    out.push(("grid3-crossing".to_string(), g3));

    let path_pts: Vec<(f64, f64)> = (0..4).map(|i| (i as f64, 0.0)).collect();
    let path = from_coordinates(&path_pts, &[(0, 1, one), (1, 2, one), (2, 3, one)], None);
    out.push(("path-overlap".to_string(), DspInstance { graph: path.clone(), pairs: vec![(0, 2), (1, 3)] }));
    out.push(("path-repeat".to_string(), DspInstance { graph: path, pairs: vec![(0, 2), (2, 3)] }));

    let sq_pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let sq = from_coordinates(&sq_pts, &[(0, 1, one), (1, 2, one), (2, 3, one), (3, 0, one)], Some(0));
    out.push(("square-diagonals".to_string(), DspInstance { graph: sq.clone(), pairs: vec![(0, 2), (1, 3)] }));
    out.push(("square-sides".to_string(), DspInstance { graph: sq, pairs: vec![(0, 1), (3, 2)] }));

    let two_pts = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (4.0, 0.0)];
    let two = from_coordinates(&two_pts, &[(0, 1, one), (2, 3, one)], None);
    out.push(("disconnected".to_string(), DspInstance { graph: two, pairs: vec![(0, 3)] }));

    let g24 = gen_grid(2, 4, WeightScheme::Unit, TerminalScheme::CrossCorners, 0);
    out.push(("grid2x4-crossing".to_string(), g24));

    // Two unit pairs forced through a bottleneck edge.
    let hp = [(0.0, 0.0), (0.0, 2.0), (1.0, 1.0), (2.0, 1.0), (3.0, 0.0), (3.0, 2.0)];
    let he = [(0, 2, one), (1, 2, one), (2, 3, one), (3, 4, one), (3, 5, one), (0, 1, ten), (4, 5, ten)];
    let h = from_coordinates(&hp, &he, None);
    out.push(("bottleneck".to_string(), DspInstance { graph: h, pairs: vec![(0, 4), (1, 5)] }));
    out
}

/// Deterministic corpus of small instances (at most 14 vertices, k <= 3).
pub fn corpus() -> Vec<(String, DspInstance<Rational>)> {
    let mut out = Vec::new();
    let shapes = [(2, 2), (2, 3), (2, 4), (3, 3), (2, 5), (3, 4), (2, 6), (2, 7)];
    for &(r, c) in &shapes {
        out.push((format!("grid{r}x{c}-corners"), gen_grid(r, c, WeightScheme::Unit, TerminalScheme::Corners, 0)));
        if r * c >= 6 {
            out.push((format!("grid{r}x{c}-cross"), gen_grid(r, c, WeightScheme::Unit, TerminalScheme::CrossCorners, 0)));
        }
    }
    let mut seed = 1;
    for &(r, c) in &shapes[1..] {
        for k in [2, 3] {
            if 2 * k > r * c {
                continue;
            }
            for ws in [WeightScheme::Unit, WeightScheme::Random { lo: 1, hi: 3 }] {
                let tag = if ws == WeightScheme::Unit { "unit" } else { "w13" };
                out.push((format!("grid{r}x{c}-k{k}-{tag}-s{seed}"), gen_grid(r, c, ws, TerminalScheme::Random { k }, seed)));
                seed += 1;
            }
        }
    }
    for k in 1..=3 {
        out.push((format!("spiral1-k{k}"), gen_spiral(1, k)));
    }
    out.extend(crafted());
    out
}
