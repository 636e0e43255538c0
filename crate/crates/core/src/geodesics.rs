//! Exact shortest-path distances, (s,t)-dags and geodesic checks.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::plane::{edge_of, Dart, PlaneGraph};
use crate::{Error, Result, Weight};

/// All-pairs distance table; `None` is infinity.
#[derive(Clone, Debug)]
pub struct DistanceOracle<W> {
    n: usize,
    d: Vec<Option<W>>,
}

impl<W: Weight> DistanceOracle<W> {
    pub fn new(g: &PlaneGraph<W>) -> Self {
        let n = g.n();
        let mut d = Vec::with_capacity(n * n);
        for s in 0..n {
            d.extend(dijkstra(g, &[s]).0);
        }
        DistanceOracle { n, d }
    }

    pub fn dist(&self, u: usize, v: usize) -> Option<&W> {
        self.d[u * self.n + v].as_ref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether `d` lies on a shortest `(s, t)`-path in its own direction.
    pub fn in_dag(&self, g: &PlaneGraph<W>, s: usize, t: usize, d: Dart) -> bool {
        let (Some(a), Some(b), Some(st)) = (self.dist(s, g.tail(d)), self.dist(g.head(d), t), self.dist(s, t)) else {
            return false;
        };
        a.clone() + g.weight(edge_of(d)).clone() + b.clone() == *st
    }
}

/// Multi-source Dijkstra; returns distances and the dart used to reach each
/// vertex. Ties keep the first relaxation, which is deterministic.
pub fn dijkstra<W: Weight>(g: &PlaneGraph<W>, sources: &[usize]) -> (Vec<Option<W>>, Vec<Option<Dart>>) {
    let n = g.n();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = Some(W::zero());
        heap.push(Reverse((W::zero(), s)));
    }
    while let Some(Reverse((dv, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &d in g.rot(v) {
            let u = g.head(d);
            let nd = dv.clone() + g.weight(edge_of(d)).clone();
            let better = match &dist[u] {
                None => true,
                Some(x) => nd < *x,
            };
            if better && !done[u] {
                dist[u] = Some(nd.clone());
                pred[u] = Some(d);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    (dist, pred)
}

/// The oriented shortest-path dag of `(s, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedDag {
    pub s: usize,
    pub t: usize,
    pub arcs: Vec<Dart>,
    pub member: Vec<bool>,
}

impl OrientedDag {
    pub fn contains(&self, d: Dart) -> bool {
        self.member[d]
    }
}

pub fn st_dag<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, s: usize, t: usize) -> Result<OrientedDag> {
    if oracle.dist(s, t).is_none() {
        return Err(Error::Unreachable(t, s));
    }
    let member: Vec<bool> = (0..g.num_darts()).map(|d| oracle.in_dag(g, s, t, d)).collect();
    let arcs = (0..g.num_darts()).filter(|&d| member[d]).collect();
    let dag = OrientedDag { s, t, arcs, member };
    debug_assert!(is_acyclic(g, &dag.member));
    Ok(dag)
}

/// Whether the darts flagged in `member` form an acyclic digraph.
pub fn is_acyclic<W: Weight>(g: &PlaneGraph<W>, member: &[bool]) -> bool {
    topo_order(g, member).is_some()
}

/// Lexicographically least topological order of the flagged darts, if acyclic.
pub fn topo_order<W: Weight>(g: &PlaneGraph<W>, member: &[bool]) -> Option<Vec<usize>> {
    let n = g.n();
    let mut indeg = vec![0usize; n];
    for d in 0..g.num_darts() {
        if member[d] {
            indeg[g.head(d)] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for &d in g.rot(v) {
            if member[d] {
                let u = g.head(d);
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    heap.push(Reverse(u));
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Length of a vertex sequence, using the lightest edge between consecutive
/// vertices.
pub fn path_length<W: Weight>(g: &PlaneGraph<W>, path: &[usize]) -> Result<W> {
    let mut seen = vec![false; g.n()];
    let mut len = W::zero();
    for (i, &v) in path.iter().enumerate() {
        if v >= g.n() || seen[v] {
            return Err(Error::NotAPath);
        }
        seen[v] = true;
        if i > 0 {
            let d = g.lightest_dart(path[i - 1], v).ok_or(Error::NotAPath)?;
            len = len + g.weight(edge_of(d)).clone();
        }
    }
    Ok(len)
}

pub fn is_geodesic<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, path: &[usize]) -> Result<bool> {
    if path.is_empty() {
        return Err(Error::NotAPath);
    }
    let len = path_length(g, path)?;
    Ok(oracle.dist(path[0], *path.last().unwrap()) == Some(&len))
}

/// Whether common vertices of `p` and `q` appear in monotone order along both.
pub fn check_monotone_crossings(p: &[usize], q: &[usize]) -> bool {
    let seq: Vec<usize> = q.iter().filter_map(|v| p.iter().position(|x| x == v)).collect();
    seq.windows(2).all(|w| w[0] < w[1]) || seq.windows(2).all(|w| w[0] > w[1])
}

/// Replaces `p[u..=v]` by `q_uv`.
pub fn splice<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, p: &[usize], u: usize, v: usize, q_uv: &[usize]) -> Result<Vec<usize>> {
    let iu = p.iter().position(|&x| x == u).ok_or(Error::NotAPath)?;
    let iv = p.iter().position(|&x| x == v).ok_or(Error::NotAPath)?;
    if iu > iv || q_uv.first() != Some(&u) || q_uv.last() != Some(&v) {
        return Err(Error::NotAPath);
    }
    if !is_geodesic(g, oracle, q_uv)? {
        return Err(Error::NotShortestReplacement);
    }
    let mut out = p[..iu].to_vec();
    out.extend_from_slice(q_uv);
    out.extend_from_slice(&p[iv + 1..]);
    match is_geodesic(g, oracle, &out) {
        Ok(true) => Ok(out),
        Ok(false) => Err(Error::NotShortestReplacement),
        Err(_) => Err(Error::NotSimple),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_distance() {
        let g = PlaneGraph::new(3, &[(0, 1, 2i64), (1, 2, 3)], &[vec![0], vec![0, 1], vec![1]], None).unwrap();
        let o = DistanceOracle::new(&g);
        assert_eq!(o.dist(0, 2), Some(&5));
        let dag = st_dag(&g, &o, 0, 2).unwrap();
        assert_eq!(dag.arcs, vec![0, 2]);
    }

    #[test]
    fn monotone_examples() {
        assert!(check_monotone_crossings(&[0, 1, 2], &[5, 6]));
        assert!(check_monotone_crossings(&[0, 1, 2, 3], &[3, 2, 9, 0]));
        assert!(!check_monotone_crossings(&[0, 1, 2, 3], &[1, 3, 2]));
    }
}
