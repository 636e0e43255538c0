//! Problem instances, the nice-instance reduction and the planar-DAG reduction.

pub mod gen;
pub mod io;
pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::geodesics::{is_geodesic, st_dag, topo_order, DistanceOracle};
use crate::plane::{edge_of, Dart, PlaneGraph};
use crate::{Error, Result, Weight};

#[derive(Clone, Debug, PartialEq)]
pub struct DspInstance<W> {
    pub graph: PlaneGraph<W>,
    pub pairs: Vec<(usize, usize)>,
}

/// Annotated instance: `ann[i][d]` says dart `d` may be used by pair `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DapInstance<W> {
    pub graph: PlaneGraph<W>,
    pub pairs: Vec<(usize, usize)>,
    pub ann: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NiceInstance<W> {
    pub inst: DspInstance<W>,
    /// Vertex of the input instance, `None` for pendant terminals.
    pub origin: Vec<Option<usize>>,
    /// Index of each pair in the input instance.
    pub pair_ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NiceOutcome<W> {
    Instances(Vec<NiceInstance<W>>),
    NoReport,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub paths: Vec<Vec<usize>>,
}

/// Planar DAG with one chosen dart per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct DagInstance<W> {
    pub graph: PlaneGraph<W>,
    pub arcs: Vec<Dart>,
    pub pairs: Vec<(usize, usize)>,
}

impl<W: Weight> DspInstance<W> {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.pairs.iter().flat_map(|&(s, t)| [s, t]).collect()
    }

    pub fn has_repeated_terminal(&self) -> bool {
        let mut t = self.terminals();
        t.sort_unstable();
        t.windows(2).any(|w| w[0] == w[1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::Invalid("no terminal pairs".into()));
        }
        for &(s, t) in &self.pairs {
            if s >= self.graph.n() || t >= self.graph.n() {
                return Err(Error::Invalid(format!("terminal out of range in ({s},{t})")));
            }
            if s == t {
                return Err(Error::Invalid(format!("pair ({s},{t}) has equal ends")));
            }
        }
        Ok(())
    }
}

impl<W: Weight> DapInstance<W> {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.pairs.iter().flat_map(|&(s, t)| [s, t]).collect()
    }
}

/// Named verdict of one solution check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
}

fn check(name: &str, ok: bool) -> Check {
    Check { name: name.to_string(), ok }
}

fn common_checks(n: usize, pairs: &[(usize, usize)], sol: &Solution, adjacent: impl Fn(usize, usize, usize) -> bool) -> Vec<Check> {
    let mut out = vec![check("pair-count", sol.paths.len() == pairs.len())];
    let endpoints = sol.paths.iter().zip(pairs).all(|(p, &(s, t))| p.first() == Some(&s) && p.last() == Some(&t));
    out.push(check("endpoints", endpoints && sol.paths.len() == pairs.len()));
    let walks = sol
        .paths
        .iter()
        .enumerate()
        .all(|(i, p)| p.iter().all(|&v| v < n) && p.windows(2).all(|w| adjacent(i, w[0], w[1])));
    out.push(check("arcs", walks));
    let mut seen = vec![false; n];
    let mut disjoint = true;
    for p in &sol.paths {
        for &v in p {
            if v >= n || seen[v] {
                disjoint = false;
            } else {
                seen[v] = true;
            }
        }
    }
    out.push(check("vertex-disjoint", disjoint));
    out
}

/// Per-invariant verdicts for a candidate solution of a shortest-paths instance.
pub fn check_dsp<W: Weight>(inst: &DspInstance<W>, sol: &Solution) -> Vec<Check> {
    let g = &inst.graph;
    let mut out = common_checks(g.n(), &inst.pairs, sol, |_, u, v| g.find_dart(u, v).is_some());
    let oracle = DistanceOracle::new(g);
    let geo = sol.paths.iter().all(|p| !p.is_empty() && p.iter().all(|&v| v < g.n()) && is_geodesic(g, &oracle, p) == Ok(true));
    out.push(check("geodesic", geo));
    out
}

pub fn check_dap<W: Weight>(inst: &DapInstance<W>, sol: &Solution) -> Vec<Check> {
    let g = &inst.graph;
    common_checks(g.n(), &inst.pairs, sol, |i, u, v| {
        i < inst.ann.len() && g.rot(u).iter().any(|&d| g.head(d) == v && inst.ann[i][d])
    })
}

pub fn all_ok(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.ok)
}

/// Shortest-path dags of every pair, as dart flags; `None` if some pair is
/// disconnected.
pub fn pair_dags<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, pairs: &[(usize, usize)]) -> Option<Vec<Vec<bool>>> {
    pairs.iter().map(|&(s, t)| st_dag(g, oracle, s, t).ok().map(|d| d.member)).collect()
}

/// Reduction to nice instances: pendant terminals, deletion of edges on no
/// terminal geodesic, and a split into components.
pub fn make_nice<W: Weight>(inst: &DspInstance<W>) -> Result<NiceOutcome<W>> {
    inst.validate()?;
    if inst.has_repeated_terminal() {
        return Ok(NiceOutcome::NoReport);
    }
    let g = &inst.graph;
    let n = g.n();
    let mut b = g.to_builder();
    let mut pairs = Vec::new();
    for &(s, t) in &inst.pairs {
        let mut ends = [0; 2];
        for (j, v) in [s, t].into_iter().enumerate() {
            let x = b.add_vertex();
            b.add_edge(v, x, W::one(), None, None);
            ends[j] = x;
        }
        pairs.push((ends[0], ends[1]));
    }
    let aug = b.build()?;
    let oracle = DistanceOracle::new(&aug);
    let Some(dags) = pair_dags(&aug, &oracle, &pairs) else {
        return Ok(NiceOutcome::NoReport);
    };
    let keep_edge: Vec<bool> = (0..aug.m()).map(|e| dags.iter().any(|m| m[2 * e] || m[2 * e + 1])).collect();
    let removed: Vec<bool> = keep_edge.iter().map(|&k| !k).collect();
    let comp = aug.components_avoiding(&removed);
    let mut comps: Vec<usize> = pairs.iter().map(|&(s, _)| comp[s]).collect();
    comps.sort_unstable();
    comps.dedup();
    let mut out = Vec::new();
    for c in comps {
        let keep_vertex: Vec<bool> = (0..aug.n()).map(|v| comp[v] == c).collect();
        let (sub, vmap, _) = aug.subgraph(&keep_vertex, &keep_edge)?;
        let mut origin = vec![None; sub.n()];
        for v in 0..aug.n() {
            if let Some(nv) = vmap[v] {
                origin[nv] = (v < n).then_some(v);
            }
        }
        let mut sub_pairs = Vec::new();
        let mut pair_ids = Vec::new();
        for (i, &(s, t)) in pairs.iter().enumerate() {
            if comp[s] == c {
                sub_pairs.push((vmap[s].unwrap(), vmap[t].unwrap()));
                pair_ids.push(i);
            }
        }
        out.push(NiceInstance { inst: DspInstance { graph: sub, pairs: sub_pairs }, origin, pair_ids });
    }
    Ok(NiceOutcome::Instances(out))
}

/// Whether an instance meets the four nice conditions.
pub fn is_nice<W: Weight>(inst: &DspInstance<W>) -> bool {
    let g = &inst.graph;
    if !g.is_connected() || inst.has_repeated_terminal() {
        return false;
    }
    if inst.terminals().iter().any(|&v| g.degree(v) != 1) {
        return false;
    }
    let oracle = DistanceOracle::new(g);
    let Some(dags) = pair_dags(g, &oracle, &inst.pairs) else { return false };
    (0..g.m()).all(|e| dags.iter().any(|m| m[2 * e] || m[2 * e + 1]))
}

/// Annotation of a nice instance by its pair dags.
pub fn annotate<W: Weight>(inst: &DspInstance<W>) -> Result<DapInstance<W>> {
    let oracle = DistanceOracle::new(&inst.graph);
    let ann = pair_dags(&inst.graph, &oracle, &inst.pairs).ok_or(Error::Disconnected)?;
    Ok(DapInstance { graph: inst.graph.clone(), pairs: inst.pairs.clone(), ann })
}

/// Maps a nice-instance solution back to the input instance.
pub fn lift_solution<W: Weight>(nice: &NiceInstance<W>, sol: &Solution, k: usize, into: &mut [Vec<usize>]) {
    debug_assert_eq!(into.len(), k);
    for (j, p) in sol.paths.iter().enumerate() {
        into[nice.pair_ids[j]] = p.iter().filter_map(|&v| nice.origin[v]).collect();
    }
}

/// Result of the DAG reduction: the instance and, per new vertex, its DAG vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct DagReduction<W> {
    pub inst: DspInstance<W>,
    pub origin: Vec<Option<usize>>,
    pub order: Vec<usize>,
}

/// Subdivides each arc `(v_i, v_j)` of the lexicographically least
/// topological order into `j - i` unit edges. `None` when some sink is
/// unreachable from its source.
pub fn reduce_dag_to_dsp<W: Weight>(dag: &DagInstance<W>) -> Result<Option<DagReduction<W>>> {
    let g = &dag.graph;
    let mut member = vec![false; g.num_darts()];
    for &d in &dag.arcs {
        member[d] = true;
    }
    if dag.arcs.len() != g.m() || (0..g.m()).any(|e| member[2 * e] == member[2 * e + 1]) {
        return Err(Error::Invalid("need exactly one orientation per edge".into()));
    }
    let order = topo_order(g, &member).ok_or_else(|| Error::Invalid("not acyclic".into()))?;
    for &(s, t) in &dag.pairs {
        if s == t || !reachable(g, &member, s, t) {
            return Ok(None);
        }
    }
    let mut pos = vec![0usize; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut b = PlaneGraph::<W>::to_builder(g);
    for w in b.weight.iter_mut() {
        *w = W::one();
    }
    for &d in &dag.arcs {
        let gap = pos[g.head(d)] - pos[g.tail(d)];
        for _ in 1..gap {
            b.subdivide(edge_of(d), W::one());
        }
    }
    let graph = b.build()?;
    let mut origin = vec![None; graph.n()];
    for (v, o) in origin.iter_mut().enumerate().take(g.n()) {
        *o = Some(v);
    }
    Ok(Some(DagReduction { inst: DspInstance { graph, pairs: dag.pairs.clone() }, origin, order }))
}

pub fn reachable<W: Weight>(g: &PlaneGraph<W>, member: &[bool], s: usize, t: usize) -> bool {
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        if v == t {
            return true;
        }
        for &d in g.rot(v) {
            if member[d] && !seen[g.head(d)] {
                seen[g.head(d)] = true;
                stack.push(g.head(d));
            }
        }
    }
    false
}
