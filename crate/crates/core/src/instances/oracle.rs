//! Exhaustive backtracking over vertex-disjoint directed paths.

use crate::geodesics::DistanceOracle;
use crate::instances::{pair_dags, DagInstance, DapInstance, DspInstance, Solution};
use crate::plane::{Dart, PlaneGraph};
use crate::{Error, Result, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: 2000, max_nodes: 20_000_000 }
    }
}

/// One path per pair, as dart sequences.
pub type ArcFamily = Vec<Vec<Dart>>;

struct Search<'a, W> {
    g: &'a PlaneGraph<W>,
    pairs: &'a [(usize, usize)],
    ann: &'a [Vec<bool>],
    order: Vec<Vec<Dart>>,
    reach: Vec<Vec<bool>>,
    used: Vec<bool>,
    reserved: Vec<bool>,
    nodes: u64,
    max_nodes: u64,
    acc: Vec<Vec<Dart>>,
    path: Vec<Dart>,
}

impl<'a, W: Weight> Search<'a, W> {
    fn new(g: &'a PlaneGraph<W>, pairs: &'a [(usize, usize)], ann: &'a [Vec<bool>], limits: Limits) -> Result<Self> {
        if g.n() > limits.max_vertices {
            return Err(Error::LimitExceeded);
        }
        let order = (0..g.n())
            .map(|v| {
                let mut ds = g.rot(v).to_vec();
                ds.sort_by_key(|&d| (g.head(d), d));
                ds
            })
            .collect();
        let reach = pairs
            .iter()
            .enumerate()
            .map(|(i, &(_, t))| {
                let mut seen = vec![false; g.n()];
                seen[t] = true;
                let mut stack = vec![t];
                while let Some(v) = stack.pop() {
                    for &d in g.rot(v) {
                        let u = g.head(d);
                        if ann[i][d ^ 1] && !seen[u] {
                            seen[u] = true;
                            stack.push(u);
                        }
                    }
                }
                seen
            })
            .collect();
        let mut reserved = vec![false; g.n()];
        for &(s, t) in pairs {
            reserved[s] = true;
            reserved[t] = true;
        }
        Ok(Search {
            g,
            pairs,
            ann,
            order,
            reach,
            used: vec![false; g.n()],
            reserved,
            nodes: 0,
            max_nodes: limits.max_nodes,
            acc: Vec::new(),
            path: Vec::new(),
        })
    }

    fn pair(&mut self, i: usize, visit: &mut dyn FnMut(&[Vec<Dart>]) -> bool) -> Result<bool> {
        if i == self.pairs.len() {
            return Ok(visit(&self.acc));
        }
        let (s, _) = self.pairs[i];
        if self.used[s] || !self.reach[i][s] {
            return Ok(false);
        }
        self.used[s] = true;
        let saved = std::mem::take(&mut self.path);
        let r = self.step(i, s, visit);
        self.path = saved;
        self.used[s] = false;
        r
    }

    fn step(&mut self, i: usize, v: usize, visit: &mut dyn FnMut(&[Vec<Dart>]) -> bool) -> Result<bool> {
        let t = self.pairs[i].1;
        if v == t {
            self.acc.push(self.path.clone());
            let r = self.pair(i + 1, visit);
            self.acc.pop();
            return r;
        }
        for j in 0..self.order[v].len() {
            let d = self.order[v][j];
            let u = self.g.head(d);
            if !self.ann[i][d] || self.used[u] || (self.reserved[u] && u != t) || !self.reach[i][u] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::LimitExceeded);
            }
            self.used[u] = true;
            self.path.push(d);
            let r = self.step(i, u, visit);
            self.path.pop();
            self.used[u] = false;
            if r? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn to_vertices<W: Weight>(g: &PlaneGraph<W>, s: usize, darts: &[Dart]) -> Vec<usize> {
    let mut out = vec![s];
    out.extend(darts.iter().map(|&d| g.head(d)));
    out
}

/// Lexicographically least family of disjoint annotated paths.
pub fn first_arc_family<W: Weight>(g: &PlaneGraph<W>, pairs: &[(usize, usize)], ann: &[Vec<bool>], limits: Limits) -> Result<Option<ArcFamily>> {
    let mut found = None;
    let mut s = Search::new(g, pairs, ann, limits)?;
    s.pair(0, &mut |acc| {
        found = Some(acc.to_vec());
        true
    })?;
    Ok(found)
}

/// Every family of disjoint annotated paths, failing past `cap` families.
pub fn all_arc_families<W: Weight>(g: &PlaneGraph<W>, pairs: &[(usize, usize)], ann: &[Vec<bool>], limits: Limits, cap: usize) -> Result<Vec<ArcFamily>> {
    let mut out = Vec::new();
    let mut over = false;
    let mut s = Search::new(g, pairs, ann, limits)?;
    s.pair(0, &mut |acc| {
        if out.len() == cap {
            over = true;
            return true;
        }
        out.push(acc.to_vec());
        false
    })?;
    if over {
        return Err(Error::LimitExceeded);
    }
    Ok(out)
}

fn family_to_solution<W: Weight>(g: &PlaneGraph<W>, pairs: &[(usize, usize)], fam: &ArcFamily) -> Solution {
    Solution { paths: fam.iter().zip(pairs).map(|(p, &(s, _))| to_vertices(g, s, p)).collect() }
}

pub fn solve_dap<W: Weight>(inst: &DapInstance<W>, limits: Limits) -> Result<Option<Solution>> {
    let fam = first_arc_family(&inst.graph, &inst.pairs, &inst.ann, limits)?;
    Ok(fam.map(|f| family_to_solution(&inst.graph, &inst.pairs, &f)))
}

/// Pair dags of a shortest-paths instance; `None` when it is trivially a no-instance.
pub fn dsp_annotation<W: Weight>(inst: &DspInstance<W>) -> Option<Vec<Vec<bool>>> {
    if inst.has_repeated_terminal() || inst.pairs.iter().any(|&(s, t)| s == t) {
        return None;
    }
    let oracle = DistanceOracle::new(&inst.graph);
    pair_dags(&inst.graph, &oracle, &inst.pairs)
}

pub fn solve_dsp<W: Weight>(inst: &DspInstance<W>, limits: Limits) -> Result<Option<Solution>> {
    let Some(ann) = dsp_annotation(inst) else { return Ok(None) };
    let fam = first_arc_family(&inst.graph, &inst.pairs, &ann, limits)?;
    Ok(fam.map(|f| family_to_solution(&inst.graph, &inst.pairs, &f)))
}

pub fn all_dsp_solutions<W: Weight>(inst: &DspInstance<W>, limits: Limits, cap: usize) -> Result<Vec<Solution>> {
    let Some(ann) = dsp_annotation(inst) else { return Ok(Vec::new()) };
    let fams = all_arc_families(&inst.graph, &inst.pairs, &ann, limits, cap)?;
    Ok(fams.iter().map(|f| family_to_solution(&inst.graph, &inst.pairs, f)).collect())
}

/// Disjoint directed paths in a planar DAG.
pub fn solve_dag<W: Weight>(dag: &DagInstance<W>, limits: Limits) -> Result<Option<Solution>> {
    let mut member = vec![false; dag.graph.num_darts()];
    for &d in &dag.arcs {
        member[d] = true;
    }
    let mut ends: Vec<usize> = dag.pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
    ends.sort_unstable();
    if ends.windows(2).any(|w| w[0] == w[1]) {
        return Ok(None);
    }
    let ann = vec![member; dag.pairs.len()];
    let fam = first_arc_family(&dag.graph, &dag.pairs, &ann, limits)?;
    Ok(fam.map(|f| family_to_solution(&dag.graph, &dag.pairs, &f)))
}
