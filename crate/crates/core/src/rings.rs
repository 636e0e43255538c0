//! Splitting partitions, dag-cuts, dag-rings and the exhaustive ring
//! decomposition.
//!
//! A cut is a vertex bipartition stored as flags of its `V_X` side. A
//! partition of `T̂` is a bitmask over the index in `T̂`: bit `i` set puts
//! `T̂[i]` into `Y`.

use serde::Serialize;

use crate::geodesics::{is_acyclic, DistanceOracle};
use crate::instances::DspInstance;
use crate::plane::{edge_of, region_footprint, separating_dual_cycle, Dart, Footprint, PlaneGraph};
use crate::{Error, Result, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingPartition {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    /// Terminal pairs with one end in `X` and one in `Y`, oriented `X -> Y`.
    pub split: Vec<(usize, usize)>,
    /// Unordered pairs of distinct `T̂` vertices on a common side.
    pub same_side: Vec<(usize, usize)>,
}

pub fn split_sets(pairs: &[(usize, usize)], x: &[usize], y: &[usize]) -> Result<SplittingPartition> {
    let mut split = Vec::new();
    for &(s, t) in pairs {
        if x.contains(&s) && y.contains(&t) {
            split.push((s, t));
        } else if x.contains(&t) && y.contains(&s) {
            split.push((t, s));
        }
    }
    if split.is_empty() {
        return Err(Error::NotSplitting);
    }
    let mut same_side = Vec::new();
    for side in [x, y] {
        for (i, &a) in side.iter().enumerate() {
            for &b in &side[i + 1..] {
                same_side.push((a, b));
            }
        }
    }
    Ok(SplittingPartition { x: x.to_vec(), y: y.to_vec(), split, same_side })
}

/// Splits `t_hat` by `mask`.
pub fn partition_of(t_hat: &[usize], mask: u64) -> (Vec<usize>, Vec<usize>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, &v) in t_hat.iter().enumerate() {
        if mask >> i & 1 == 1 {
            y.push(v);
        } else {
            x.push(v);
        }
    }
    (x, y)
}

/// Masks with bit 0 clear and `Y` non-empty, by popcount then value.
pub fn partition_order(r: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (1..(1u64 << r)).filter(|m| m & 1 == 0).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks
}

/// Whether dart `d` lies in the dag of every split pair.
pub fn aligned<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, sp: &SplittingPartition, d: Dart) -> bool {
    sp.split.iter().all(|&(t, u)| oracle.in_dag(g, t, u, d))
}

fn in_same_side_dag<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, sp: &SplittingPartition, e: usize) -> bool {
    sp.same_side
        .iter()
        .any(|&(a, b)| oracle.in_dag(g, a, b, 2 * e) || oracle.in_dag(g, a, b, 2 * e + 1))
}

/// Darts from `V_X` to `V_Y`.
pub fn cut_darts<W: Weight>(g: &PlaneGraph<W>, side_x: &[bool]) -> Vec<Dart> {
    (0..g.num_darts()).filter(|&d| side_x[g.tail(d)] && !side_x[g.head(d)]).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CutReport {
    pub anchors: bool,
    pub aligned: bool,
    pub same_side_free: bool,
    pub connected: bool,
}

impl CutReport {
    pub fn ok(&self) -> bool {
        self.anchors && self.aligned && self.same_side_free && self.connected
    }
}

pub fn validate_dag_cut<W: Weight>(
    g: &PlaneGraph<W>,
    oracle: &DistanceOracle<W>,
    sp: &SplittingPartition,
    side_x: &[bool],
    w_x: &[usize],
    w_y: &[usize],
) -> CutReport {
    let anchors = w_x.iter().all(|&v| side_x[v]) && w_y.iter().all(|&v| !side_x[v]);
    let cut = cut_darts(g, side_x);
    let aligned_ok = cut.iter().all(|&d| aligned(g, oracle, sp, d));
    let same_side_free = cut.iter().all(|&d| !in_same_side_dag(g, oracle, sp, edge_of(d)));
    let side_y: Vec<bool> = side_x.iter().map(|&b| !b).collect();
    let connected = g.induces_connected(side_x) && g.induces_connected(&side_y);
    CutReport { anchors, aligned: aligned_ok, same_side_free, connected }
}

fn closure<W: Weight>(g: &PlaneGraph<W>, arc: &[bool], from: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut stack = Vec::new();
    for &v in from {
        if !seen[v] {
            seen[v] = true;
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        for &d in g.rot(v) {
            let u = g.head(d);
            if arc[d] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// The least and greatest `(W_X, W_Y)`-dag-cuts, as `V_X` flags.
pub fn maximally_pushed_cuts<W: Weight>(
    g: &PlaneGraph<W>,
    oracle: &DistanceOracle<W>,
    sp: &SplittingPartition,
    w_x: &[usize],
    w_y: &[usize],
) -> Result<(Vec<bool>, Vec<bool>)> {
    let mut d_arcs = vec![false; g.num_darts()];
    let mut d2_arcs = vec![false; g.num_darts()];
    for e in 0..g.m() {
        let fwd = [2 * e, 2 * e + 1].into_iter().find(|&d| aligned(g, oracle, sp, d));
        match fwd {
            Some(a) if !in_same_side_dag(g, oracle, sp, e) => {
                d_arcs[a ^ 1] = true;
                d2_arcs[a] = true;
            }
            _ => {
                for d in [2 * e, 2 * e + 1] {
                    d_arcs[d] = true;
                    d2_arcs[d] = true;
                }
            }
        }
    }
    let c_x = closure(g, &d_arcs, w_x);
    let c_y = closure(g, &d2_arcs, w_y);
    if (0..g.n()).any(|v| c_x[v] && c_y[v]) {
        return Err(Error::NoneExists);
    }
    let gamma1 = c_x;
    let gamma2: Vec<bool> = c_y.iter().map(|&b| !b).collect();
    for side in [&gamma1, &gamma2] {
        if !validate_dag_cut(g, oracle, sp, side, w_x, w_y).ok() {
            return Err(Error::NoneExists);
        }
    }
    Ok((gamma1, gamma2))
}

/// Cut order: `a ⊑ b` iff `V_X(a) ⊆ V_X(b)`.
pub fn cut_le(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DagRing {
    pub mask: u64,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub w_x: Vec<usize>,
    pub w_y: Vec<usize>,
    /// `V_X` of the inner cut, i.e. `U_X`.
    pub gamma1: Vec<bool>,
    /// `V_X` of the outer cut, i.e. `U_X ∪ U_mid`.
    pub gamma2: Vec<bool>,
}

impl DagRing {
    pub fn u_x(&self) -> Vec<bool> {
        self.gamma1.clone()
    }

    pub fn u_mid(&self) -> Vec<bool> {
        self.gamma1.iter().zip(&self.gamma2).map(|(&a, &b)| !a && b).collect()
    }

    pub fn u_y(&self) -> Vec<bool> {
        self.gamma2.iter().map(|&b| !b).collect()
    }

    pub fn mid_size(&self) -> usize {
        self.u_mid().iter().filter(|&&b| b).count()
    }

    pub fn partition(&self) -> SplittingPartition {
        SplittingPartition { x: self.x.clone(), y: self.y.clone(), split: Vec::new(), same_side: Vec::new() }
    }

    pub fn cycles<W: Weight>(&self, g: &PlaneGraph<W>) -> Result<(Vec<Dart>, Vec<Dart>)> {
        Ok((separating_dual_cycle(g, &self.gamma1)?, separating_dual_cycle(g, &self.gamma2)?))
    }

    pub fn footprint<W: Weight>(&self, g: &PlaneGraph<W>) -> Result<Footprint> {
        let (c1, c2) = self.cycles(g)?;
        region_footprint(g, &c1, &c2)
    }
}

/// Condition 3 and the distance identity of condition 4 for a pair of cuts.
pub fn ring_conditions<W: Weight>(
    g: &PlaneGraph<W>,
    oracle: &DistanceOracle<W>,
    sp: &SplittingPartition,
    gamma1: &[bool],
    gamma2: &[bool],
) -> (bool, bool) {
    let u_y: Vec<bool> = gamma2.iter().map(|&b| !b).collect();
    let cond3 = (0..g.num_darts()).all(|d| !(gamma1[g.tail(d)] && u_y[g.head(d)]));
    let inner = cut_darts(g, gamma1);
    let outer = cut_darts(g, gamma2);
    let mut cond4 = true;
    'outer: for &(t, t2) in &sp.split {
        let Some(total) = oracle.dist(t, t2) else {
            cond4 = false;
            break;
        };
        for &a in &inner {
            let (u1, v1) = (g.tail(a), g.head(a));
            let lead = oracle.dist(t, u1).cloned().map(|x| x + g.weight(edge_of(a)).clone());
            for &b in &outer {
                let (u2, v2) = (g.tail(b), g.head(b));
                let parts = (lead.clone(), oracle.dist(v1, u2), oracle.dist(v2, t2));
                let ok = match parts {
                    (Some(l), Some(m), Some(r)) => l + m.clone() + g.weight(edge_of(b)).clone() + r.clone() == *total,
                    _ => false,
                };
                if !ok {
                    cond4 = false;
                    break 'outer;
                }
            }
        }
    }
    (cond3, cond4)
}

/// The maximal `(W_X, W_Y)`-dag-ring, represented by the pushed cuts.
pub fn maximal_ring<W: Weight>(
    g: &PlaneGraph<W>,
    oracle: &DistanceOracle<W>,
    sp: &SplittingPartition,
    w_x: &[usize],
    w_y: &[usize],
) -> Result<DagRing> {
    let (gamma1, gamma2) = maximally_pushed_cuts(g, oracle, sp, w_x, w_y)?;
    let (c3, c4) = ring_conditions(g, oracle, sp, &gamma1, &gamma2);
    if !c3 || !c4 {
        return Err(Error::NoneExists);
    }
    Ok(DagRing { mask: 0, x: sp.x.clone(), y: sp.y.clone(), w_x: w_x.to_vec(), w_y: w_y.to_vec(), gamma1, gamma2 })
}

/// Full validity of a ring against its partition and anchors.
pub fn validate_ring<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, pairs: &[(usize, usize)], ring: &DagRing) -> bool {
    let Ok(sp) = split_sets(pairs, &ring.x, &ring.y) else { return false };
    let r1 = validate_dag_cut(g, oracle, &sp, &ring.gamma1, &ring.w_x, &ring.w_y);
    let r2 = validate_dag_cut(g, oracle, &sp, &ring.gamma2, &ring.w_x, &ring.w_y);
    let (c3, c4) = ring_conditions(g, oracle, &sp, &ring.gamma1, &ring.gamma2);
    r1.ok() && r2.ok() && c3 && c4 && cut_le(&ring.gamma1, &ring.gamma2) && ring.mid_size() > 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DagStructure {
    pub vertices: Vec<usize>,
    pub arcs: Vec<Dart>,
    pub t_x: Vec<usize>,
    pub t_y: Vec<usize>,
}

pub fn dag_structure<W: Weight>(g: &PlaneGraph<W>, oracle: &DistanceOracle<W>, pairs: &[(usize, usize)], ring: &DagRing) -> Result<DagStructure> {
    let sp = split_sets(pairs, &ring.x, &ring.y)?;
    let mid = ring.u_mid();
    let (ux, uy) = (ring.u_x(), ring.u_y());
    let mut arcs = Vec::new();
    let mut member = vec![false; g.num_darts()];
    for e in 0..g.m() {
        let (u, v) = g.ends(e);
        if !mid[u] || !mid[v] {
            continue;
        }
        if in_same_side_dag(g, oracle, &sp, e) {
            return Err(Error::OrientationConflict(e));
        }
        let d = [2 * e, 2 * e + 1]
            .into_iter()
            .find(|&d| aligned(g, oracle, &sp, d))
            .ok_or(Error::OrientationConflict(e))?;
        arcs.push(d);
        member[d] = true;
    }
    if !is_acyclic(g, &member) {
        return Err(Error::Invalid("ring dag has a cycle".into()));
    }
    let vertices: Vec<usize> = (0..g.n()).filter(|&v| mid[v]).collect();
    let touches = |v: usize, side: &[bool]| g.neighbors(v).any(|u| side[u]);
    let t_x = vertices.iter().copied().filter(|&v| touches(v, &ux)).collect();
    let t_y = vertices.iter().copied().filter(|&v| touches(v, &uy)).collect();
    Ok(DagStructure { vertices, arcs, t_x, t_y })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RingDecomposition {
    pub t_hat: Vec<usize>,
    pub rings: Vec<DagRing>,
}

impl RingDecomposition {
    pub fn has_partition(&self, x: &[usize]) -> bool {
        let mut key = x.to_vec();
        key.sort_unstable();
        let mut comp: Vec<usize> = self.t_hat.iter().copied().filter(|v| !x.contains(v)).collect();
        comp.sort_unstable();
        self.rings.iter().any(|r| {
            let mut rx = r.x.clone();
            rx.sort_unstable();
            rx == key || rx == comp
        })
    }
}

/// Anchor sets for extending `decomp` by a ring over `(X, Y)`.
pub fn extension_anchors(decomp: &RingDecomposition, x: &[usize], y: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let meets = |a: &[usize], b: &[usize]| a.iter().any(|v| b.contains(v));
    let within = |a: &[usize], b: &[usize]| a.iter().all(|v| b.contains(v));
    let mut w_x = x.to_vec();
    let mut w_y = y.to_vec();
    for r in &decomp.rings {
        if meets(x, &r.x) && meets(x, &r.y) && meets(y, &r.x) && meets(y, &r.y) {
            return Err(Error::NoExtension);
        }
        let block = |z: &[usize]| -> Vec<usize> {
            let side = if within(&r.x, z) {
                r.u_x()
            } else if within(&r.y, z) {
                r.u_y()
            } else {
                return Vec::new();
            };
            (0..side.len()).filter(|&v| side[v]).collect()
        };
        w_x.extend(block(x));
        w_y.extend(block(y));
    }
    w_x.sort_unstable();
    w_x.dedup();
    w_y.sort_unstable();
    w_y.dedup();
    if meets(&w_x, &w_y) {
        return Err(Error::NoExtension);
    }
    Ok((w_x, w_y))
}

fn probe<W: Weight>(
    g: &PlaneGraph<W>,
    oracle: &DistanceOracle<W>,
    pairs: &[(usize, usize)],
    decomp: &RingDecomposition,
    mask: u64,
    footprints: &[Footprint],
) -> Option<(DagRing, Footprint)> {
    let (x, y) = partition_of(&decomp.t_hat, mask);
    if y.is_empty() || x.is_empty() || decomp.has_partition(&x) {
        return None;
    }
    let sp = split_sets(pairs, &x, &y).ok()?;
    let (w_x, w_y) = extension_anchors(decomp, &x, &y).ok()?;
    let mut ring = maximal_ring(g, oracle, &sp, &w_x, &w_y).ok()?;
    ring.mask = mask;
    let fp = ring.footprint(g).ok()?;
    if footprints.iter().any(|f| f.intersects(&fp)) {
        return None;
    }
    Some((ring, fp))
}

/// Greedy exhaustive ring decomposition of a nice instance over `t_hat`.
pub fn decompose<W: Weight>(inst: &DspInstance<W>, oracle: &DistanceOracle<W>, t_hat: &[usize]) -> Result<RingDecomposition> {
    let g = &inst.graph;
    let r = t_hat.len();
    if r >= 63 {
        return Err(Error::LimitExceeded);
    }
    let mut decomp = RingDecomposition { t_hat: t_hat.to_vec(), rings: Vec::new() };
    let mut footprints = Vec::new();
    let order = partition_order(r);
    loop {
        let mut best: Option<(DagRing, Footprint)> = None;
        for &mask in &order {
            if let Some((ring, fp)) = probe(g, oracle, &inst.pairs, &decomp, mask, &footprints) {
                let better = match &best {
                    None => true,
                    Some((b, _)) => ring.mid_size() > b.mid_size(),
                };
                if better {
                    best = Some((ring, fp));
                }
            }
        }
        let Some((ring, fp)) = best else { break };
        decomp.rings.push(ring);
        footprints.push(fp);
        if decomp.rings.len() > 2 * r.saturating_sub(1) {
            return Err(Error::Invalid(format!("{} rings exceed the 2r-2 bound", decomp.rings.len())));
        }
    }
    Ok(decomp)
}

/// Masks over all `2^r` partitions (both orientations) that still extend
/// `decomp`; empty when the decomposition is exhaustive.
pub fn reprobe<W: Weight>(inst: &DspInstance<W>, oracle: &DistanceOracle<W>, decomp: &RingDecomposition) -> Result<Vec<u64>> {
    let g = &inst.graph;
    let footprints = decomp.rings.iter().map(|r| r.footprint(g)).collect::<Result<Vec<_>>>()?;
    let r = decomp.t_hat.len();
    Ok((1..(1u64 << r) - 1)
        .filter(|&m| probe(g, oracle, &inst.pairs, decomp, m, &footprints).is_some())
        .collect())
}

/// Number of path edges crossing the cut.
pub fn crossing_count(path: &[usize], side_x: &[bool]) -> usize {
    path.windows(2).filter(|w| side_x[w[0]] != side_x[w[1]]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen::path_instance;

    #[test]
    fn split_of_single_pair() {
        let sp = split_sets(&[(0, 1)], &[0], &[1]).unwrap();
        assert_eq!(sp.split, vec![(0, 1)]);
        assert!(sp.same_side.is_empty());
        assert_eq!(split_sets(&[(0, 1)], &[0, 1], &[]), Err(Error::NotSplitting));
    }

    #[test]
    fn pushed_cuts_on_a_path() {
        // s' - s - a - t - t'
        let inst = path_instance(5, &[(0, 4)]);
        let g = &inst.graph;
        let oracle = DistanceOracle::new(g);
        let sp = split_sets(&inst.pairs, &[0], &[4]).unwrap();
        let (g1, g2) = maximally_pushed_cuts(g, &oracle, &sp, &[0], &[4]).unwrap();
        assert_eq!(g1, vec![true, false, false, false, false]);
        assert_eq!(g2, vec![true, true, true, true, false]);
    }
}
