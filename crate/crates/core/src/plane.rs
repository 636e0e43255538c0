//! Embedded plane multigraphs given by rotation systems.
//!
//! Edge `e` owns darts `2e` (from its first endpoint) and `2e + 1`. Rotations
//! list out-darts counter-clockwise. The face walk successor of `d` is the
//! rotation successor of `rev(d)`, so `face_of(d)` is the face on the right
//! of `d`.

use crate::{Error, Result, Weight};

pub type Dart = usize;

#[inline]
pub fn rev(d: Dart) -> Dart {
    d ^ 1
}

#[inline]
pub fn edge_of(d: Dart) -> usize {
    d >> 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneGraph<W> {
    n: usize,
    tail: Vec<usize>,
    weight: Vec<W>,
    rot: Vec<Vec<Dart>>,
    pos: Vec<usize>,
    face: Vec<usize>,
    walks: Vec<Vec<Dart>>,
    outer: usize,
    outer_hint: Option<Dart>,
}

/// Mutable rotation system, finalized by [`Builder::build`].
#[derive(Clone, Debug)]
pub struct Builder<W> {
    pub tail: Vec<usize>,
    pub weight: Vec<W>,
    pub rot: Vec<Vec<Dart>>,
    pub outer_hint: Option<Dart>,
}

impl<W: Weight> Builder<W> {
    pub fn new(n: usize) -> Self {
        Builder { tail: Vec::new(), weight: Vec::new(), rot: vec![Vec::new(); n], outer_hint: None }
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    pub fn m(&self) -> usize {
        self.weight.len()
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail[rev(d)]
    }

    pub fn add_vertex(&mut self) -> usize {
        self.rot.push(Vec::new());
        self.rot.len() - 1
    }

    fn insert_at(&mut self, v: usize, d: Dart, before: Option<Dart>) {
        match before {
            Some(b) => {
                let i = self.rot[v].iter().position(|&x| x == b).expect("anchor dart not at vertex");
                self.rot[v].insert(i, d);
            }
            None => self.rot[v].push(d),
        }
    }

    /// Adds edge `u -> v`; each new dart goes just before the given anchor
    /// dart in its tail's rotation, or at the end.
    pub fn add_edge(&mut self, u: usize, v: usize, w: W, before_u: Option<Dart>, before_v: Option<Dart>) -> usize {
        let e = self.weight.len();
        self.weight.push(w);
        self.tail.push(u);
        self.tail.push(v);
        self.insert_at(u, 2 * e, before_u);
        self.insert_at(v, 2 * e + 1, before_v);
        e
    }

    /// Splits edge `e = (u, v)` at a new vertex `x`: `e` becomes `(u, x)` and
    /// the returned vertex carries a new edge `(x, v)` of weight `w2`.
    pub fn subdivide(&mut self, e: usize, w2: W) -> usize {
        let v = self.tail[2 * e + 1];
        let x = self.add_vertex();
        let f = self.weight.len();
        self.weight.push(w2);
        self.tail.push(x);
        self.tail.push(v);
        self.tail[2 * e + 1] = x;
        let i = self.rot[v].iter().position(|&d| d == 2 * e + 1).expect("dart missing");
        self.rot[v][i] = 2 * f + 1;
        self.rot[x] = vec![2 * e + 1, 2 * f];
        x
    }

    pub fn build(self) -> Result<PlaneGraph<W>> {
        PlaneGraph::from_parts(self.tail, self.weight, self.rot, self.outer_hint)
    }
}

impl<W: Weight> PlaneGraph<W> {
    /// Builds from endpoint/weight triples and per-vertex ccw lists of edge ids.
    pub fn new(n: usize, edges: &[(usize, usize, W)], rotations: &[Vec<usize>], outer_hint: Option<Dart>) -> Result<Self> {
        if rotations.len() != n {
            return Err(Error::Invalid(format!("{} rotations for {} vertices", rotations.len(), n)));
        }
        let mut tail = Vec::with_capacity(2 * edges.len());
        let mut weight = Vec::with_capacity(edges.len());
        for &(u, v, ref w) in edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u},{v}) out of range")));
            }
            tail.push(u);
            tail.push(v);
            weight.push(w.clone());
        }
        let mut rot = vec![Vec::new(); n];
        for (v, list) in rotations.iter().enumerate() {
            for &e in list {
                if e >= edges.len() {
                    return Err(Error::Invalid(format!("edge id {e} out of range")));
                }
                let (a, b, _) = &edges[e];
                let d = if *a == v {
                    2 * e
                } else if *b == v {
                    2 * e + 1
                } else {
                    return Err(Error::Invalid(format!("edge {e} not incident to {v}")));
                };
                rot[v].push(d);
            }
        }
        Self::from_parts(tail, weight, rot, outer_hint)
    }

    fn from_parts(tail: Vec<usize>, weight: Vec<W>, rot: Vec<Vec<Dart>>, outer_hint: Option<Dart>) -> Result<Self> {
        let n = rot.len();
        let nd = tail.len();
        for (e, w) in weight.iter().enumerate() {
            if *w <= W::zero() {
                return Err(Error::NonPositiveWeight(e));
            }
            if tail[2 * e] == tail[2 * e + 1] {
                return Err(Error::Invalid(format!("edge {e} is a loop")));
            }
        }
        let mut pos = vec![usize::MAX; nd];
        for (v, list) in rot.iter().enumerate() {
            for (i, &d) in list.iter().enumerate() {
                if d >= nd || pos[d] != usize::MAX || tail[d] != v {
                    return Err(Error::DuplicateDart(d.min(nd)));
                }
                pos[d] = i;
            }
        }
        if let Some(d) = pos.iter().position(|&p| p == usize::MAX) {
            return Err(Error::DuplicateDart(d));
        }
        let mut g = PlaneGraph { n, tail, weight, rot, pos, face: vec![usize::MAX; nd], walks: Vec::new(), outer: 0, outer_hint };
        for d in 0..nd {
            if g.face[d] != usize::MAX {
                continue;
            }
            let id = g.walks.len();
            let mut walk = Vec::new();
            let mut x = d;
            loop {
                g.face[x] = id;
                walk.push(x);
                x = g.walk_next(x);
                if x == d {
                    break;
                }
            }
            g.walks.push(walk);
        }
        g.check_euler()?;
        g.outer = match outer_hint {
            Some(d) if d < nd => g.face[d],
            _ => {
                let mut best = 0;
                for (i, w) in g.walks.iter().enumerate() {
                    if w.len() > g.walks.get(best).map_or(0, |b| b.len()) {
                        best = i;
                    }
                }
                best
            }
        };
        Ok(g)
    }

    fn check_euler(&self) -> Result<()> {
        let comp = self.components();
        let c = comp.iter().copied().max().map_or(0, |x| x + 1);
        let mut vs = vec![0i64; c];
        let mut es = vec![0i64; c];
        let mut fs = vec![0i64; c];
        for v in 0..self.n {
            vs[comp[v]] += 1;
            if self.rot[v].is_empty() {
                fs[comp[v]] += 1;
            }
        }
        for e in 0..self.m() {
            es[comp[self.tail[2 * e]]] += 1;
        }
        for w in &self.walks {
            fs[comp[self.tail[w[0]]]] += 1;
        }
        for i in 0..c {
            if vs[i] - es[i] + fs[i] != 2 {
                let v = comp.iter().position(|&x| x == i).unwrap_or(0);
                return Err(Error::EulerViolation(v));
            }
        }
        Ok(())
    }

    pub fn to_builder(&self) -> Builder<W> {
        Builder { tail: self.tail.clone(), weight: self.weight.clone(), rot: self.rot.clone(), outer_hint: self.outer_hint }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.weight.len()
    }

    pub fn num_darts(&self) -> usize {
        self.tail.len()
    }

    pub fn tail(&self, d: Dart) -> usize {
        self.tail[d]
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail[rev(d)]
    }

    pub fn ends(&self, e: usize) -> (usize, usize) {
        (self.tail[2 * e], self.tail[2 * e + 1])
    }

    pub fn weight(&self, e: usize) -> &W {
        &self.weight[e]
    }

    pub fn weights(&self) -> &[W] {
        &self.weight
    }

    pub fn rot(&self, v: usize) -> &[Dart] {
        &self.rot[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn rot_next(&self, d: Dart) -> Dart {
        let r = &self.rot[self.tail[d]];
        r[(self.pos[d] + 1) % r.len()]
    }

    pub fn rot_prev(&self, d: Dart) -> Dart {
        let r = &self.rot[self.tail[d]];
        r[(self.pos[d] + r.len() - 1) % r.len()]
    }

    pub fn walk_next(&self, d: Dart) -> Dart {
        self.rot_next(rev(d))
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.face[d]
    }

    /// Face on the right of `d`.
    pub fn right(&self, d: Dart) -> usize {
        self.face[d]
    }

    /// Face on the left of `d`.
    pub fn left(&self, d: Dart) -> usize {
        self.face[rev(d)]
    }

    pub fn num_faces(&self) -> usize {
        self.walks.len()
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.walks
    }

    pub fn face_walk(&self, f: usize) -> &[Dart] {
        &self.walks[f]
    }

    pub fn outer_face(&self) -> usize {
        self.outer
    }

    pub fn outer_hint(&self) -> Option<Dart> {
        self.outer_hint
    }

    /// Lowest-id dart from `u` to `v`, if adjacent.
    pub fn find_dart(&self, u: usize, v: usize) -> Option<Dart> {
        self.rot[u].iter().copied().filter(|&d| self.head(d) == v).min()
    }

    /// Dart from `u` to `v` of minimum weight (lowest id among ties).
    pub fn lightest_dart(&self, u: usize, v: usize) -> Option<Dart> {
        let mut best: Option<Dart> = None;
        for &d in &self.rot[u] {
            if self.head(d) != v {
                continue;
            }
            best = match best {
                Some(b) if self.weight[edge_of(b)] < self.weight[edge_of(d)] => Some(b),
                Some(b) if self.weight[edge_of(b)] == self.weight[edge_of(d)] && b < d => Some(b),
                _ => Some(d),
            };
        }
        best
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rot[v].iter().map(move |&d| self.head(d))
    }

    /// Component label per vertex.
    pub fn components(&self) -> Vec<usize> {
        self.components_avoiding(&vec![false; self.m()])
    }

    /// Component labels after deleting the flagged edges.
    pub fn components_avoiding(&self, removed: &[bool]) -> Vec<usize> {
        let mut lab = vec![usize::MAX; self.n];
        let mut c = 0;
        for s in 0..self.n {
            if lab[s] != usize::MAX {
                continue;
            }
            lab[s] = c;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &d in &self.rot[v] {
                    if removed[edge_of(d)] {
                        continue;
                    }
                    let u = self.head(d);
                    if lab[u] == usize::MAX {
                        lab[u] = c;
                        stack.push(u);
                    }
                }
            }
            c += 1;
        }
        lab
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Whether the vertices flagged `true` induce a connected, nonempty subgraph.
    pub fn induces_connected(&self, set: &[bool]) -> bool {
        let Some(s) = (0..self.n).find(|&v| set[v]) else { return false };
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut stack = vec![s];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if set[u] && !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == set.iter().filter(|&&b| b).count()
    }

    /// Restriction to the flagged vertices and edges (edges need both ends
    /// kept). Returns the new graph and old-to-new vertex and edge maps.
    pub fn subgraph(&self, keep_vertex: &[bool], keep_edge: &[bool]) -> Result<(Self, Vec<Option<usize>>, Vec<Option<usize>>)> {
        let mut vmap = vec![None; self.n];
        let mut nv = 0;
        for v in 0..self.n {
            if keep_vertex[v] {
                vmap[v] = Some(nv);
                nv += 1;
            }
        }
        let mut emap = vec![None; self.m()];
        let mut b = Builder::new(nv);
        for e in 0..self.m() {
            let (u, v) = self.ends(e);
            if keep_edge[e] && keep_vertex[u] && keep_vertex[v] {
                emap[e] = Some(b.weight.len());
                b.weight.push(self.weight[e].clone());
                b.tail.push(vmap[u].unwrap());
                b.tail.push(vmap[v].unwrap());
            }
        }
        for v in 0..self.n {
            if let Some(nv) = vmap[v] {
                b.rot[nv] = self.rot[v].iter().filter_map(|&d| emap[edge_of(d)].map(|e| 2 * e + (d & 1))).collect();
            }
        }
        b.outer_hint = self.outer_hint.and_then(|d| emap[edge_of(d)].map(|e| 2 * e + (d & 1)));
        Ok((b.build()?, vmap, emap))
    }

    pub fn dual(&self) -> Result<DualGraph> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let ends = (0..self.m()).map(|e| (self.left(2 * e), self.right(2 * e))).collect();
        Ok(DualGraph { faces: self.num_faces(), ends })
    }

    /// Dual dart of primal dart `d`: from `left(d)` to `right(d)`.
    pub fn dual_dart(&self, d: Dart) -> (usize, usize) {
        (self.left(d), self.right(d))
    }
}

/// Dual multigraph; dual edge `e` crosses primal edge `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub faces: usize,
    /// `(left, right)` of dart `2e`.
    pub ends: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn m(&self) -> usize {
        self.ends.len()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.ends[e].0 == self.ends[e].1
    }
}

/// The dual cycle separating `A` (flagged) from its complement, as the
/// sequence of `A -> B` primal darts whose dual darts it traverses.
pub fn separating_dual_cycle<W: Weight>(g: &PlaneGraph<W>, in_a: &[bool]) -> Result<Vec<Dart>> {
    let in_b: Vec<bool> = in_a.iter().map(|&b| !b).collect();
    if !g.induces_connected(in_a) || !g.induces_connected(&in_b) {
        return Err(Error::SideNotConnected);
    }
    let is_cut = |d: Dart| in_a[g.tail(d)] != in_a[g.head(d)];
    let d0 = (0..g.num_darts())
        .find(|&d| in_a[g.tail(d)] && !in_a[g.head(d)])
        .ok_or(Error::SideNotConnected)?;
    let mut cycle = vec![d0];
    let mut d = d0;
    loop {
        let walk = g.face_walk(g.right(d));
        let i = walk.iter().position(|&x| x == d).expect("dart on its face");
        let mut next = None;
        for j in 1..walk.len() {
            let b = walk[(i + j) % walk.len()];
            if is_cut(b) {
                next = Some(rev(b));
                break;
            }
        }
        let nd = next.unwrap_or(rev(d));
        let nd = if is_cut(nd) && in_a[g.tail(nd)] { nd } else { return Err(Error::SideNotConnected) };
        if nd == d0 {
            break;
        }
        if cycle.len() > g.num_darts() {
            return Err(Error::SideNotConnected);
        }
        cycle.push(nd);
        d = nd;
    }
    Ok(cycle)
}

/// Combinatorial trace of the open region between two nested dual cycles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Footprint {
    pub vertices: Vec<usize>,
    /// Half-edges protruding into the region, as darts leaving inside vertices.
    pub darts: Vec<Dart>,
    pub faces: Vec<usize>,
}

impl Footprint {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.darts.is_empty() && self.faces.is_empty()
    }

    pub fn intersects(&self, other: &Footprint) -> bool {
        let hit = |a: &[usize], b: &[usize]| a.iter().any(|x| b.contains(x));
        hit(&self.vertices, &other.vertices) || hit(&self.darts, &other.darts) || hit(&self.faces, &other.faces)
    }
}

/// Footprint of the region between dual cycles `c1` and `c2` (given as primal
/// dart lists as returned by [`separating_dual_cycle`]).
pub fn region_footprint<W: Weight>(g: &PlaneGraph<W>, c1: &[Dart], c2: &[Dart]) -> Result<Footprint> {
    let mut on1 = vec![false; g.m()];
    let mut on2 = vec![false; g.m()];
    for &d in c1 {
        on1[edge_of(d)] = true;
    }
    for &d in c2 {
        on2[edge_of(d)] = true;
    }
    if on1 == on2 {
        return Ok(Footprint::default());
    }
    let side = |own: &[bool], other: &[bool]| -> Result<Vec<bool>> {
        let comp = g.components_avoiding(own);
        let mut label = None;
        for e in 0..g.m() {
            if other[e] && !own[e] {
                for v in [g.ends(e).0, g.ends(e).1] {
                    match label {
                        None => label = Some(comp[v]),
                        Some(l) if l != comp[v] => return Err(Error::CyclesCross),
                        _ => {}
                    }
                }
            }
        }
        let l = label.ok_or(Error::CyclesCross)?;
        Ok(comp.iter().map(|&c| c == l).collect())
    };
    let s1 = side(&on1, &on2)?;
    let s2 = side(&on2, &on1)?;
    let between: Vec<bool> = (0..g.n()).map(|v| s1[v] && s2[v]).collect();
    let mut fp = Footprint::default();
    fp.vertices = (0..g.n()).filter(|&v| between[v]).collect();
    for d in 0..g.num_darts() {
        let e = edge_of(d);
        let (t, h) = (g.tail(d), g.head(d));
        if !between[t] {
            continue;
        }
        if between[h] || on1[e] != on2[e] {
            fp.darts.push(d);
        }
    }
    for f in 0..g.num_faces() {
        let walk = g.face_walk(f);
        if walk.iter().any(|&d| on1[edge_of(d)] || on2[edge_of(d)]) {
            continue;
        }
        if walk.iter().all(|&d| between[g.tail(d)]) {
            fp.faces.push(f);
        }
    }
    Ok(fp)
}
