//! Geodesic Steiner trees, their refinement against a ring decomposition and
//! the dual skeleton with its spinal paths.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::geodesics::dijkstra;
use crate::instances::{DapInstance, DspInstance};
use crate::plane::{edge_of, rev, Builder, Dart, PlaneGraph};
use crate::rings::{DagStructure, RingDecomposition};
use crate::{Error, Result, Weight};

/// Maximal tree paths with non-principal internal vertices. `adj[u]` lists
/// `(head, dart)` for tree darts leaving `u`; dart ids must be paired by
/// `rev`.
pub fn spinal_walks(adj: &[Vec<(usize, Dart)>], principal: &[bool]) -> Result<Vec<Vec<Dart>>> {
    let mut used: HashMap<usize, ()> = HashMap::new();
    let mut out = Vec::new();
    for u in 0..adj.len() {
        if !principal[u] {
            continue;
        }
        for &(v, d) in &adj[u] {
            if used.contains_key(&edge_of(d)) {
                continue;
            }
            used.insert(edge_of(d), ());
            let mut path = vec![d];
            let (mut cur, mut last) = (v, edge_of(d));
            while !principal[cur] {
                let &(w, d2) = adj[cur]
                    .iter()
                    .find(|&&(_, x)| edge_of(x) != last)
                    .ok_or_else(|| Error::Invalid(format!("non-principal leaf {cur}")))?;
                used.insert(edge_of(d2), ());
                path.push(d2);
                last = edge_of(d2);
                cur = w;
            }
            out.push(path);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SteinerTree {
    pub in_edge: Vec<bool>,
    pub principal: Vec<usize>,
    /// Spinal paths as dart sequences.
    pub spinal: Vec<Vec<Dart>>,
}

impl SteinerTree {
    /// Tree over the flagged edges; principal vertices are the terminals and
    /// the vertices of degree at least three.
    pub fn from_edges<W: Weight>(g: &PlaneGraph<W>, in_edge: Vec<bool>, terminals: &[usize]) -> Result<Self> {
        let adj = primal_adjacency(g, &in_edge);
        let mut is_p = vec![false; g.n()];
        for &t in terminals {
            is_p[t] = true;
        }
        for v in 0..g.n() {
            if adj[v].len() >= 3 {
                is_p[v] = true;
            }
        }
        let spinal = spinal_walks(&adj, &is_p)?;
        let principal = (0..g.n()).filter(|&v| is_p[v]).collect();
        Ok(SteinerTree { in_edge, principal, spinal })
    }

    pub fn degree<W: Weight>(&self, g: &PlaneGraph<W>, v: usize) -> usize {
        g.rot(v).iter().filter(|&&d| self.in_edge[edge_of(d)]).count()
    }

    pub fn vertices<W: Weight>(&self, g: &PlaneGraph<W>) -> Vec<usize> {
        (0..g.n()).filter(|&v| self.degree(g, v) > 0).collect()
    }

    pub fn spinal_vertices<W: Weight>(&self, g: &PlaneGraph<W>) -> Vec<Vec<usize>> {
        self.spinal
            .iter()
            .map(|p| {
                let mut vs = vec![g.tail(p[0])];
                vs.extend(p.iter().map(|&d| g.head(d)));
                vs
            })
            .collect()
    }
}

fn primal_adjacency<W: Weight>(g: &PlaneGraph<W>, in_edge: &[bool]) -> Vec<Vec<(usize, Dart)>> {
    (0..g.n())
        .map(|v| g.rot(v).iter().filter(|&&d| in_edge[edge_of(d)]).map(|&d| (g.head(d), d)).collect())
        .collect()
}

/// Shortest path between the first two terminals, then repeatedly a
/// shortest path from the current tree to the next uncovered terminal.
pub fn geodesic_steiner_tree<W: Weight>(inst: &DspInstance<W>) -> Result<SteinerTree> {
    let g = &inst.graph;
    let terms = inst.terminals();
    let mut in_edge = vec![false; g.m()];
    let mut in_tree = vec![false; g.n()];
    in_tree[terms[0]] = true;
    for &t in &terms[1..] {
        if in_tree[t] {
            continue;
        }
        let sources: Vec<usize> = (0..g.n()).filter(|&v| in_tree[v]).collect();
        let (_, pred) = dijkstra(g, &sources);
        let mut v = t;
        while !in_tree[v] {
            let d = pred[v].ok_or(Error::Unreachable(t, sources[0]))?;
            in_edge[edge_of(d)] = true;
            in_tree[v] = true;
            v = g.tail(d);
        }
    }
    SteinerTree::from_edges(g, in_edge, &terms)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkPath {
    pub vertices: Vec<usize>,
    pub darts: Vec<Dart>,
}

/// Vertex-disjoint directed `T_X -> T_Y` paths in the ring dag, by unit
/// vertex-capacity augmenting paths.
pub fn ring_linkage<W: Weight>(g: &PlaneGraph<W>, st: &DagStructure, demand: usize) -> Option<Vec<LinkPath>> {
    let n = g.n();
    let (src, snk) = (2 * n, 2 * n + 1);
    // arc list: (to, cap, dart or usize::MAX); residual pairs at i ^ 1
    let mut to = Vec::new();
    let mut cap = Vec::new();
    let mut tag = Vec::new();
    let mut adj = vec![Vec::new(); 2 * n + 2];
    let mut add = |a: usize, b: usize, t: usize, adj: &mut Vec<Vec<usize>>| {
        adj[a].push(to.len());
        to.push(b);
        cap.push(1i32);
        tag.push(t);
        adj[b].push(to.len());
        to.push(a);
        cap.push(0);
        tag.push(usize::MAX);
    };
    for &v in &st.vertices {
        add(2 * v, 2 * v + 1, usize::MAX, &mut adj);
    }
    for &d in &st.arcs {
        add(2 * g.tail(d) + 1, 2 * g.head(d), d, &mut adj);
    }
    for &v in &st.t_x {
        add(src, 2 * v, usize::MAX, &mut adj);
    }
    for &v in &st.t_y {
        add(2 * v + 1, snk, usize::MAX, &mut adj);
    }
    let mut flow = 0;
    while flow < demand {
        let mut prev = vec![usize::MAX; 2 * n + 2];
        let mut seen = vec![false; 2 * n + 2];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            for &a in &adj[x] {
                if cap[a] > 0 && !seen[to[a]] {
                    seen[to[a]] = true;
                    prev[to[a]] = a;
                    queue.push_back(to[a]);
                }
            }
        }
        if !seen[snk] {
            return None;
        }
        let mut x = snk;
        while x != src {
            let a = prev[x];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
            x = to[a ^ 1];
        }
        flow += 1;
    }
    let mut out = Vec::new();
    for &a0 in &adj[src] {
        if cap[a0] != 0 {
            continue;
        }
        let mut x = to[a0];
        let mut path = LinkPath { vertices: vec![x / 2], darts: Vec::new() };
        loop {
            let next = adj[x].iter().copied().find(|&a| a % 2 == 0 && cap[a] == 0 && to[a] != src);
            let Some(a) = next else { break };
            if to[a] == snk {
                break;
            }
            if tag[a] != usize::MAX {
                path.darts.push(tag[a]);
                path.vertices.push(to[a] / 2);
            }
            x = to[a];
        }
        out.push(path);
    }
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    Original,
    EdgeMid,
    Face,
}

/// A derived annotated instance with its vertex provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Transformed<W> {
    pub dap: DapInstance<W>,
    /// Vertex of the source graph this vertex stands for.
    pub origin: Vec<Option<usize>>,
    pub kind: Vec<VertexKind>,
}

impl<W: Weight> Transformed<W> {
    /// Projects a vertex path onto the source graph.
    pub fn project(&self, path: &[usize]) -> Vec<usize> {
        path.iter().filter_map(|&v| self.origin[v]).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RefineStats {
    pub subdivided: usize,
    pub cycle_edges: usize,
    pub pruned_connectors: usize,
    pub deleted_cycle_edges: usize,
    pub dropped_edges: usize,
    pub spinal_paths: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn prune_leaves(n: usize, ends: &[(usize, usize)], keep: &mut [bool], protected: &[bool]) {
    let mut deg = vec![0usize; n];
    for (e, &(u, v)) in ends.iter().enumerate() {
        if keep[e] {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    loop {
        let mut changed = false;
        for (e, &(u, v)) in ends.iter().enumerate() {
            if keep[e] && ((deg[u] == 1 && !protected[u]) || (deg[v] == 1 && !protected[v])) {
                keep[e] = false;
                deg[u] -= 1;
                deg[v] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Subdivides ring boundaries, threads the boundary cycles and one linkage
/// path per ring into the tree and cuts the result back to a tree.
pub fn refine<W: Weight>(
    inst: &DspInstance<W>,
    ann: &[Vec<bool>],
    tree: &SteinerTree,
    decomp: &RingDecomposition,
    links: &[LinkPath],
) -> Result<(Transformed<W>, SteinerTree, RefineStats)> {
    let g = &inst.graph;
    let n0 = g.n();
    let terms = inst.terminals();
    let mut stats = RefineStats::default();
    let mut b = g.to_builder();
    for w in b.weight.iter_mut() {
        *w = W::one();
    }
    let mut ann2: Vec<Vec<bool>> = ann.to_vec();

    let mut cycles = Vec::new();
    for ring in &decomp.rings {
        let (c1, c2) = ring.cycles(g)?;
        cycles.push([c1, c2]);
    }
    let mut mid_of: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut boundary: Vec<usize> = cycles.iter().flatten().flatten().map(|&d| edge_of(d)).collect();
    boundary.sort_unstable();
    boundary.dedup();
    for &e in &boundary {
        let x = b.subdivide(e, W::one());
        let f = b.m() - 1;
        for a in ann2.iter_mut() {
            let (p, q) = (a[2 * e], a[2 * e + 1]);
            a.push(p);
            a.push(q);
        }
        mid_of.insert(e, (x, f));
    }
    stats.subdivided = boundary.len();
    let fwd = |c: Dart| {
        let (_, f) = mid_of[&edge_of(c)];
        if c % 2 == 0 {
            2 * f
        } else {
            c
        }
    };
    let back = |c: Dart| {
        let (_, f) = mid_of[&edge_of(c)];
        if c % 2 == 0 {
            c + 1
        } else {
            2 * f
        }
    };

    let mut ring_of_mid: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut chord_of: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut is_cycle_edge: Vec<bool> = vec![false; b.m()];
    for (i, pair) in cycles.iter().enumerate() {
        for c in pair {
            for &d in c {
                ring_of_mid.entry(mid_of[&edge_of(d)].0).or_default().push(i);
            }
            if c.len() < 2 {
                continue;
            }
            for j in 0..c.len() {
                let (a, z) = (c[j], c[(j + 1) % c.len()]);
                let (xa, xz) = (mid_of[&edge_of(a)].0, mid_of[&edge_of(z)].0);
                let phi = g.right(a);
                let key = (xa.min(xz), xa.max(xz), phi);
                if chord_of.contains_key(&key) {
                    continue;
                }
                let e = b.add_edge(xa, xz, W::one(), Some(fwd(a)), Some(back(z)));
                for a in ann2.iter_mut() {
                    a.push(false);
                    a.push(false);
                }
                chord_of.insert(key, e);
                is_cycle_edge.resize(b.m(), false);
                is_cycle_edge[e] = true;
            }
        }
    }
    is_cycle_edge.resize(b.m(), false);
    stats.cycle_edges = chord_of.len();

    let mut removed = vec![false; b.n()];
    for ring in &decomp.rings {
        for (v, m) in ring.u_mid().into_iter().enumerate() {
            if m {
                removed[v] = true;
            }
        }
    }
    let ends: Vec<(usize, usize)> = (0..b.m()).map(|e| (b.tail[2 * e], b.tail[2 * e + 1])).collect();
    let mut keep = vec![false; b.m()];
    for e in 0..g.m() {
        if !tree.in_edge[e] {
            continue;
        }
        let parts = match mid_of.get(&e) {
            Some(&(_, f)) => vec![e, f],
            None => vec![e],
        };
        for p in parts {
            let (u, v) = ends[p];
            if !removed[u] && !removed[v] {
                keep[p] = true;
            }
        }
    }
    for &e in chord_of.values() {
        keep[e] = true;
    }
    for (i, ring) in decomp.rings.iter().enumerate() {
        let Some(link) = links.get(i) else { continue };
        for &d in &link.darts {
            keep[edge_of(d)] = true;
        }
        let first = link.vertices[0];
        let last = *link.vertices.last().unwrap();
        let half_in = cycles[i][0].iter().find(|&&c| g.head(c) == first).map(|&c| {
            let (_, f) = mid_of[&edge_of(c)];
            if c % 2 == 0 {
                f
            } else {
                edge_of(c)
            }
        });
        let half_out = cycles[i][1].iter().find(|&&c| g.tail(c) == last).map(|&c| {
            let (_, f) = mid_of[&edge_of(c)];
            if c % 2 == 0 {
                edge_of(c)
            } else {
                f
            }
        });
        match (half_in, half_out) {
            (Some(a), Some(z)) => {
                keep[a] = true;
                keep[z] = true;
            }
            _ => return Err(Error::Invalid(format!("linkage of ring {i} does not reach its boundary"))),
        }
        let _ = ring;
    }

    let mut is_term = vec![false; b.n()];
    for &t in &terms {
        is_term[t] = true;
    }
    // duplicate connectors between boundary cycles of distinct rings
    let is_cyc = |v: usize| ring_of_mid.contains_key(&v);
    let free = |v: usize| !is_cyc(v) && !(v < n0 && removed[v]);
    let mut uf = UnionFind::new(b.n());
    let mut deg = vec![0usize; b.n()];
    for e in 0..b.m() {
        if keep[e] {
            let (u, v) = ends[e];
            deg[u] += 1;
            deg[v] += 1;
            if free(u) && free(v) {
                uf.union(u, v);
            }
        }
    }
    let mut pieces: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..b.n() {
        if deg[v] > 0 && free(v) {
            pieces.entry(uf.find(v)).or_default().push(v);
        }
    }
    let mut order: Vec<Vec<usize>> = pieces.into_values().collect();
    order.sort_by_key(|p| p[0]);
    let mut seen_keys: HashMap<(usize, usize), ()> = HashMap::new();
    for piece in order {
        if piece.iter().any(|&v| is_term[v] || deg[v] > 2) {
            continue;
        }
        let mut attach = Vec::new();
        for e in 0..b.m() {
            let (u, v) = ends[e];
            if !keep[e] {
                continue;
            }
            if piece.contains(&u) && is_cyc(v) {
                attach.push(v);
            } else if piece.contains(&v) && is_cyc(u) {
                attach.push(u);
            }
        }
        if attach.len() != 2 {
            continue;
        }
        let ra = ring_of_mid[&attach[0]].iter().min().copied().unwrap();
        let rz = ring_of_mid[&attach[1]].iter().min().copied().unwrap();
        if ra == rz {
            continue;
        }
        let key = (ra.min(rz), ra.max(rz));
        if seen_keys.insert(key, ()).is_some() {
            for e in 0..b.m() {
                let (u, v) = ends[e];
                if keep[e] && (piece.contains(&u) || piece.contains(&v)) {
                    keep[e] = false;
                }
            }
            stats.pruned_connectors += 1;
        }
    }

    // delete a maximal set of cycle edges keeping the rest a tree
    let mut uf = UnionFind::new(b.n());
    for e in 0..b.m() {
        if keep[e] && !is_cycle_edge[e] && !uf.union(ends[e].0, ends[e].1) {
            keep[e] = false;
            stats.dropped_edges += 1;
        }
    }
    for e in 0..b.m() {
        if keep[e] && is_cycle_edge[e] && !uf.union(ends[e].0, ends[e].1) {
            keep[e] = false;
            stats.deleted_cycle_edges += 1;
        }
    }
    prune_leaves(b.n(), &ends, &mut keep, &is_term);

    let n_all = b.n();
    let graph = b.build()?;
    let mut kind = vec![VertexKind::EdgeMid; n_all];
    let mut origin = vec![None; n_all];
    for v in 0..n0 {
        kind[v] = VertexKind::Original;
        origin[v] = Some(v);
    }
    let dap = DapInstance { graph, pairs: inst.pairs.clone(), ann: ann2 };
    let t = SteinerTree::from_edges(&dap.graph, keep, &terms)?;
    check_tree(&dap.graph, &t, &terms)?;
    stats.spinal_paths = t.spinal.len();
    Ok((Transformed { dap, origin, kind }, t, stats))
}

/// Whether the tree edges form one tree containing all terminals.
pub fn check_tree<W: Weight>(g: &PlaneGraph<W>, t: &SteinerTree, terminals: &[usize]) -> Result<()> {
    let mut uf = UnionFind::new(g.n());
    let mut edges = 0;
    for e in 0..g.m() {
        if t.in_edge[e] {
            edges += 1;
            let (u, v) = g.ends(e);
            if !uf.union(u, v) {
                return Err(Error::Invalid("tree has a cycle".into()));
            }
        }
    }
    let verts = t.vertices(g).len();
    if verts != edges + 1 {
        return Err(Error::Invalid("tree is not connected".into()));
    }
    let r = uf.find(terminals[0]);
    if terminals.iter().any(|&x| uf.find(x) != r) {
        return Err(Error::Invalid("tree misses a terminal".into()));
    }
    Ok(())
}

fn builder_faces<W: Weight>(b: &Builder<W>) -> Vec<Vec<Dart>> {
    let nd = 2 * b.m();
    let mut pos = vec![0usize; nd];
    for r in &b.rot {
        for (i, &d) in r.iter().enumerate() {
            pos[d] = i;
        }
    }
    let next = |d: Dart| {
        let x = rev(d);
        let r = &b.rot[b.tail[x]];
        r[(pos[x] + 1) % r.len()]
    };
    let mut seen = vec![false; nd];
    let mut out = Vec::new();
    for d0 in 0..nd {
        if seen[d0] {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = d0;
        while !seen[d] {
            seen[d] = true;
            walk.push(d);
            d = next(d);
        }
        out.push(walk);
    }
    out
}

/// Dual tree in the face-subdivided graph, with its spinal paths. Dual darts
/// are written as the primal darts they cross, `d` standing for
/// `left(d) -> right(d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skeleton {
    pub in_k: Vec<bool>,
    /// Face of each terminal, in the order `s_1, t_1, s_2, ...`.
    pub terminal_faces: Vec<usize>,
    pub principal: Vec<usize>,
    pub spinal: Vec<Vec<Dart>>,
    /// Dual walks tracking the spinal paths of the primal tree.
    pub follow: Vec<Vec<Dart>>,
}

impl Skeleton {
    pub fn faces_of<W: Weight>(&self, g: &PlaneGraph<W>, q: usize) -> Vec<usize> {
        let p = &self.spinal[q];
        let mut fs = vec![g.left(p[0])];
        fs.extend(p.iter().map(|&d| g.right(d)));
        fs
    }

    /// Oriented spinal path `2q` (stored direction) or `2q + 1` (reversed).
    pub fn oriented(&self, o: usize) -> Vec<Dart> {
        let p = &self.spinal[o / 2];
        if o % 2 == 0 {
            p.clone()
        } else {
            p.iter().rev().map(|&d| rev(d)).collect()
        }
    }
}

/// The dual walk crossing the edges met by a curve running along `path` on
/// its right-hand side.
pub fn follow<W: Weight>(g: &PlaneGraph<W>, path: &[Dart]) -> Vec<Dart> {
    let mut out = Vec::new();
    for w in path.windows(2) {
        let (b, c) = (w[0], w[1]);
        let mut o = g.rot_next(rev(b));
        while o != c {
            out.push(rev(o));
            o = g.rot_next(o);
        }
    }
    out
}

/// Dart map from a graph to its face-subdivided version.
pub type DartMap = Vec<Vec<Dart>>;

/// Detaches terminals, subdivides every edge, adds a vertex per face joined
/// to all its corners, reattaches terminals, and builds the skeleton.
pub fn dualize_skeleton<W: Weight>(src: &DapInstance<W>, tree: &SteinerTree) -> Result<(Transformed<W>, Skeleton, DartMap)> {
    let g = &src.graph;
    let terms = src.terminals();
    let mut is_term = vec![false; g.n()];
    for &t in &terms {
        if g.degree(t) != 1 {
            return Err(Error::Invalid(format!("terminal {t} is not a pendant")));
        }
        is_term[t] = true;
    }
    let pendant = |e: usize| {
        let (u, v) = g.ends(e);
        is_term[u] || is_term[v]
    };
    let mut b: Builder<W> = Builder::new(g.n());
    let mut new_id = vec![usize::MAX; g.m()];
    for e in 0..g.m() {
        if !pendant(e) {
            new_id[e] = b.m();
            b.weight.push(W::one());
            b.tail.push(g.tail(2 * e));
            b.tail.push(g.tail(2 * e + 1));
        }
    }
    for v in 0..g.n() {
        b.rot[v] = g
            .rot(v)
            .iter()
            .filter(|&&d| !pendant(edge_of(d)))
            .map(|&d| 2 * new_id[edge_of(d)] + (d & 1))
            .collect();
    }
    let base_m = b.m();
    let mut half = vec![0usize; base_m];
    let mut kind = vec![VertexKind::Original; g.n()];
    for (e, h) in half.iter_mut().enumerate() {
        b.subdivide(e, W::one());
        *h = b.m() - 1;
        kind.push(VertexKind::EdgeMid);
    }
    let walks = builder_faces(&b);
    for walk in &walks {
        let vf = b.add_vertex();
        kind.push(VertexKind::Face);
        for &d in walk {
            let u = b.tail[d];
            b.add_edge(vf, u, W::one(), None, Some(d));
        }
        b.rot[vf].reverse();
    }
    let mut pend_new = HashMap::new();
    for &t in &terms {
        let d = g.rot(t)[0];
        let u = g.head(d);
        let mut c = g.rot_next(rev(d));
        while pendant(edge_of(c)) && c != rev(d) {
            c = g.rot_next(c);
        }
        let anchor = (!pendant(edge_of(c))).then(|| {
            let a = new_id[edge_of(c)];
            if c % 2 == 0 {
                2 * a
            } else {
                2 * half[a] + 1
            }
        });
        let e2 = b.add_edge(u, t, W::one(), anchor, None);
        pend_new.insert(edge_of(d), (e2, rev(d)));
    }
    let nd = 2 * b.m();
    let mut map: DartMap = vec![Vec::new(); g.num_darts()];
    for e in 0..g.m() {
        if let Some(&(e2, ut)) = pend_new.get(&e) {
            map[ut] = vec![2 * e2];
            map[rev(ut)] = vec![2 * e2 + 1];
        } else {
            let (a, f) = (new_id[e], half[new_id[e]]);
            map[2 * e] = vec![2 * a, 2 * f];
            map[2 * e + 1] = vec![2 * f + 1, 2 * a + 1];
        }
    }
    let mut ann = vec![vec![false; nd]; src.ann.len()];
    for (i, a) in ann.iter_mut().enumerate() {
        for d in 0..g.num_darts() {
            for &d2 in &map[d] {
                a[d2] = src.ann[i][d];
            }
        }
    }
    let n_all = b.n();
    let graph = b.build()?;
    let mut origin = vec![None; n_all];
    for (v, o) in origin.iter_mut().enumerate().take(g.n()) {
        *o = Some(v);
    }
    let g2 = graph;

    let mut follows = Vec::new();
    let mut in_k0 = vec![false; g2.m()];
    for p in &tree.spinal {
        let mapped: Vec<Dart> = p.iter().flat_map(|&d| map[d].iter().copied()).collect();
        let w = follow(&g2, &mapped);
        for &d in &w {
            in_k0[edge_of(d)] = true;
        }
        follows.push(w);
    }
    for v in 0..g.n() {
        if tree.degree(g, v) >= 3 {
            for &d in g2.rot(v) {
                in_k0[edge_of(d)] = true;
            }
        }
    }
    let terminal_faces: Vec<usize> = terms.iter().map(|&t| g2.face_of(g2.rot(t)[0])).collect();
    let in_k = minimal_dual_tree(&g2, &in_k0, &terminal_faces)?;
    let adj = dual_adjacency(&g2, &in_k);
    let mut is_p = vec![false; g2.num_faces()];
    for &f in &terminal_faces {
        is_p[f] = true;
    }
    for f in 0..g2.num_faces() {
        if adj[f].len() >= 3 {
            is_p[f] = true;
        }
    }
    let spinal = spinal_walks(&adj, &is_p)?;
    let principal = (0..g2.num_faces()).filter(|&f| is_p[f]).collect();
    let sk = Skeleton { in_k, terminal_faces, principal, spinal, follow: follows };
    let dap = DapInstance { graph: g2, pairs: src.pairs.clone(), ann };
    Ok((Transformed { dap, origin, kind }, sk, map))
}

pub fn dual_adjacency<W: Weight>(g: &PlaneGraph<W>, in_k: &[bool]) -> Vec<Vec<(usize, Dart)>> {
    let mut adj = vec![Vec::new(); g.num_faces()];
    for e in 0..g.m() {
        if in_k[e] {
            let d = 2 * e;
            adj[g.left(d)].push((g.right(d), d));
            adj[g.right(d)].push((g.left(d), rev(d)));
        }
    }
    adj
}

/// Spanning tree of the flagged dual edges from the first terminal face,
/// cut back to the faces needed to connect all terminal faces.
fn minimal_dual_tree<W: Weight>(g: &PlaneGraph<W>, in_k0: &[bool], terminal_faces: &[usize]) -> Result<Vec<bool>> {
    let nf = g.num_faces();
    let mut adj = vec![Vec::new(); nf];
    for e in 0..g.m() {
        let (l, r) = (g.left(2 * e), g.right(2 * e));
        if in_k0[e] && l != r {
            adj[l].push((r, e));
            adj[r].push((l, e));
        }
    }
    let mut seen = vec![false; nf];
    let mut keep = vec![false; g.m()];
    let root = terminal_faces[0];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        for &(h, e) in &adj[f] {
            if !seen[h] {
                seen[h] = true;
                keep[e] = true;
                queue.push_back(h);
            }
        }
    }
    if terminal_faces.iter().any(|&f| !seen[f]) {
        return Err(Error::Invalid("skeleton does not reach every terminal face".into()));
    }
    let ends: Vec<(usize, usize)> = (0..g.m()).map(|e| (g.left(2 * e), g.right(2 * e))).collect();
    let mut protected = vec![false; nf];
    for &f in terminal_faces {
        protected[f] = true;
    }
    prune_leaves(nf, &ends, &mut keep, &protected);
    Ok(keep)
}
