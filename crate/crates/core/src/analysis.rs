//! Handles, pulls, loads and winding numbers of solution paths.

use serde::Serialize;

use crate::homology::labelling::char_word;
use crate::homology::Labelling;
use crate::plane::{edge_of, Dart, PlaneGraph};
use crate::skeleton::Skeleton;
use crate::{Error, Result, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HandleKind {
    Winding,
    Regular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Handle {
    /// Vertices of the handle, first and last on the host path.
    pub path: Vec<usize>,
    /// Positions of the endpoints on the host path.
    pub at: (usize, usize),
    pub kind: HandleKind,
    /// Regular handle whose pocket holds no terminal.
    pub empty: bool,
}

fn find(c: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while c[r] != r {
        r = c[r];
    }
    c[x] = r;
    r
}

/// Face components of the plane minus the cycle through `cycle` edges.
fn sides<W: Weight>(g: &PlaneGraph<W>, on_cycle: &[bool]) -> Vec<usize> {
    let mut c: Vec<usize> = (0..g.num_faces()).collect();
    for e in 0..g.m() {
        if !on_cycle[e] {
            let (a, b) = (find(&mut c, g.left(2 * e)), find(&mut c, g.right(2 * e)));
            c[a] = b;
        }
    }
    (0..g.num_faces()).map(|f| find(&mut c, f)).collect()
}

fn vertex_side<W: Weight>(g: &PlaneGraph<W>, side: &[usize], v: usize) -> usize {
    side[g.left(g.rot(v)[0])]
}

/// All handles of `q` cut from `p` between consecutive visits of `q`.
pub fn classify_handles<W: Weight>(g: &PlaneGraph<W>, p: &[usize], q: &[usize], terminals: &[usize]) -> Result<Vec<Handle>> {
    let mut pos = vec![usize::MAX; g.n()];
    for (j, &v) in q.iter().enumerate() {
        pos[v] = j;
    }
    let hits: Vec<usize> = (0..p.len()).filter(|&j| pos[p[j]] != usize::MAX).collect();
    let mut out = Vec::new();
    for w in hits.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ra, rb) = (pos[p[a]], pos[p[b]]);
        let interior = |r: usize| r > 0 && r + 1 < q.len();
        if !interior(ra) || !interior(rb) || (b == a + 1 && ra.abs_diff(rb) == 1) {
            continue;
        }
        let path = p[a..=b].to_vec();
        let mut on = vec![false; g.m()];
        for x in path.windows(2) {
            on[edge_of(g.find_dart(x[0], x[1]).ok_or(Error::NotAPath)?)] = true;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        for x in q[lo..=hi].windows(2) {
            on[edge_of(g.find_dart(x[0], x[1]).ok_or(Error::NotAPath)?)] = true;
        }
        let side = sides(g, &on);
        let s0 = vertex_side(g, &side, q[0]);
        let s1 = vertex_side(g, &side, *q.last().unwrap());
        let kind = if s0 != s1 { HandleKind::Winding } else { HandleKind::Regular };
        let mut on_v = vec![false; g.n()];
        path.iter().chain(&q[lo..=hi]).for_each(|&v| on_v[v] = true);
        let empty = kind == HandleKind::Regular && terminals.iter().all(|&t| on_v[t] || vertex_side(g, &side, t) == s0);
        out.push(Handle { path, at: (ra, rb), kind, empty });
    }
    Ok(out)
}

/// `Q[q1, r1] + H + Q[r2, q2]` for an empty regular handle.
pub fn pull(q: &[usize], h: &Handle) -> Result<Vec<usize>> {
    if h.kind != HandleKind::Regular || !h.empty {
        return Err(Error::NotEmptyHandle);
    }
    let (mut path, (mut r1, mut r2)) = (h.path.clone(), h.at);
    if r1 > r2 {
        path.reverse();
        std::mem::swap(&mut r1, &mut r2);
    }
    let mut out = q[..r1].to_vec();
    out.extend(&path);
    out.extend(&q[r2 + 1..]);
    Ok(out)
}

/// Edges not on `q` with an endpoint on `q`, used by the family.
pub fn load<W: Weight>(g: &PlaneGraph<W>, paths: &[Vec<usize>], q: &[usize]) -> usize {
    let mut on_q = vec![false; g.n()];
    q.iter().for_each(|&v| on_q[v] = true);
    let q_edges: Vec<(usize, usize)> = q.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    paths
        .iter()
        .flat_map(|p| p.windows(2))
        .filter(|w| (on_q[w[0]] || on_q[w[1]]) && !q_edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))))
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HandleCount {
    pub path: usize,
    pub regular: usize,
    pub winding: usize,
    pub empty: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub q: Vec<usize>,
    pub load: usize,
    pub upper_comb_load: usize,
    pub pulls: usize,
    pub pulled: Vec<usize>,
    pub handles: Vec<HandleCount>,
}

/// Exact load and the load after pulling empty regular solution handles
/// while that strictly lowers it.
pub fn load_report<W: Weight>(g: &PlaneGraph<W>, paths: &[Vec<usize>], q: &[usize], terminals: &[usize]) -> Result<LoadReport> {
    let initial = load(g, paths, q);
    let mut handles = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let hs = classify_handles(g, p, q, terminals)?;
        handles.push(HandleCount {
            path: i,
            regular: hs.iter().filter(|h| h.kind == HandleKind::Regular).count(),
            winding: hs.iter().filter(|h| h.kind == HandleKind::Winding).count(),
            empty: hs.iter().filter(|h| h.empty).count(),
        });
    }
    let mut cur = q.to_vec();
    let mut cur_load = initial;
    let mut pulls = 0;
    'outer: loop {
        for p in paths {
            for h in classify_handles(g, p, &cur, terminals)? {
                if !h.empty {
                    continue;
                }
                let next = pull(&cur, &h)?;
                let l = load(g, paths, &next);
                if l < cur_load {
                    cur = next;
                    cur_load = l;
                    pulls += 1;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(LoadReport { q: q.to_vec(), load: initial, upper_comb_load: cur_load, pulls, pulled: cur, handles })
}

/// Crossings of a labelled family with each skeleton spinal path.
pub fn dual_load(sk: &Skeleton, l: &Labelling) -> Vec<usize> {
    sk.spinal.iter().map(|p| p.iter().filter(|&&d| !l.get(d).is_identity()).count()).collect()
}

/// Summed word lengths along each spinal path; a lower bound for its load.
pub fn algebraic_load(sk: &Skeleton, l: &Labelling) -> Vec<usize> {
    sk.spinal.iter().map(|p| char_word(l, p).len()).collect()
}

/// Outer face `c1`, inner face `c2` and a reference dual path between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootedRing {
    pub c1: usize,
    pub c2: usize,
    /// Dart `d` stands for the dual step `left(d) -> right(d)`.
    pub w: Vec<Dart>,
}

impl RootedRing {
    /// Dual path from `c1` crossing `edges` in order.
    pub fn from_edges<W: Weight>(g: &PlaneGraph<W>, c1: usize, edges: &[usize]) -> Result<Self> {
        let mut cur = c1;
        let mut w = Vec::new();
        for &e in edges {
            let d = [2 * e, 2 * e + 1]
                .into_iter()
                .find(|&d| g.left(d) == cur)
                .ok_or_else(|| Error::Invalid(format!("edge {e} not on face {cur}")))?;
            w.push(d);
            cur = g.right(d);
        }
        Ok(RootedRing { c1, c2: cur, w })
    }
}

/// Signed crossings of an oriented vertex path with the reference curve:
/// `+1` when the path runs along the crossed dart, `-1` against it.
pub fn winding_number<W: Weight>(g: &PlaneGraph<W>, p: &[usize], ring: &RootedRing) -> Result<i64> {
    let mut total = 0;
    for x in p.windows(2) {
        let d = g.find_dart(x[0], x[1]).ok_or(Error::NotAPath)?;
        for &w in &ring.w {
            if d == w {
                total += 1;
            } else if edge_of(d) == edge_of(w) {
                total -= 1;
            }
        }
    }
    Ok(total)
}
