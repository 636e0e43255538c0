//! Homology-feasibility instances built from candidate words, their solution
//! by family lookup or by shift search, and path extraction.

use std::collections::{HashMap, VecDeque};

use crate::homology::labelling::{apply_shift, conforms, in_arc_domain, in_product, vertex_conforms, Labelling, Shift};
use crate::homology::enumerate::true_words;
use crate::homology::word::{Symbol, Word};
use crate::instances::oracle::{all_arc_families, ArcFamily, Limits};
use crate::instances::{DapInstance, Solution};
use crate::plane::{edge_of, rev, Dart, PlaneGraph};
use crate::skeleton::Skeleton;
use crate::{Error, Result, Weight};

/// Tree `L` joining the terminals and the ends of one chosen primal edge per
/// spinal path, avoiding all skeleton edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LTree {
    pub in_l: Vec<bool>,
    pub in_lhat: Vec<bool>,
    /// `a(Q)` for the stored orientation of each spinal path.
    pub anchor: Vec<Dart>,
}

pub fn l_tree<W: Weight>(g: &PlaneGraph<W>, sk: &Skeleton, terminals: &[usize]) -> Result<LTree> {
    let anchor: Vec<Dart> = sk.spinal.iter().map(|p| p[0]).collect();
    let mut in_w = vec![false; g.n()];
    for &t in terminals {
        in_w[t] = true;
    }
    for &a in &anchor {
        in_w[g.tail(a)] = true;
        in_w[g.head(a)] = true;
    }
    let root = terminals[0];
    let mut seen = vec![false; g.n()];
    let mut in_l = vec![false; g.m()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &d in g.rot(v) {
            let u = g.head(d);
            if !sk.in_k[edge_of(d)] && !seen[u] {
                seen[u] = true;
                in_l[edge_of(d)] = true;
                queue.push_back(u);
            }
        }
    }
    if (0..g.n()).any(|v| in_w[v] && !seen[v]) {
        return Err(Error::Invalid("graph minus the skeleton is disconnected".into()));
    }
    let mut deg = vec![0usize; g.n()];
    for e in 0..g.m() {
        if in_l[e] {
            let (u, v) = g.ends(e);
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..g.n()).filter(|&v| deg[v] == 1 && !in_w[v]).collect();
    while let Some(v) = stack.pop() {
        if deg[v] != 1 {
            continue;
        }
        let d = g.rot(v).iter().copied().find(|&d| in_l[edge_of(d)]).unwrap();
        in_l[edge_of(d)] = false;
        deg[v] = 0;
        let u = g.head(d);
        deg[u] -= 1;
        if deg[u] == 1 && !in_w[u] {
            stack.push(u);
        }
    }
    let mut in_lhat = in_l.clone();
    for &a in &anchor {
        in_lhat[edge_of(a)] = true;
    }
    Ok(LTree { in_l, in_lhat, anchor })
}

fn gen_of(i: usize) -> Word {
    Word::gen(i as Symbol + 1)
}

/// The unique compact labelling taking `words` on the anchors, if any.
pub fn reconstruct_compact<W: Weight>(g: &PlaneGraph<W>, lt: &LTree, terminals: &[usize], words: &[Word]) -> Option<Labelling> {
    let mut l = Labelling::identity(g.num_darts());
    for (q, &a) in lt.anchor.iter().enumerate() {
        if words[2 * q + 1] != words[2 * q].inv() {
            return None;
        }
        l.set(a, words[2 * q].clone());
    }
    let mut is_term = vec![false; g.n()];
    for (j, &t) in terminals.iter().enumerate() {
        is_term[t] = true;
        let d = g.rot(t)[0];
        let w = gen_of(j / 2);
        if j % 2 == 0 {
            l.set(d, w);
        } else {
            l.set(rev(d), w);
        }
    }
    let in_lp = |e: usize| {
        let (u, v) = g.ends(e);
        lt.in_l[e] && !is_term[u] && !is_term[v]
    };
    let Some(root) = (0..g.n()).find(|&v| !is_term[v] && g.rot(v).iter().any(|&d| in_lp(edge_of(d)))) else {
        return (0..g.n()).all(|v| is_term[v] || in_product(g, &l, v, 0).is_identity()).then_some(l);
    };
    let mut parent: Vec<Option<Dart>> = vec![None; g.n()];
    let mut order = vec![root];
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &d in g.rot(v) {
            let u = g.head(d);
            if in_lp(edge_of(d)) && !seen[u] {
                seen[u] = true;
                parent[u] = Some(rev(d));
                order.push(u);
            }
        }
    }
    for &x in order.iter().skip(1).rev() {
        let op = parent[x].unwrap();
        let r = g.rot(x);
        let at = r.iter().position(|&d| d == op).unwrap();
        let mut rest = Word::identity();
        for j in 1..r.len() {
            rest = rest.mul(l.get(rev(r[(at + j) % r.len()])));
        }
        l.set(rev(op), rest.inv());
    }
    (0..g.n()).all(|v| is_term[v] || in_product(g, &l, v, 0).is_identity()).then_some(l)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HfInstance {
    pub xi: Labelling,
    /// Pair annotations; arc domains are `ε` plus `i` where pair `i` may use
    /// the dart and `i⁻¹` where it may use the reverse.
    pub ann: Vec<Vec<bool>>,
    pub fixed: Vec<usize>,
}

pub fn build_hf_instance<W: Weight>(dap: &DapInstance<W>, sk: &Skeleton, lt: &LTree, words: &[Word]) -> Result<HfInstance> {
    let terms = dap.terminals();
    let xi = reconstruct_compact(&dap.graph, lt, &terms, words).ok_or(Error::NoCompatible)?;
    Ok(HfInstance { xi, ann: dap.ann.clone(), fixed: sk.terminal_faces.clone() })
}

pub fn arc_domain(ann: &[Vec<bool>], d: Dart) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    for (i, a) in ann.iter().enumerate() {
        if a[d] {
            out.push(gen_of(i));
        }
        if a[rev(d)] {
            out.push(gen_of(i).inv());
        }
    }
    out
}

/// Whether `psi` is stable on the fixed faces and makes the labelling conform.
pub fn is_hf_solution<W: Weight>(g: &PlaneGraph<W>, inst: &HfInstance, psi: &Shift) -> bool {
    psi.0.len() == g.num_faces() && psi.is_stable(&inst.fixed) && conforms(g, &apply_shift(g, &inst.xi, psi), &inst.ann)
}

/// Shift moving the labelling of a path family onto `L̂`: per face of `L̂`,
/// words along a spanning tree that extends the skeleton, rooted at the
/// principal face inside it.
pub fn push_shift<W: Weight>(g: &PlaneGraph<W>, sk: &Skeleton, lt: &LTree, l: &Labelling) -> Shift {
    let nf = g.num_faces();
    let mut comp: Vec<usize> = (0..nf).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        let mut y = x;
        while c[y] != r {
            let n = c[y];
            c[y] = r;
            y = n;
        }
        r
    }
    let mut edges: Vec<usize> = (0..g.m()).filter(|&e| !lt.in_lhat[e] && sk.in_k[e]).collect();
    edges.extend((0..g.m()).filter(|&e| !lt.in_lhat[e] && !sk.in_k[e]));
    let mut tree_adj: Vec<Vec<Dart>> = vec![Vec::new(); nf];
    for e in edges {
        let (a, b) = (g.left(2 * e), g.right(2 * e));
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        if ra != rb {
            comp[ra] = rb;
            tree_adj[a].push(2 * e);
            tree_adj[b].push(2 * e + 1);
        }
    }
    let mut is_p = vec![false; nf];
    for &f in &sk.principal {
        is_p[f] = true;
    }
    let mut root_of: HashMap<usize, usize> = HashMap::new();
    for f in 0..nf {
        let r = find(&mut comp, f);
        let cur = root_of.entry(r).or_insert(f);
        if is_p[f] && !is_p[*cur] {
            *cur = f;
        }
    }
    let mut psi = Shift::identity(nf);
    let mut done = vec![false; nf];
    let mut roots: Vec<usize> = root_of.into_values().collect();
    roots.sort_unstable();
    for r in roots {
        done[r] = true;
        let mut queue = VecDeque::from([r]);
        while let Some(f) = queue.pop_front() {
            for &p in &tree_adj[f] {
                let h = g.right(p);
                if !done[h] {
                    done[h] = true;
                    psi.0[h] = psi.0[f].mul(l.get(p));
                    queue.push_back(h);
                }
            }
        }
    }
    psi
}

/// Paths from the arcs labelled by each generator: Euler walk from `s_i`,
/// cycles shortcut.
pub fn extract_solution<W: Weight>(g: &PlaneGraph<W>, pairs: &[(usize, usize)], labels: &Labelling) -> Result<Solution> {
    let mut paths = Vec::new();
    for (i, &(s, t)) in pairs.iter().enumerate() {
        let w = gen_of(i);
        let mut out: Vec<Vec<Dart>> = vec![Vec::new(); g.n()];
        for d in 0..g.num_darts() {
            if *labels.get(d) == w {
                out[g.tail(d)].push(d);
            }
        }
        let mut stack = vec![s];
        let mut walk = Vec::new();
        while let Some(&v) = stack.last() {
            if let Some(d) = out[v].pop() {
                stack.push(g.head(d));
            } else {
                walk.push(v);
                stack.pop();
            }
        }
        walk.reverse();
        let mut path: Vec<usize> = Vec::new();
        let mut at: HashMap<usize, usize> = HashMap::new();
        for v in walk {
            if let Some(&j) = at.get(&v) {
                for u in path.drain(j + 1..) {
                    at.remove(&u);
                }
            } else {
                at.insert(v, path.len());
                path.push(v);
            }
        }
        if path.last() != Some(&t) {
            return Err(Error::MalformedShift);
        }
        paths.push(path);
    }
    Ok(Solution { paths })
}

/// Every annotated family, indexed by its words on the oriented spinal paths.
#[derive(Clone, Debug)]
pub struct FamilyIndex {
    pub families: Vec<ArcFamily>,
    pub by_words: HashMap<Vec<Word>, usize>,
}

impl FamilyIndex {
    pub fn build<W: Weight>(dap: &DapInstance<W>, sk: &Skeleton, limits: Limits, cap: usize) -> Result<Self> {
        let families = all_arc_families(&dap.graph, &dap.pairs, &dap.ann, limits, cap)?;
        let mut by_words = HashMap::new();
        for (j, f) in families.iter().enumerate() {
            let l = Labelling::from_paths(dap.graph.num_darts(), f);
            by_words.entry(true_words(sk, &l)).or_insert(j);
        }
        Ok(FamilyIndex { families, by_words })
    }

    pub fn labelling(&self, num_darts: usize, j: usize) -> Labelling {
        Labelling::from_paths(num_darts, &self.families[j])
    }
}

#[derive(Clone, Copy, Debug)]
pub enum HfBackend<'a> {
    /// Look the words up among all annotated families and push the match.
    PathSearch(&'a FamilyIndex),
    /// Backtracking over shift words of length at most `max_len`.
    ShiftSearch { max_len: usize, nodes: u64 },
}

pub fn solve_hf<W: Weight>(
    g: &PlaneGraph<W>,
    sk: &Skeleton,
    lt: &LTree,
    inst: &HfInstance,
    words: &[Word],
    backend: HfBackend,
) -> Result<Option<Shift>> {
    let psi = match backend {
        HfBackend::PathSearch(index) => {
            let Some(&j) = index.by_words.get(words) else { return Ok(None) };
            push_shift(g, sk, lt, &index.labelling(g.num_darts(), j)).inv()
        }
        HfBackend::ShiftSearch { max_len, nodes } => match shift_search(g, inst, max_len, nodes)? {
            Some(psi) => psi,
            None => return Ok(None),
        },
    };
    Ok(is_hf_solution(g, inst, &psi).then_some(psi))
}

struct ShiftSearch<'a, W> {
    g: &'a PlaneGraph<W>,
    inst: &'a HfInstance,
    order: Vec<usize>,
    via: Vec<Option<Dart>>,
    /// Vertices whose faces are all assigned once `order[j]` is.
    ready: Vec<Vec<usize>>,
    psi: Vec<Option<Word>>,
    max_len: usize,
    nodes: u64,
    budget: u64,
}

impl<W: Weight> ShiftSearch<'_, W> {
    fn shifted(&self, d: Dart) -> Option<Word> {
        let a = self.psi[self.g.left(d)].as_ref()?;
        let b = self.psi[self.g.right(d)].as_ref()?;
        Some(a.mul(self.inst.xi.get(d)).mul(&b.inv()))
    }

    fn local_ok(&self, f: usize) -> bool {
        for &d in self.g.face_walk(f) {
            if let Some(w) = self.shifted(d) {
                if !in_arc_domain(&self.inst.ann, d, &w) {
                    return false;
                }
            }
        }
        true
    }

    fn vertex_ok(&self, v: usize) -> bool {
        let mut l = Labelling::identity(self.g.num_darts());
        for &o in self.g.rot(v) {
            l.set(o, self.shifted(o).unwrap());
        }
        vertex_conforms(self.g, &l, v)
    }

    fn go(&mut self, j: usize) -> Result<bool> {
        if j == self.order.len() {
            return Ok(true);
        }
        let f = self.order[j];
        let options: Vec<Word> = match self.via[f] {
            None => vec![Word::identity()],
            Some(p) => {
                let base = self.psi[self.g.left(p)].clone().unwrap().mul(self.inst.xi.get(p));
                arc_domain(&self.inst.ann, p).iter().map(|delta| delta.inv().mul(&base)).filter(|w| w.len() <= self.max_len).collect()
            }
        };
        for w in options {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::LimitExceeded);
            }
            self.psi[f] = Some(w);
            if self.local_ok(f) && self.ready[j].clone().into_iter().all(|v| self.vertex_ok(v)) && self.go(j + 1)? {
                return Ok(true);
            }
        }
        self.psi[f] = None;
        Ok(false)
    }
}

/// Iterative deepening over the longest shift word.
pub fn shift_search<W: Weight>(g: &PlaneGraph<W>, inst: &HfInstance, max_len: usize, budget: u64) -> Result<Option<Shift>> {
    let nf = g.num_faces();
    let mut via = vec![None; nf];
    let mut seen = vec![false; nf];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let mut roots = inst.fixed.clone();
    if roots.is_empty() {
        roots.push(0);
    }
    for &f in &roots {
        if !seen[f] {
            seen[f] = true;
            order.push(f);
            queue.push_back(f);
        }
    }
    while let Some(f) = queue.pop_front() {
        for &d in g.face_walk(f) {
            let p = rev(d);
            let h = g.right(p);
            if !seen[h] {
                seen[h] = true;
                via[h] = Some(p);
                order.push(h);
                queue.push_back(h);
            }
        }
    }
    let mut pos = vec![usize::MAX; nf];
    for (j, &f) in order.iter().enumerate() {
        pos[f] = j;
    }
    let mut ready = vec![Vec::new(); order.len()];
    for v in 0..g.n() {
        if let Some(last) = g.rot(v).iter().map(|&o| pos[g.left(o)]).max() {
            ready[last].push(v);
        }
    }
    let mut nodes = 0;
    for len in 0..=max_len {
        let mut s = ShiftSearch { g, inst, order: order.clone(), via: via.clone(), ready: ready.clone(), psi: vec![None; nf], max_len: len, nodes, budget };
        if s.go(0)? {
            let psi = Shift(s.psi.into_iter().map(|w| w.unwrap()).collect());
            return Ok(Some(psi));
        }
        nodes = s.nodes;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_of_unannotated_arc_is_trivial() {
        let ann = vec![vec![false; 4]];
        assert_eq!(arc_domain(&ann, 0), vec![Word::identity()]);
        let ann = vec![vec![true, false, false, false]];
        assert_eq!(arc_domain(&ann, 0), vec![Word::identity(), Word::gen(1)]);
        assert_eq!(arc_domain(&ann, 1), vec![Word::identity(), Word::gen(-1)]);
    }
}
