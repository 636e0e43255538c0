//! Arc labellings by free-group words, face shifts and domain conformance.

use crate::homology::word::{Symbol, Word};
use crate::plane::{rev, Dart, PlaneGraph};
use crate::{Error, Result, Weight};

/// Word per dart with `λ(rev d) = λ(d)⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labelling(Vec<Word>);

impl Labelling {
    pub fn identity(num_darts: usize) -> Self {
        Labelling(vec![Word::identity(); num_darts])
    }

    pub fn get(&self, d: Dart) -> &Word {
        &self.0[d]
    }

    pub fn set(&mut self, d: Dart, w: Word) {
        self.0[rev(d)] = w.inv();
        self.0[d] = w;
    }

    pub fn num_darts(&self) -> usize {
        self.0.len()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.0.len()).all(|d| self.0[rev(d)] == self.0[d].inv())
    }

    /// Labelling of a family of dart paths, path `i` carrying generator `i + 1`.
    pub fn from_paths(num_darts: usize, paths: &[Vec<Dart>]) -> Self {
        let mut l = Labelling::identity(num_darts);
        for (i, p) in paths.iter().enumerate() {
            for &d in p {
                l.set(d, Word::gen(i as Symbol + 1));
            }
        }
        l
    }
}

/// Face-indexed words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shift(pub Vec<Word>);

impl Shift {
    pub fn identity(num_faces: usize) -> Self {
        Shift(vec![Word::identity(); num_faces])
    }

    pub fn inv(&self) -> Shift {
        Shift(self.0.iter().map(Word::inv).collect())
    }

    pub fn is_stable(&self, fixed: &[usize]) -> bool {
        fixed.iter().all(|&f| self.0[f].is_identity())
    }
}

/// `ψ[λ](a) = ψ(left a) · λ(a) · ψ(right a)⁻¹`.
pub fn apply_shift<W: Weight>(g: &PlaneGraph<W>, l: &Labelling, psi: &Shift) -> Labelling {
    let mut out = Labelling::identity(g.num_darts());
    for e in 0..g.m() {
        let d = 2 * e;
        let w = psi.0[g.left(d)].mul(l.get(d)).mul(&psi.0[g.right(d)].inv());
        out.set(d, w);
    }
    out
}

/// Product of the labels of arcs entering `v`, counter-clockwise from the
/// in-arc of `rot(v)[start]`.
pub fn in_product<W: Weight>(g: &PlaneGraph<W>, l: &Labelling, v: usize, start: usize) -> Word {
    let r = g.rot(v);
    let mut w = Word::identity();
    for j in 0..r.len() {
        w = w.mul(l.get(rev(r[(start + j) % r.len()])));
    }
    w
}

pub fn is_clean<W: Weight>(g: &PlaneGraph<W>, l: &Labelling, v: usize) -> bool {
    g.degree(v) == 0 || in_product(g, l, v, 0).is_identity()
}

/// Product of the labels along a dual walk given as primal darts.
pub fn char_word(l: &Labelling, walk: &[Dart]) -> Word {
    walk.iter().fold(Word::identity(), |w, &d| w.mul(l.get(d)))
}

/// Whether `w` lies in the domain of dart `d` under pair annotations `ann`.
pub fn in_arc_domain(ann: &[Vec<bool>], d: Dart, w: &Word) -> bool {
    match w.symbols() {
        [] => true,
        [s] => {
            let i = s.unsigned_abs() as usize - 1;
            i < ann.len() && if *s > 0 { ann[i][d] } else { ann[i][rev(d)] }
        }
        _ => false,
    }
}

/// Vertex domain check: every cyclically consecutive run of in-arc labels
/// multiplies to a word of length at most one.
pub fn vertex_conforms<W: Weight>(g: &PlaneGraph<W>, l: &Labelling, v: usize) -> bool {
    let r = g.rot(v);
    for start in 0..r.len() {
        let mut w = Word::identity();
        for j in 0..r.len() {
            w = w.mul(l.get(rev(r[(start + j) % r.len()])));
            if w.len() > 1 {
                return false;
            }
        }
    }
    true
}

pub fn conforms<W: Weight>(g: &PlaneGraph<W>, l: &Labelling, ann: &[Vec<bool>]) -> bool {
    (0..g.num_darts()).all(|d| in_arc_domain(ann, d, l.get(d))) && (0..g.n()).all(|v| vertex_conforms(g, l, v))
}

/// Dart sequence of a vertex path, taking the first matching dart.
pub fn vertex_path_darts<W: Weight>(g: &PlaneGraph<W>, path: &[usize]) -> Result<Vec<Dart>> {
    path.windows(2).map(|w| g.find_dart(w[0], w[1]).ok_or(Error::NotAPath)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen::path_instance;

    #[test]
    fn path_labelling_is_clean_inside() {
        let inst = path_instance(4, &[(0, 3)]);
        let g = &inst.graph;
        let darts = vertex_path_darts(g, &[0, 1, 2, 3]).unwrap();
        let l = Labelling::from_paths(g.num_darts(), &[darts]);
        assert!(l.is_symmetric());
        assert!(is_clean(g, &l, 1) && is_clean(g, &l, 2));
        assert!(!is_clean(g, &l, 0));
        let psi = Shift(vec![Word::from_symbols(&[2, 1])]);
        let shifted = apply_shift(g, &l, &psi);
        assert!(is_clean(g, &shifted, 1));
    }
}
