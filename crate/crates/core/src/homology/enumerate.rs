//! Euler tour of the skeleton and the stream of candidate word mappings on
//! its oriented spinal paths.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::homology::labelling::{char_word, Labelling};
use crate::homology::matching::for_each_jumping_matching;
use crate::homology::word::{reduce, Symbol, Word};
use crate::plane::{edge_of, rev, Dart, PlaneGraph};
use crate::skeleton::Skeleton;
use crate::{Error, Result, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TourItem {
    /// `+(i+1)` next to `s_i`, `-(i+1)` next to `t_i`.
    Term(Symbol),
    /// Oriented spinal path `2q` or `2q + 1`.
    Path(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tour {
    pub items: Vec<TourItem>,
    pub num_paths: usize,
    pub k: usize,
}

/// Closed walk around the skeleton, starting next to `s_1`. `terminals`
/// lists `s_1, t_1, s_2, ...`, each a pendant vertex.
pub fn euler_tour<W: Weight>(g: &PlaneGraph<W>, sk: &Skeleton, terminals: &[usize]) -> Result<Tour> {
    let mut term_of: HashMap<Dart, Symbol> = HashMap::new();
    for (j, &t) in terminals.iter().enumerate() {
        let s = (j / 2) as Symbol + 1;
        term_of.insert(rev(g.rot(t)[0]), if j % 2 == 0 { s } else { -s });
    }
    let Some(a0) = (0..g.num_darts()).find(|&d| sk.in_k[edge_of(d)]) else {
        return Err(Error::Invalid("empty skeleton".into()));
    };
    enum Raw {
        Dart(Dart),
        Term(Symbol),
    }
    let mut raw = Vec::new();
    let mut cur = a0;
    loop {
        raw.push(Raw::Dart(cur));
        let mut b = g.walk_next(cur);
        loop {
            if let Some(&s) = term_of.get(&b) {
                raw.push(Raw::Term(s));
            }
            if sk.in_k[edge_of(b)] {
                break;
            }
            b = g.walk_next(b);
        }
        cur = rev(b);
        if cur == a0 {
            break;
        }
        if raw.len() > 4 * g.num_darts() {
            return Err(Error::Invalid("tour does not close".into()));
        }
    }
    let start = raw
        .iter()
        .position(|r| matches!(r, Raw::Term(1)))
        .ok_or_else(|| Error::Invalid("first source not on the tour".into()))?;
    raw.rotate_left(start);
    let mut pos: HashMap<Dart, (usize, usize)> = HashMap::new();
    for o in 0..2 * sk.spinal.len() {
        for (j, d) in sk.oriented(o).into_iter().enumerate() {
            pos.insert(d, (o, j));
        }
    }
    let mut items = Vec::new();
    let mut seen = vec![false; 2 * sk.spinal.len()];
    let mut i = 0;
    while i < raw.len() {
        match raw[i] {
            Raw::Term(s) => {
                items.push(TourItem::Term(s));
                i += 1;
            }
            Raw::Dart(d) => {
                let &(o, j) = pos.get(&d).ok_or_else(|| Error::Invalid(format!("dart {d} on no spinal path")))?;
                let len = sk.spinal[o / 2].len();
                if j != 0 || seen[o] {
                    return Err(Error::Invalid(format!("oriented path {o} entered mid-way or twice")));
                }
                seen[o] = true;
                let expect = sk.oriented(o);
                let mut got = Vec::with_capacity(len);
                while got.len() < len {
                    match raw.get(i) {
                        Some(Raw::Dart(x)) => got.push(*x),
                        Some(Raw::Term(s)) => return Err(Error::Invalid(format!("terminal {s} inside a spinal path"))),
                        None => return Err(Error::Invalid("spinal path cut short".into())),
                    }
                    i += 1;
                }
                if got != expect {
                    return Err(Error::Invalid(format!("oriented path {o} not followed")));
                }
                items.push(TourItem::Path(o));
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Invalid("oriented path missing from the tour".into()));
    }
    Ok(Tour { items, num_paths: sk.spinal.len(), k: terminals.len() / 2 })
}

/// Regular word mapping on oriented spinal paths, indexed by orientation id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Candidate {
    pub words: Vec<Word>,
    /// Crossing positions per unoriented path in the generating word.
    pub sizes: Vec<usize>,
}

impl Candidate {
    pub fn is_regular(&self) -> bool {
        (0..self.words.len() / 2).all(|q| self.words[2 * q + 1] == self.words[2 * q].inv())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StreamEnd {
    /// Every tuple up to the length bound was generated.
    Exhausted,
    /// The visitor asked to stop.
    Stopped,
    /// The matching budget ran out first.
    Budget,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StreamStats {
    pub compositions: u64,
    pub matchings: u64,
    pub consistent: u64,
    pub emitted: u64,
}

/// Generates the words induced by all consistent `(sizes, N, M)` tuples with
/// every block of at most `l` positions, skipping size vectors already
/// covered by the bound `l_prev`. New mappings (not in `seen`) go to `visit`.
pub struct CandidateStream<'a> {
    pub tour: &'a Tour,
    pub l: usize,
    pub l_prev: usize,
    pub budget: u64,
    pub stats: StreamStats,
}

impl<'a> CandidateStream<'a> {
    pub fn new(tour: &'a Tour, l: usize, l_prev: usize, budget: u64) -> Self {
        CandidateStream { tour, l, l_prev, budget, stats: StreamStats::default() }
    }

    pub fn run(&mut self, seen: &mut HashSet<Vec<Word>>, mut visit: impl FnMut(&Candidate) -> bool) -> StreamEnd {
        let q = self.tour.num_paths;
        let l = self.l;
        for total in 0..=q * l {
            let mut sizes = vec![0usize; q];
            let end = self.compositions(&mut sizes, 0, total, seen, &mut visit);
            if end != StreamEnd::Exhausted {
                return end;
            }
        }
        StreamEnd::Exhausted
    }

    fn compositions(
        &mut self,
        sizes: &mut Vec<usize>,
        at: usize,
        left: usize,
        seen: &mut HashSet<Vec<Word>>,
        visit: &mut impl FnMut(&Candidate) -> bool,
    ) -> StreamEnd {
        if at == sizes.len() {
            if left != 0 || (self.l_prev > 0 && sizes.iter().all(|&n| n <= self.l_prev)) {
                return StreamEnd::Exhausted;
            }
            return self.with_sizes(sizes, seen, visit);
        }
        let rest_cap = (sizes.len() - at - 1) * self.l;
        for n in 0..=left.min(self.l) {
            if left - n > rest_cap {
                continue;
            }
            sizes[at] = n;
            let end = self.compositions(sizes, at + 1, left - n, seen, visit);
            if end != StreamEnd::Exhausted {
                return end;
            }
        }
        sizes[at] = 0;
        StreamEnd::Exhausted
    }

    fn with_sizes(&mut self, sizes: &[usize], seen: &mut HashSet<Vec<Word>>, visit: &mut impl FnMut(&Candidate) -> bool) -> StreamEnd {
        self.stats.compositions += 1;
        let layout = Layout::new(self.tour, sizes);
        let mut sym = vec![0 as Symbol; layout.p];
        let mut end = StreamEnd::Exhausted;
        let budget = self.budget;
        let stats = &mut self.stats;
        for_each_jumping_matching(&layout.blocks, |n| {
            if stats.matchings >= budget {
                end = StreamEnd::Budget;
                return false;
            }
            stats.matchings += 1;
            if !layout.trace(n, &mut sym) {
                return true;
            }
            stats.consistent += 1;
            let words = layout.words(&sym);
            if seen.contains(&words) {
                return true;
            }
            seen.insert(words.clone());
            stats.emitted += 1;
            if !visit(&Candidate { words, sizes: sizes.to_vec() }) {
                end = StreamEnd::Stopped;
                return false;
            }
            true
        });
        end
    }
}

struct Layout {
    p: usize,
    blocks: Vec<usize>,
    /// Partner across the two orientations of a path; `usize::MAX` at terminals.
    m: Vec<usize>,
    /// Position of `s_i` and `t_i`.
    term_pos: Vec<(usize, usize)>,
    is_term: Vec<bool>,
    /// Start of the block of each oriented path.
    start: Vec<usize>,
    sizes: Vec<usize>,
}

impl Layout {
    fn new(tour: &Tour, sizes: &[usize]) -> Self {
        let mut blocks = Vec::new();
        let mut start = vec![0; 2 * tour.num_paths];
        let mut term_pos = vec![(0, 0); tour.k];
        let mut is_term = Vec::new();
        let mut p = 0;
        for item in &tour.items {
            match *item {
                TourItem::Term(s) => {
                    let i = s.unsigned_abs() as usize - 1;
                    if s > 0 {
                        term_pos[i].0 = p;
                    } else {
                        term_pos[i].1 = p;
                    }
                    blocks.push(1);
                    is_term.push(true);
                    p += 1;
                }
                TourItem::Path(o) => {
                    let n = sizes[o / 2];
                    start[o] = p;
                    blocks.push(n);
                    is_term.extend(std::iter::repeat(false).take(n));
                    p += n;
                }
            }
        }
        let mut m = vec![usize::MAX; p];
        for (q, &n) in sizes.iter().enumerate() {
            let (a, b) = (start[2 * q], start[2 * q + 1]);
            for j in 0..n {
                m[a + j] = b + n - 1 - j;
                m[b + n - 1 - j] = a + j;
            }
        }
        Layout { p, blocks, m, term_pos, is_term, start, sizes: sizes.to_vec() }
    }

    /// Follows `N` and `M` alternately from each source slot, assigning
    /// symbols; false unless this yields `k` paths ending at the right sinks
    /// and covering every position.
    fn trace(&self, n: &[usize], sym: &mut [Symbol]) -> bool {
        sym.iter_mut().for_each(|s| *s = 0);
        let mut filled = 0;
        for (i, &(s, t)) in self.term_pos.iter().enumerate() {
            let c = i as Symbol + 1;
            sym[s] = c;
            filled += 1;
            let mut cur = s;
            loop {
                let y = n[cur];
                if self.is_term[y] {
                    if y != t {
                        return false;
                    }
                    sym[y] = -c;
                    filled += 1;
                    break;
                }
                if sym[y] != 0 {
                    return false;
                }
                sym[y] = -c;
                let x = self.m[y];
                if sym[x] != 0 {
                    return false;
                }
                sym[x] = c;
                filled += 2;
                cur = x;
            }
        }
        filled == self.p
    }

    fn words(&self, sym: &[Symbol]) -> Vec<Word> {
        (0..self.start.len())
            .map(|o| {
                let a = self.start[o];
                reduce(&sym[a..a + self.sizes[o / 2]])
            })
            .collect()
    }
}

/// Characteristic words of a labelling along every oriented spinal path.
pub fn true_words(sk: &Skeleton, l: &Labelling) -> Vec<Word> {
    (0..2 * sk.spinal.len()).map(|o| char_word(l, &sk.oriented(o))).collect()
}

/// Crossing counts of a labelling with each spinal path.
pub fn crossing_sizes(sk: &Skeleton, l: &Labelling) -> Vec<usize> {
    sk.spinal.iter().map(|p| p.iter().filter(|&&d| !l.get(d).is_identity()).count()).collect()
}

/// Collects all candidate mappings with block sizes at most `l`.
pub fn collect_candidates(tour: &Tour, l: usize, budget: u64) -> (Vec<Candidate>, StreamEnd) {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut stream = CandidateStream::new(tour, l, 0, budget);
    let end = stream.run(&mut seen, |c| {
        out.push(c.clone());
        true
    });
    (out, end)
}
