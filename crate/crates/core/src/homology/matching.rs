//! Perfect non-crossing matchings that never pair two positions of one block.
//!
//! A matching is a partner array over positions `0..p`. Blocks are given by
//! their lengths and cover the positions left to right. In a jumping
//! non-crossing matching every block reads as a run of closing brackets
//! followed by a run of opening ones, so it is fixed by the number of closers
//! per block.

fn block_ids(blocks: &[usize]) -> Vec<usize> {
    blocks.iter().enumerate().flat_map(|(b, &len)| std::iter::repeat(b).take(len)).collect()
}

struct Gen<'a, F> {
    blocks: &'a [usize],
    partner: Vec<usize>,
    stack: Vec<usize>,
    pos: usize,
    visit: F,
}

impl<F: FnMut(&[usize]) -> bool> Gen<'_, F> {
    fn block(&mut self, b: usize, remaining: usize) -> bool {
        if b == self.blocks.len() {
            return if self.stack.is_empty() { (self.visit)(&self.partner) } else { true };
        }
        let len = self.blocks[b];
        let rest = remaining - len;
        for closers in 0..=len.min(self.stack.len()) {
            let openers = len - closers;
            if self.stack.len() - closers + openers > rest {
                continue;
            }
            let start = self.pos;
            let mut popped = Vec::with_capacity(closers);
            for j in 0..closers {
                let o = self.stack.pop().unwrap();
                popped.push(o);
                self.partner[o] = start + j;
                self.partner[start + j] = o;
            }
            for j in closers..len {
                self.stack.push(start + j);
            }
            self.pos += len;
            let go_on = self.block(b + 1, rest);
            self.pos -= len;
            for _ in closers..len {
                self.stack.pop();
            }
            for o in popped.into_iter().rev() {
                self.stack.push(o);
            }
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Calls `visit` on each perfect non-crossing jumping matching; stops early
/// when it returns `false`.
pub fn for_each_jumping_matching(blocks: &[usize], visit: impl FnMut(&[usize]) -> bool) {
    let p: usize = blocks.iter().sum();
    if p % 2 == 1 {
        return;
    }
    let mut g = Gen { blocks, partner: vec![usize::MAX; p], stack: Vec::new(), pos: 0, visit };
    g.block(0, p);
}

pub fn jumping_matchings(blocks: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_jumping_matching(blocks, |m| {
        out.push(m.to_vec());
        true
    });
    out
}

pub fn is_non_crossing(partner: &[usize]) -> bool {
    for a in 0..partner.len() {
        let b = partner[a];
        if b < a {
            continue;
        }
        for c in a + 1..b {
            let d = partner[c];
            if d < a || d > b {
                return false;
            }
        }
    }
    true
}

pub fn is_jumping(blocks: &[usize], partner: &[usize]) -> bool {
    let id = block_ids(blocks);
    (0..partner.len()).all(|a| id[a] != id[partner[a]])
}

/// Every perfect matching, filtered; the reference for the generator.
pub fn brute_force_matchings(blocks: &[usize]) -> Vec<Vec<usize>> {
    fn rec(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(a) = partner.iter().position(|&x| x == usize::MAX) else {
            out.push(partner.clone());
            return;
        };
        for b in a + 1..partner.len() {
            if partner[b] == usize::MAX {
                partner[a] = b;
                partner[b] = a;
                rec(partner, out);
                partner[a] = usize::MAX;
                partner[b] = usize::MAX;
            }
        }
    }
    let p: usize = blocks.iter().sum();
    let mut out = Vec::new();
    if p % 2 == 0 {
        rec(&mut vec![usize::MAX; p], &mut out);
    }
    out.retain(|m| is_non_crossing(m) && is_jumping(blocks, m));
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts() {
        assert_eq!(jumping_matchings(&[1, 1, 1, 1]).len(), 2);
        assert_eq!(jumping_matchings(&[1; 6]).len(), 5);
        assert!(jumping_matchings(&[4]).is_empty());
    }

    #[test]
    fn agrees_with_brute_force() {
        for blocks in [vec![2, 2, 2], vec![1, 3, 2], vec![2, 1, 1, 2], vec![3, 3]] {
            let mut got = jumping_matchings(&blocks);
            got.sort();
            assert_eq!(got, brute_force_matchings(&blocks), "{blocks:?}");
        }
    }
}
