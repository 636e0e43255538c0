//! Reduced words of the free group on generators `1..=k`.

use std::fmt;

/// Generator `i` is `i`, its inverse is `-i`; zero never occurs.
pub type Symbol = i16;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Word(Vec<Symbol>);

/// Free reduction of an arbitrary symbol sequence.
pub fn reduce(symbols: &[Symbol]) -> Word {
    let mut out: Vec<Symbol> = Vec::with_capacity(symbols.len());
    for &s in symbols {
        debug_assert!(s != 0);
        if out.last() == Some(&-s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    Word(out)
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(s: Symbol) -> Self {
        Word(vec![s])
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Self {
        reduce(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inv(&self) -> Word {
        Word(self.0.iter().rev().map(|&s| -s).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &s in &other.0 {
            if out.last() == Some(&-s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        Word(out)
    }

    /// The single symbol of a length-one word.
    pub fn single(&self) -> Option<Symbol> {
        (self.0.len() == 1).then(|| self.0[0])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|&s| if s > 0 { s.to_string() } else { format!("{}^-1", -s) }).collect();
        write!(f, "{}", parts.join(" "))
    }
}
