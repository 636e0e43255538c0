//! Free-group labellings, characteristic words, candidate enumeration and
//! the homology-feasibility layer.

pub mod enumerate;
pub mod hf;
pub mod labelling;
pub mod matching;
pub mod word;

pub use labelling::{Labelling, Shift};
pub use word::{reduce, Symbol, Word};
