//! Planar disjoint shortest paths.
//!
//! Embedded plane multigraphs, shortest-path dags, dag-rings, skeletons in the
//! dual and free-group homology enumeration, with brute-force oracles for the
//! small instances used in testing.
//!
//! Everything is generic over an exact scalar [`Weight`]; the crate root
//! exposes aliases fixed to [`Rational`].

pub mod analysis;
pub mod geodesics;
pub mod homology;
pub mod instances;
pub mod pipeline;
pub mod plane;
pub mod rings;
pub mod skeleton;

use std::fmt::Debug;

/// Exact, totally ordered edge weight.
pub trait Weight: num_traits::Num + Ord + Clone + Debug + Send + Sync + 'static {}

impl<T> Weight for T where T: num_traits::Num + Ord + Clone + Debug + Send + Sync + 'static {}

pub type Rational = num_rational::Ratio<i64>;

pub type Graph = plane::PlaneGraph<Rational>;
pub type Distances = geodesics::DistanceOracle<Rational>;
pub type Dsp = instances::DspInstance<Rational>;
pub type Dap = instances::DapInstance<Rational>;
pub type Nice = instances::NiceInstance<Rational>;

pub use homology::word::Word;
pub use instances::Solution;
pub use plane::{Dart, PlaneGraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dart {0} listed twice or missing in rotations")]
    DuplicateDart(usize),
    #[error("edge {0} has non-positive weight")]
    NonPositiveWeight(usize),
    #[error("euler check failed on component of vertex {0}")]
    EulerViolation(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("a side of the partition is not connected")]
    SideNotConnected,
    #[error("cycles cross")]
    CyclesCross,
    #[error("{0} unreachable from {1}")]
    Unreachable(usize, usize),
    #[error("not a path")]
    NotAPath,
    #[error("replacement is not a shortest path")]
    NotShortestReplacement,
    #[error("result is not simple")]
    NotSimple,
    #[error("search limit exceeded")]
    LimitExceeded,
    #[error("partition splits no pair")]
    NotSplitting,
    #[error("no dag-cut or dag-ring exists")]
    NoneExists,
    #[error("partition admits no extension")]
    NoExtension,
    #[error("orientation conflict on edge {0}")]
    OrientationConflict(usize),
    #[error("handle is not an empty regular handle")]
    NotEmptyHandle,
    #[error("shift does not conform")]
    MalformedShift,
    #[error("no compatible labelling")]
    NoCompatible,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Integer ratio shorthand.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}
