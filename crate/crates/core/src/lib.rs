//! Planar maps whose only periodic point is the origin and whose fixed point
//! index sequence `i(f^n, o)` is any prescribed sequence satisfying the Dold
//! congruences.
//!
//! The pipeline is: coefficients `a_k` ([`dold`]) pick the periods to blow up;
//! [`orbit`] selects one doubling-map orbit per period from Thue–Morse prefixes
//! ([`words`]); [`map`] builds the skew product over the blown circle; and
//! [`index`] checks the index of every iterate numerically and combinatorially.

pub mod dold;
pub mod index;
pub mod map;
pub mod orbit;
pub mod rational;
pub mod words;

pub use dold::{DoldCoefficients, IndexSequence, PeriodSet};
pub use index::{verify, IndexReport, WindingOptions};
pub use map::{build_map, PlanePoint, SkewProductMap};
pub use orbit::Angle;
pub use words::Word;
