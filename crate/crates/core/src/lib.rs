//! Certified arithmetic for translating one Cantor set into another.

pub mod cantor;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod exchange;
pub mod interval;
pub mod nesting;
pub mod rational;
pub mod rounding;

pub use error::{Error, Result};
pub use interval::{
    complement_in, measure, min_cover_count, minkowski_diff, normalize, pairwise_minus_union, Interval, IntervalUnion,
};
pub use rational::Rational;
pub use rounding::{DirectedRounding, Enclosure, RoundingMode};
