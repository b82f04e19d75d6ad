//! Exact coefficient fields and truncated Laurent series over them.

mod field;
mod rational;
mod series;

pub use field::{Field, Mod61, MERSENNE_61};
pub use rational::{ParseRationalError, Rational};
pub use series::{field_image, LaurentSeries, SeriesError, SeriesJson};
