//! Exact-arithmetic laboratory for singularities of the discrete KdV
//! equation: truncated Laurent-series arithmetic, lattice evolution,
//! singularity classification, strip interaction rules and a harness that
//! cross-validates them.

pub mod classify;
pub mod exactnum;
pub mod harness;
pub mod lattice;
pub mod rules;

pub use classify::{Classification, StripProfile, ValuationMap};
pub use exactnum::{Field, LaurentSeries, Mod61, Rational, SeriesError};
pub use harness::{CrosscheckReport, Scenario, Verdict};
pub use lattice::{BorderShape, EvolutionParams, Grid, SeedSpec, SeedVariant, Site};
pub use rules::WeightVector;
