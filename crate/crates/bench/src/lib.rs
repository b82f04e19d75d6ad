//! Fixtures shared by the criterion benches.

use dkdv_core::{Field, LaurentSeries, Mod61, Rational, SeedSpec, WeightVector};

/// Dense unit series `1 + c1 e + c2 e^2 + ...` with deterministic coefficients up to order `k`.
pub fn dense_series<F: Field>(k: i64, lift: impl Fn(u64) -> F) -> LaurentSeries<F> {
    let coeffs = (0..k).map(|i| lift((i as u64 * 7919 + 3) % 1009 + 1)).collect();
    LaurentSeries::from_coeffs(0, coeffs, k)
}

pub fn modular_series(k: i64) -> LaurentSeries<Mod61> {
    dense_series(k, Mod61::new)
}

pub fn rational_series(k: i64) -> LaurentSeries<Rational> {
    dense_series(k, |v| Rational::from_integer(v as i64))
}

/// A weight-5 strip struck by a weight-2 diagonal at the origin.
pub fn strip_with_diagonal(base: usize) -> Vec<SeedSpec> {
    vec![SeedSpec::taishi(vec![3, 2], base), SeedSpec::infinity(2, (0, 0))]
}

pub fn long_vector(len: usize) -> WeightVector {
    WeightVector::new(0, (0..len as u32).map(|i| (i * 5 + 1) % 7).collect())
}
