use serde::{Deserialize, Serialize};

use crate::exactnum::{field_image, Field, LaurentSeries, Rational, SeriesError};

/// One-dimensional second-order mappings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Map1d {
    /// `x[n+1] + x[n-1] = a + 1/x[n]^2`
    Eq1,
    /// `x[n+1] + x[n-1] = a + 1/x[n]`
    Eq2,
}

/// Orbit `[x_cur, x_1, ..., x_steps]`.
pub fn iterate_map_1d<F: Field>(
    map: Map1d,
    a: &Rational,
    x_prev: &LaurentSeries<F>,
    x_cur: &LaurentSeries<F>,
    steps: usize,
) -> Result<Vec<LaurentSeries<F>>, SeriesError> {
    let a: F = field_image(a)?;
    let mut prev = x_prev.clone();
    let mut cur = x_cur.clone();
    let mut out = vec![cur.clone()];
    for _ in 0..steps {
        let r = cur.inv()?;
        let term = match map {
            Map1d::Eq1 => r.mul(&r),
            Map1d::Eq2 => r,
        };
        let next = term.add_scalar(&a).sub(&prev);
        prev = std::mem::replace(&mut cur, next);
        out.push(cur.clone());
    }
    Ok(out)
}
