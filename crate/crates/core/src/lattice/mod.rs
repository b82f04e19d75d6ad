//! Evolution of the discrete KdV equation and its lambda-deformation
//!
//! `x[m+1][n+1] = x[m][n] + 1/x[m+1][n] - lambda/x[m][n+1]`
//!
//! over a finite window, from border data seeded with singular values.

mod grid;
mod map1d;
mod seed;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{field_image, Field, LaurentSeries, Rational, SeriesError};

pub use grid::{BorderShape, Grid};
pub use map1d::{iterate_map_1d, Map1d};
pub use seed::{
    build_initial, default_truncation_budget, draw_generic, SeedSpec, SeedVariant, StaircaseEdge,
};

/// Lattice coordinate `(m, n)`.
pub type Site = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("seeds {first} and {second} both claim site ({}, {})", .site.0, .site.1)]
    SeedConflict { site: Site, first: usize, second: usize },
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("truncation budget exhausted computing site ({}, {})", .cell.0, .cell.1)]
    PrecisionExhausted { cell: Site },
    #[error("division by an exactly zero initial value computing site ({}, {})", .cell.0, .cell.1)]
    DivisionBySeriesZero { cell: Site },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionParams {
    /// Deformation parameter; `1` is the integrable equation.
    pub lambda: Rational,
    pub prng_seed: u64,
    /// Known order `K` given to every seeded value.
    pub truncation_budget: i64,
}

impl EvolutionParams {
    pub fn new(lambda: Rational, prng_seed: u64, truncation_budget: i64) -> Result<Self, LatticeError> {
        let p = EvolutionParams {
            lambda,
            prng_seed,
            truncation_budget,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn integrable(prng_seed: u64, truncation_budget: i64) -> Self {
        EvolutionParams {
            lambda: Rational::from_integer(1),
            prng_seed,
            truncation_budget,
        }
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.lambda.is_zero() {
            return Err(LatticeError::InvalidParams("lambda must be nonzero".into()));
        }
        if self.truncation_budget < 1 {
            return Err(LatticeError::InvalidParams(
                "truncation budget must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn is_integrable(&self) -> bool {
        self.lambda.is_one()
    }
}

/// `x_mn + 1/x_m1n - lambda/x_mn1`.
pub fn step_cell<F: Field>(
    x_mn: &LaurentSeries<F>,
    x_m1n: &LaurentSeries<F>,
    x_mn1: &LaurentSeries<F>,
    lambda: &F,
) -> Result<LaurentSeries<F>, SeriesError> {
    let east = x_m1n.inv()?;
    let mut north = x_mn1.inv()?;
    if *lambda != F::one() {
        north = north.scale(lambda);
    }
    Ok(x_mn.add(&east).sub(&north))
}

/// Fills every non-initial site by sweeping antidiagonals `m + n = d` upward.
pub fn evolve<F: Field>(mut grid: Grid<F>, params: &EvolutionParams) -> Result<Grid<F>, LatticeError> {
    params.validate()?;
    let lambda: F = field_image(&params.lambda)?;
    let (width, height) = (grid.width(), grid.height());
    for n in 0..=height {
        for m in 0..=width {
            if grid.is_initial(m, n) && grid.get(m, n).is_none() {
                return Err(LatticeError::InvalidSeed(format!("initial site ({m}, {n}) has no value")));
            }
        }
    }
    for d in 2..=width + height {
        let lo = d.saturating_sub(height).max(1);
        let hi = width.min(d - 1);
        if lo > hi {
            continue;
        }
        let sites: Vec<Site> = (lo..=hi)
            .map(|m| (m, d - m))
            .filter(|&(m, n)| !grid.is_initial(m, n))
            .collect();
        let g = &grid;
        let values: Vec<Result<LaurentSeries<F>, LatticeError>> = sites
            .par_iter()
            .with_min_len(8)
            .map(|&(m, n)| {
                let (a, b, c) = (g.value(m - 1, n - 1), g.value(m, n - 1), g.value(m - 1, n));
                for (divisor, site) in [(b, (m, n - 1)), (c, (m - 1, n))] {
                    if divisor.is_zero_sentinel() {
                        return Err(if g.is_initial(site.0, site.1) {
                            LatticeError::DivisionBySeriesZero { cell: (m, n) }
                        } else {
                            LatticeError::PrecisionExhausted { cell: (m, n) }
                        });
                    }
                }
                Ok(step_cell(a, b, c, &lambda)?)
            })
            .collect();
        for (&(m, n), v) in sites.iter().zip(values) {
            grid.set(m, n, v?);
        }
    }
    Ok(grid)
}

/// Builds the border from `seeds` and evolves it.
pub fn simulate<F: Field>(
    seeds: &[SeedSpec],
    shape: BorderShape,
    width: usize,
    height: usize,
    params: &EvolutionParams,
) -> Result<Grid<F>, LatticeError> {
    evolve(build_initial(seeds, shape, width, height, params)?, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Mod61;

    type S = LaurentSeries<Rational>;

    fn c(v: i64) -> S {
        S::constant(Rational::from_integer(v), 10)
    }

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    fn val<F: Field>(g: &Grid<F>, m: usize, n: usize) -> Option<i64> {
        g.value(m, n).valuation().ok()
    }

    fn strip_val<F: Field>(g: &Grid<F>, m: usize, n: usize) -> i64 {
        g.value(m, n).mul(g.value(m, n + 1)).add_scalar(&F::one().negated()).valuation().unwrap()
    }

    #[test]
    fn step_cell_examples() {
        let one = r(1);
        let out = step_cell(&c(1), &c(2), &c(4), &one).unwrap();
        assert_eq!(out.leading_term(), Some((0, Rational::new(5, 4).unwrap())));

        let eps = S::monomial(r(1), 1, 10);
        let out = step_cell(&c(1), &c(1), &eps, &one).unwrap();
        assert_eq!(out.leading_term(), Some((-1, r(-1))));

        let out = step_cell(&c(1), &c(2), &c(4), &r(2)).unwrap();
        assert_eq!(out.leading_term(), Some((0, r(1))));
        assert_eq!(out.terms().count(), 1);
    }

    #[test]
    fn step_cell_rejects_sentinel_divisor() {
        let err = step_cell(&c(1), &S::zero(3), &c(4), &r(1)).unwrap_err();
        assert_eq!(err, SeriesError::DivisionBySeriesZero { known_order: 3 });
    }

    #[test]
    fn generic_border_is_regular() {
        let p = EvolutionParams::integrable(3, 8);
        let g: Grid<Rational> = simulate(&[], BorderShape::LShape, 10, 10, &p).unwrap();
        assert!(g.is_filled());
        assert!(g.iter().all(|(_, _, v)| v.valuation() == Ok(0)));
    }

    #[test]
    fn single_zero_on_staircase_gives_elementary_cell() {
        let p = EvolutionParams::integrable(1, 12);
        let seeds = [SeedSpec::zero(1, (5, 5))];
        let g: Grid<Mod61> = simulate(&seeds, BorderShape::Staircase { offset: 10 }, 16, 16, &p).unwrap();
        let singular: Vec<Site> = g
            .iter()
            .filter(|(_, _, v)| v.valuation() != Ok(0))
            .map(|(m, n, _)| (m, n))
            .collect();
        assert_eq!(singular.len(), 4, "{singular:?}");
        assert!(singular.contains(&(5, 5)));
        assert!(singular.contains(&(6, 6)));
    }

    #[test]
    fn infinity_at_corner_runs_along_diagonal() {
        let p = EvolutionParams::integrable(2, 10);
        let seeds = [SeedSpec::infinity(1, (0, 0))];
        let g: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 12, 12, &p).unwrap();
        for k in 0..=12 {
            assert_eq!(val(&g, k, k), Some(-1));
        }
        assert_eq!(val(&g, 3, 5), Some(0));
    }

    #[test]
    fn seeded_taishi_product() {
        let p = EvolutionParams::integrable(5, 10);
        let g: Grid<Rational> = build_initial(&[SeedSpec::taishi(vec![1], 4)], BorderShape::LShape, 8, 8, &p).unwrap();
        assert_eq!(strip_val(&g, 0, 4), 1);
        assert_eq!(strip_val(&g, 0, 6), 0);
    }

    #[test]
    fn taishi_propagates_for_lambda_one() {
        let p = EvolutionParams::integrable(7, 16);
        let seeds = [SeedSpec::taishi(vec![3], 5)];
        let g: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 10, 10, &p).unwrap();
        for m in 0..=10 {
            assert_eq!(strip_val(&g, m, 5), 3, "column {m}");
        }
    }

    #[test]
    fn lambda_two_destroys_taishi() {
        let p = EvolutionParams::new(r(2), 7, 16).unwrap();
        let seeds = [SeedSpec::taishi(vec![2], 5)];
        let g: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 6, 10, &p).unwrap();
        assert_eq!(strip_val(&g, 1, 5), 0);
    }

    #[test]
    fn vertical_taishi_propagates() {
        let p = EvolutionParams::integrable(7, 16);
        let seeds = [SeedSpec::new(
            SeedVariant::VerticalTaishi { weights: vec![2], anchor: None },
            (4, 0),
        )];
        let g: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 10, 10, &p).unwrap();
        for n in 0..=10 {
            let prod = g.value(4, n).mul(g.value(5, n)).add_scalar(&Mod61::one());
            assert_eq!(prod.valuation(), Ok(2), "row {n}");
        }
    }

    #[test]
    fn deterministic_and_lambda_one_matches_default() {
        let seeds = [SeedSpec::taishi(vec![2], 5), SeedSpec::infinity(1, (0, 0))];
        let p = EvolutionParams::integrable(11, 20);
        let q = EvolutionParams::new(r(1), 11, 20).unwrap();
        let a: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 12, 12, &p).unwrap();
        let b: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 12, 12, &q).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rational_and_modular_agree_on_valuations() {
        let seeds = [SeedSpec::taishi(vec![2], 3), SeedSpec::infinity(1, (0, 0))];
        let p = EvolutionParams::integrable(4, 6);
        let a: Grid<Rational> = simulate(&seeds, BorderShape::LShape, 7, 7, &p).unwrap();
        let b: Grid<Mod61> = simulate(&seeds, BorderShape::LShape, 7, 7, &p).unwrap();
        for (m, n, v) in a.iter() {
            let img = LaurentSeries::<Mod61>::from_json(&v.to_json()).unwrap();
            assert_eq!(&img, b.value(m, n), "site ({m}, {n})");
        }
    }

    #[test]
    fn seed_errors() {
        let p = EvolutionParams::integrable(1, 10);
        let clash = [SeedSpec::taishi(vec![1, 1], 3), SeedSpec::zero(1, (0, 5))];
        let err = build_initial::<Rational>(&clash, BorderShape::LShape, 8, 8, &p).unwrap_err();
        assert!(matches!(err, LatticeError::SeedConflict { site: (0, 5), .. }));

        let inner = [SeedSpec::zero(1, (3, 3))];
        let err = build_initial::<Rational>(&inner, BorderShape::LShape, 8, 8, &p).unwrap_err();
        assert!(matches!(err, LatticeError::InvalidSeed(_)));

        assert!(EvolutionParams::new(r(0), 1, 10).is_err());
    }

    #[test]
    fn exact_zero_seed_is_division_error() {
        let p = EvolutionParams::integrable(1, 10);
        let seeds = [SeedSpec::new(SeedVariant::Generic { value: Some(r(0)) }, (3, 0))];
        let err = simulate::<Rational>(&seeds, BorderShape::LShape, 6, 6, &p).unwrap_err();
        assert_eq!(err, LatticeError::DivisionBySeriesZero { cell: (3, 1) });
    }

    #[test]
    fn seed_json_forms() {
        let s: SeedSpec =
            serde_json::from_str(r#"{"variant":"taishi_pair","weight":2,"position":[0,5],"anchor":"1/2"}"#).unwrap();
        assert_eq!(
            s,
            SeedSpec::new(
                SeedVariant::Taishi { weights: vec![2], anchor: Some(Rational::new(1, 2).unwrap()) },
                (0, 5)
            )
        );
        let s: SeedSpec = serde_json::from_str(r#"{"variant":"infinity","weight":1,"position":[0,0]}"#).unwrap();
        assert_eq!(s, SeedSpec::infinity(1, (0, 0)));
    }
}
