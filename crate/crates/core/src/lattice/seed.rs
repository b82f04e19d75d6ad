use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

use super::grid::{BorderShape, Grid};
use super::{EvolutionParams, LatticeError, Site};
use crate::exactnum::{field_image, Field, LaurentSeries, Rational, SeriesJson};

/// Kind of prescribed initial value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedVariant {
    /// A fixed regular value, or a fresh PRNG draw when `value` is absent.
    Generic {
        #[serde(default)]
        value: Option<Rational>,
    },
    /// `c * eps^weight`.
    Zero { weight: u32 },
    /// `c * eps^(-weight)`.
    Infinity { weight: u32 },
    /// Horizontal strips on column 0 starting at the seed row: consecutive
    /// products equal `1 + c_i * eps^(weights[i])`. A zero weight leaves a
    /// generic gap row.
    #[serde(alias = "taishi_pair")]
    Taishi {
        #[serde(alias = "weight", deserialize_with = "one_or_many")]
        weights: Vec<u32>,
        #[serde(default)]
        anchor: Option<Rational>,
    },
    /// Vertical strips on row 0: consecutive products `-1 + c_i * eps^(weights[i])`.
    VerticalTaishi {
        #[serde(alias = "weight", deserialize_with = "one_or_many")]
        weights: Vec<u32>,
        #[serde(default)]
        anchor: Option<Rational>,
    },
    /// Verbatim series value.
    Series { series: SeriesJson },
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u32>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(u32),
        Many(Vec<u32>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(w) => vec![w],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    #[serde(flatten)]
    pub variant: SeedVariant,
    /// `[m, n]` of the (first) seeded site.
    pub position: Site,
}

impl SeedSpec {
    pub fn new(variant: SeedVariant, position: Site) -> Self {
        SeedSpec { variant, position }
    }

    pub fn zero(weight: u32, position: Site) -> Self {
        SeedSpec::new(SeedVariant::Zero { weight }, position)
    }

    pub fn infinity(weight: u32, position: Site) -> Self {
        SeedSpec::new(SeedVariant::Infinity { weight }, position)
    }

    /// Strips on column 0 with the given ascending weights, first row `base_row`.
    pub fn taishi(weights: Vec<u32>, base_row: usize) -> Self {
        SeedSpec::new(SeedVariant::Taishi { weights, anchor: None }, (0, base_row))
    }

    /// Every site this seed prescribes.
    pub fn sites(&self) -> Vec<Site> {
        let (m, n) = self.position;
        match &self.variant {
            SeedVariant::Taishi { weights, .. } => (0..=weights.len()).map(|i| (m, n + i)).collect(),
            SeedVariant::VerticalTaishi { weights, .. } => {
                (0..=weights.len()).map(|i| (m + i, n)).collect()
            }
            _ => vec![(m, n)],
        }
    }

    /// Sum of absolute weights carried by the seed.
    pub fn weight(&self) -> u64 {
        match &self.variant {
            SeedVariant::Generic { .. } => 0,
            SeedVariant::Zero { weight } | SeedVariant::Infinity { weight } => *weight as u64,
            SeedVariant::Taishi { weights, .. } | SeedVariant::VerticalTaishi { weights, .. } => {
                weights.iter().map(|&w| w as u64).sum()
            }
            SeedVariant::Series { series } => series
                .terms
                .iter()
                .map(|t| t.0.unsigned_abs())
                .min()
                .unwrap_or(0),
        }
    }
}

/// Which edge of a staircase border a run of seeds sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaircaseEdge {
    /// Outermost initial sites, `m + n = offset`.
    Upper,
    /// One step inside, `m + n = offset - 1`.
    Lower,
}

impl StaircaseEdge {
    /// `count` consecutive sites along the edge, starting at column `m0`.
    pub fn sites(self, offset: usize, m0: usize, count: usize) -> Vec<Site> {
        let level = match self {
            StaircaseEdge::Upper => offset,
            StaircaseEdge::Lower => offset - 1,
        };
        (0..count).map(|i| (m0 + i, level - m0 - i)).collect()
    }
}

/// `4 W + 8`, `W` being the total seeded weight.
pub fn default_truncation_budget(seeds: &[SeedSpec]) -> i64 {
    4 * seeds.iter().map(SeedSpec::weight).sum::<u64>() as i64 + 8
}

/// Random nonzero rational `±u/v` with `u, v` in `1..=97`.
pub fn draw_generic(rng: &mut ChaCha8Rng) -> Rational {
    let u: i64 = rng.random_range(1..=97);
    let v: i64 = rng.random_range(1..=97);
    let r = Rational::new(u, v).expect("nonzero denominator");
    if rng.random_bool(0.5) {
        -r
    } else {
        r
    }
}

/// Fills the border of a fresh grid.
///
/// Every initial site first receives a generic value from stream 0 of the
/// PRNG, in a fixed order, so adding or moving seeds never changes the other
/// draws. Seed coefficients `c` come from stream 1, in seed order.
pub fn build_initial<F: Field>(
    seeds: &[SeedSpec],
    shape: BorderShape,
    width: usize,
    height: usize,
    params: &EvolutionParams,
) -> Result<Grid<F>, LatticeError> {
    params.validate()?;
    let k = params.truncation_budget;
    let mut grid = Grid::new(width, height, shape);

    let mut generic: HashMap<Site, Rational> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(params.prng_seed);
    for n in 0..=height {
        for m in 0..=width {
            if shape.is_initial(m, n) {
                generic.insert((m, n), draw_generic(&mut rng));
            }
        }
    }

    let mut owner: HashMap<Site, usize> = HashMap::new();
    for (i, seed) in seeds.iter().enumerate() {
        check_seed(seed, k)?;
        for site in seed.sites() {
            if !grid.contains(site.0, site.1) || !shape.is_initial(site.0, site.1) {
                return Err(LatticeError::InvalidSeed(format!(
                    "site ({}, {}) is not an initial site of the window",
                    site.0, site.1
                )));
            }
            if let Some(prev) = owner.insert(site, i) {
                return Err(LatticeError::SeedConflict {
                    site,
                    first: prev,
                    second: i,
                });
            }
        }
    }

    let constant = |r: &Rational| -> Result<LaurentSeries<F>, LatticeError> {
        Ok(LaurentSeries::constant(field_image::<F>(r)?, k))
    };
    for (site, r) in &generic {
        grid.set(site.0, site.1, constant(r)?);
    }

    let mut coeff_rng = ChaCha8Rng::seed_from_u64(params.prng_seed);
    coeff_rng.set_stream(1);
    for seed in seeds {
        let (m, n) = seed.position;
        match &seed.variant {
            SeedVariant::Generic { value } => {
                if let Some(v) = value {
                    grid.set(m, n, constant(v)?);
                }
            }
            SeedVariant::Zero { weight } => {
                let c = field_image::<F>(&draw_generic(&mut coeff_rng))?;
                grid.set(m, n, LaurentSeries::monomial(c, *weight as i64, k));
            }
            SeedVariant::Infinity { weight } => {
                let c = field_image::<F>(&draw_generic(&mut coeff_rng))?;
                grid.set(m, n, LaurentSeries::monomial(c, -(*weight as i64), k));
            }
            SeedVariant::Taishi { weights, anchor } | SeedVariant::VerticalTaishi { weights, anchor } => {
                let vertical = matches!(seed.variant, SeedVariant::VerticalTaishi { .. });
                let sites = seed.sites();
                if let Some(a) = anchor {
                    grid.set(m, n, constant(a)?);
                }
                let target = if vertical { F::one().negated() } else { F::one() };
                for (i, &w) in weights.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let c = field_image::<F>(&draw_generic(&mut coeff_rng))?;
                    let product = LaurentSeries::from_terms([(0, target.clone()), (w as i64, c)], k);
                    let prev = grid.value(sites[i].0, sites[i].1).clone();
                    let next = product.mul(&prev.inv()?);
                    grid.set(sites[i + 1].0, sites[i + 1].1, next);
                }
            }
            SeedVariant::Series { series } => {
                grid.set(m, n, LaurentSeries::from_json(series)?);
            }
        }
    }
    Ok(grid)
}

fn check_seed(seed: &SeedSpec, k: i64) -> Result<(), LatticeError> {
    let (m, n) = seed.position;
    let too_fine = |w: u32| {
        Err(LatticeError::InvalidParams(format!(
            "seed weight {w} exceeds the truncation budget {k}"
        )))
    };
    match &seed.variant {
        SeedVariant::Zero { weight: 0 } | SeedVariant::Infinity { weight: 0 } => Err(
            LatticeError::InvalidSeed(format!("seed at ({m}, {n}) needs a positive weight")),
        ),
        SeedVariant::Zero { weight } if *weight as i64 > k => too_fine(*weight),
        SeedVariant::Taishi { weights, anchor } | SeedVariant::VerticalTaishi { weights, anchor } => {
            let vertical = matches!(seed.variant, SeedVariant::VerticalTaishi { .. });
            if weights.is_empty() {
                return Err(LatticeError::InvalidSeed("taishi seed without weights".into()));
            }
            if vertical && n != 0 {
                return Err(LatticeError::InvalidSeed(format!(
                    "vertical taishi must sit on row 0, got ({m}, {n})"
                )));
            }
            if !vertical && m != 0 {
                return Err(LatticeError::InvalidSeed(format!(
                    "taishi must sit on column 0, got ({m}, {n})"
                )));
            }
            if anchor.as_ref().is_some_and(Rational::is_zero) {
                return Err(LatticeError::InvalidSeed("taishi anchor must be nonzero".into()));
            }
            match weights.iter().find(|&&w| w as i64 > k) {
                Some(&w) => too_fine(w),
                None => Ok(()),
            }
        }
        _ => Ok(()),
    }
}
