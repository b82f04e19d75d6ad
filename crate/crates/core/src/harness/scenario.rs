use serde::{Deserialize, Deserializer, Serialize};

use super::HarnessError;
use crate::exactnum::Rational;
use crate::lattice::{default_truncation_budget, BorderShape, EvolutionParams, SeedSpec, SeedVariant};
use crate::rules::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    /// Exact arithmetic in the prime field of order `2^61 - 1`.
    #[default]
    Modular,
    /// Arbitrary-precision rationals; only practical for small windows.
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    #[default]
    LShape,
    Staircase,
}

fn default_lambda() -> Rational {
    Rational::from_integer(1)
}

fn default_margin() -> usize {
    5
}

fn weight_vector_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<WeightVector>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    s.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
}

fn weight_vector_to_text<S: serde::Serializer>(v: &Option<WeightVector>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// A lattice experiment as read from a scenario file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_lambda")]
    pub lambda: Rational,
    /// `[M, N]`; sized from the seeded weights when absent.
    #[serde(default)]
    pub window: Option<[usize; 2]>,
    #[serde(default)]
    pub border_shape: ShapeName,
    /// Staircase level `S` (sites with `m + n <= S` are initial); defaults to `(M + N) / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staircase_offset: Option<usize>,
    pub seeds: Vec<SeedSpec>,
    #[serde(default)]
    pub prng_seed: u64,
    /// Known order `K` of the seeds; `4 W + 8` when absent.
    #[serde(default)]
    pub truncation_budget: Option<i64>,
    #[serde(default)]
    pub arithmetic: Arithmetic,
    /// Width of the west and east measurement column ranges, minus one.
    #[serde(default = "default_margin")]
    pub margin: usize,
    /// Optional expected east profile, e.g. `"1,2@9"`.
    #[serde(
        default,
        deserialize_with = "weight_vector_text",
        serialize_with = "weight_vector_to_text",
        skip_serializing_if = "Option::is_none"
    )]
    pub expected_east: Option<WeightVector>,
}

impl Scenario {
    pub fn new(seeds: Vec<SeedSpec>) -> Self {
        Scenario {
            name: None,
            lambda: default_lambda(),
            window: None,
            border_shape: ShapeName::LShape,
            staircase_offset: None,
            seeds,
            prng_seed: 0,
            truncation_budget: None,
            arithmetic: Arithmetic::Modular,
            margin: default_margin(),
            expected_east: None,
        }
    }

    /// Parses and validates scenario JSON; errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            HarnessError::Malformed {
                field: path,
                message: e.into_inner().to_string(),
            }
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |field: &str, message: &str| {
            Err(HarnessError::Malformed {
                field: field.into(),
                message: message.into(),
            })
        };
        if self.lambda.is_zero() {
            return bad("lambda", "lambda must be nonzero");
        }
        if let Some([m, n]) = self.window {
            if m < 2 || n < 2 {
                return bad("window", "window must be at least 2 x 2");
            }
            if self.margin >= m {
                return bad("margin", "margin must be smaller than the window width");
            }
        }
        if self.truncation_budget.is_some_and(|k| k < 1) {
            return bad("truncation_budget", "truncation budget must be positive");
        }
        if self.border_shape == ShapeName::LShape && self.staircase_offset.is_some() {
            return bad("staircase_offset", "only meaningful with border_shape \"staircase\"");
        }
        Ok(())
    }

    /// Sum of the weights of every Infinity seed.
    pub fn diagonal_weight(&self) -> u32 {
        self.seeds
            .iter()
            .map(|s| match s.variant {
                SeedVariant::Infinity { weight } => weight,
                _ => 0,
            })
            .sum()
    }

    /// Total weight of the horizontal strip seeds.
    pub fn strip_weight(&self) -> u32 {
        self.seeds
            .iter()
            .map(|s| match &s.variant {
                SeedVariant::Taishi { weights, .. } => weights.iter().sum(),
                _ => 0,
            })
            .sum()
    }

    /// `[M, N]`, defaulting to `4 (2 q + W) + 24` on both axes.
    pub fn window(&self) -> [usize; 2] {
        self.window.unwrap_or_else(|| {
            let side = 4 * (2 * self.diagonal_weight() + self.strip_weight()) as usize + 24;
            [side, side]
        })
    }

    pub fn shape(&self) -> BorderShape {
        match self.border_shape {
            ShapeName::LShape => BorderShape::LShape,
            ShapeName::Staircase => {
                let [m, n] = self.window();
                BorderShape::Staircase {
                    offset: self.staircase_offset.unwrap_or((m + n) / 2),
                }
            }
        }
    }

    pub fn truncation_budget(&self) -> i64 {
        self.truncation_budget
            .unwrap_or_else(|| default_truncation_budget(&self.seeds))
    }

    pub fn params(&self, prng_seed: u64, truncation_budget: i64) -> EvolutionParams {
        EvolutionParams {
            lambda: self.lambda.clone(),
            prng_seed,
            truncation_budget,
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "scenario".into())
    }
}

/// Single strip of weight `p` at the standard base row, crossed by one
/// diagonal of weight `q` from the corner.
pub fn single_strip_scenario(p: u32, q: u32) -> Scenario {
    strips_and_diagonals(vec![p], &[(q, (0, 0))])
}

/// Strips on column 0 (ascending weights) and Infinity seeds `(q, site)`.
///
/// The base row sits `2 q_total + W + 6` rows up so the west measurement
/// columns are clear of every diagonal.
pub fn strips_and_diagonals(weights: Vec<u32>, diagonals: &[(u32, (usize, usize))]) -> Scenario {
    let q_total: u32 = diagonals.iter().map(|d| d.0).sum();
    let w: u32 = weights.iter().sum();
    let base = (2 * q_total + w) as usize + 6;
    let mut seeds = vec![SeedSpec::taishi(weights.clone(), base)];
    seeds.extend(diagonals.iter().map(|&(q, site)| SeedSpec::infinity(q, site)));
    let mut sc = Scenario::new(seeds);
    sc.name = Some(format!(
        "strips {} q {}",
        WeightVector::new(base as i64, weights),
        diagonals.iter().map(|d| d.0.to_string()).collect::<Vec<_>>().join("+")
    ));
    sc
}
