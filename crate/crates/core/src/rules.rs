//! Taishi interaction calculus: closed forms and the elementary-step dynamics
//! on strip weight vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("degenerate taishi: total weight n + p must be positive (n = {n}, p = {p})")]
    DegenerateTaishi { n: u32, p: u32 },
    #[error("taishi at rows {lower_top} and {upper_base} are not isolated (need an empty strip row between them)")]
    NotIsolated { lower_top: i64, upper_base: i64 },
    #[error("diagonal weight must be positive")]
    NonPositiveDiagonal,
    #[error("cannot parse weight vector `{0}`: expected e.g. \"1,3,0,9@0\"")]
    Parse(String),
}

/// Strip weights in ascending row order: `w[i]` belongs to strip row `base_row + i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVector {
    pub base_row: i64,
    pub w: Vec<u32>,
}

impl WeightVector {
    pub fn new(base_row: i64, w: Vec<u32>) -> Self {
        WeightVector { base_row, w }
    }

    /// Ingests a column printed top row first.
    pub fn from_top_down(base_row: i64, column: &[u32]) -> Self {
        WeightVector::new(base_row, column.iter().rev().copied().collect())
    }

    pub fn to_top_down(&self) -> Vec<u32> {
        self.w.iter().rev().copied().collect()
    }

    pub fn total(&self) -> u64 {
        self.w.iter().map(|&x| x as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    /// Weight of strip row `row` (zero outside the stored range).
    pub fn at(&self, row: i64) -> u32 {
        let i = row - self.base_row;
        if i < 0 {
            0
        } else {
            self.w.get(i as usize).copied().unwrap_or(0)
        }
    }

    /// Lowest and highest rows with nonzero weight.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = self.w.iter().position(|&x| x > 0)?;
        let hi = self.w.iter().rposition(|&x| x > 0)?;
        Some((self.base_row + lo as i64, self.base_row + hi as i64))
    }

    /// Trims zero entries at both ends. The zero vector keeps its base row
    /// and becomes empty.
    pub fn canonical(&self) -> WeightVector {
        match self.support() {
            None => WeightVector::new(self.base_row, Vec::new()),
            Some((lo, hi)) => WeightVector::new(
                lo,
                self.w[(lo - self.base_row) as usize..=(hi - self.base_row) as usize].to_vec(),
            ),
        }
    }

    /// Entry-wise sum, aligned by row.
    pub fn merged(&self, other: &WeightVector) -> WeightVector {
        if self.w.is_empty() {
            return other.clone();
        }
        if other.w.is_empty() {
            return self.clone();
        }
        let lo = self.base_row.min(other.base_row);
        let hi = (self.base_row + self.w.len() as i64).max(other.base_row + other.w.len() as i64);
        let w = (lo..hi).map(|r| self.at(r) + other.at(r)).collect();
        WeightVector::new(lo, w)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.w.iter().map(u32::to_string).collect();
        write!(f, "{}@{}", body.join(","), self.base_row)
    }
}

impl FromStr for WeightVector {
    type Err = RulesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RulesError::Parse(s.to_string());
        let s = s.trim();
        let (body, base) = match s.split_once('@') {
            Some((b, r)) => (b, r.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s, 0),
        };
        if body.trim().is_empty() {
            return Ok(WeightVector::new(base, Vec::new()));
        }
        let w = body
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeightVector::new(base, w))
    }
}

/// One elementary step: interaction with a diagonal of weight 1/2.
///
/// Scanning upward, the lowest positive entry gives one unit to the entry
/// above it and the scan resumes two rows higher.
pub fn elementary_step(v: &WeightVector) -> WeightVector {
    let mut w = v.w.clone();
    let mut i = 0;
    while i < w.len() {
        if w[i] > 0 {
            w[i] -= 1;
            if i + 1 == w.len() {
                w.push(0);
            }
            w[i + 1] += 1;
            i += 2;
        } else {
            i += 1;
        }
    }
    WeightVector::new(v.base_row, w)
}

/// All `2q` intermediate vectors of the interaction with a weight-`q` diagonal.
pub fn interaction_trace(v: &WeightVector, q: u32) -> Vec<WeightVector> {
    let mut out = Vec::with_capacity(2 * q as usize);
    let mut cur = v.clone();
    for _ in 0..2 * q {
        cur = elementary_step(&cur);
        out.push(cur.clone());
    }
    out
}

pub fn interact_diagonal(v: &WeightVector, q: u32) -> WeightVector {
    (0..2 * q).fold(v.clone(), |acc, _| elementary_step(&acc))
}

/// Upshift `k` with the lower (`n_tilde`) and upper (`p_tilde`) weights that
/// sit on strip rows `base + k` and `base + k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaishiOutcome {
    pub k: i64,
    pub n_tilde: u32,
    pub p_tilde: u32,
}

impl TaishiOutcome {
    /// Canonical vector for a taishi that started at `base_row`.
    pub fn placed(&self, base_row: i64) -> WeightVector {
        WeightVector::new(base_row + self.k, vec![self.n_tilde, self.p_tilde]).canonical()
    }
}

pub fn canonicalize(v: &WeightVector) -> WeightVector {
    v.canonical()
}

/// Outcome for a taishi with weights `n` (lower) and `p` (upper) hit by a
/// diagonal of weight `q`.
pub fn closed_form_taishi(n: u32, p: u32, q: u32) -> Result<TaishiOutcome, RulesError> {
    let s = n + p;
    if s == 0 {
        return Err(RulesError::DegenerateTaishi { n, p });
    }
    let m = 2 * q + p;
    Ok(if m % s != 0 {
        let k = m / s;
        let p_tilde = m - k * s;
        TaishiOutcome {
            k: k as i64,
            n_tilde: s - p_tilde,
            p_tilde,
        }
    } else {
        TaishiOutcome {
            k: (m / s - 1) as i64,
            n_tilde: 0,
            p_tilde: s,
        }
    })
}

/// Single strip of weight `p`: pushed up by `[2q/p]`, split into
/// `(k+1)p - 2q` below and `2q - kp` above.
pub fn single_strip_rule(p: u32, q: u32) -> TaishiOutcome {
    assert!(p >= 1, "strip weight must be positive");
    let k = 2 * q / p;
    TaishiOutcome {
        k: k as i64,
        n_tilde: (k + 1) * p - 2 * q,
        p_tilde: 2 * q - k * p,
    }
}

/// A taishi with weights `n` on strip row `base_row` and `p` on the row above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taishi {
    pub base_row: i64,
    pub n: u32,
    pub p: u32,
}

impl Taishi {
    pub fn top_row(&self) -> i64 {
        if self.p > 0 {
            self.base_row + 1
        } else {
            self.base_row
        }
    }

    pub fn vector(&self) -> WeightVector {
        WeightVector::new(self.base_row, vec![self.n, self.p]).canonical()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairScenario {
    /// The two taishi pass the diagonal independently.
    A,
    /// The lower taishi is pushed two extra rows and overtakes the upper one.
    B,
    /// Neither closed form applies; only the step dynamics resolve it.
    Ongoing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub scenario: PairScenario,
    /// Lower taishi outcome, shift measured from its own base row.
    pub lower: Option<TaishiOutcome>,
    /// Upper taishi outcome, shift (`K` or `K'`) measured from its base row.
    pub upper: Option<TaishiOutcome>,
    /// Canonical combined profile after the interaction.
    pub combined: Option<WeightVector>,
}

/// Two isolated taishi hit by one diagonal of weight `q`.
pub fn scenario_predict(lower: Taishi, upper: Taishi, q: u32) -> Result<PairOutcome, RulesError> {
    if q == 0 {
        return Err(RulesError::NonPositiveDiagonal);
    }
    for t in [lower, upper] {
        if t.n == 0 {
            return Err(RulesError::DegenerateTaishi { n: t.n, p: t.p });
        }
    }
    if upper.base_row < lower.top_row() + 2 {
        return Err(RulesError::NotIsolated {
            lower_top: lower.top_row(),
            upper_base: upper.base_row,
        });
    }
    let separated = |below: &WeightVector, above: &WeightVector| match (below.support(), above.support()) {
        (Some((_, hi)), Some((lo, _))) => hi + 2 <= lo,
        _ => true,
    };
    let combine = |a: &WeightVector, b: &WeightVector| a.merged(b).canonical();

    let lo_a = closed_form_taishi(lower.n, lower.p, q)?;
    let up_a = closed_form_taishi(upper.n, upper.p, q)?;
    let lo_vec = lo_a.placed(lower.base_row);
    let up_vec = up_a.placed(upper.base_row);
    if separated(&lo_vec, &up_vec) {
        return Ok(PairOutcome {
            scenario: PairScenario::A,
            lower: Some(lo_a),
            upper: Some(up_a),
            combined: Some(combine(&lo_vec, &up_vec)),
        });
    }

    let ongoing = PairOutcome {
        scenario: PairScenario::Ongoing,
        lower: None,
        upper: None,
        combined: None,
    };
    let (s_lo, s_up) = ((lower.n + lower.p) as i64, (upper.n + upper.p) as i64);
    let numer = 2 * q as i64 + upper.p as i64 - 2 * s_lo;
    if numer < 0 {
        return Ok(ongoing);
    }
    let k_prime = numer / s_up;
    let p_big = numer - k_prime * s_up;
    let up_b = TaishiOutcome {
        k: k_prime,
        n_tilde: (s_up - p_big) as u32,
        p_tilde: p_big as u32,
    };
    let lo_b = TaishiOutcome {
        k: lo_a.k + 2,
        ..lo_a
    };
    let lo_vec = lo_b.placed(lower.base_row);
    let up_vec = up_b.placed(upper.base_row);
    if !separated(&up_vec, &lo_vec) {
        return Ok(ongoing);
    }
    Ok(PairOutcome {
        scenario: PairScenario::B,
        lower: Some(lo_b),
        upper: Some(up_b),
        combined: Some(combine(&lo_vec, &up_vec)),
    })
}
