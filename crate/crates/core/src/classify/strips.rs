use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::exactnum::Field;
use crate::lattice::Grid;
use crate::rules::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Products `x[m][r] * x[m][r+1]` close to 1, constant along `m`.
    Horizontal,
    /// Products `x[c][n] * x[c+1][n]` close to -1, constant along `n`.
    Vertical,
}

/// Contiguous strip rows (or columns, for vertical strips) with their weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripProfile {
    pub orientation: Orientation,
    /// First strip row (first strip column when vertical).
    pub base_row: usize,
    pub weights: Vec<u32>,
    /// Inclusive range of columns (rows when vertical) the weights were verified on.
    pub column_range: (usize, usize),
}

impl StripProfile {
    pub fn to_weight_vector(&self) -> WeightVector {
        WeightVector::new(self.base_row as i64, self.weights.clone())
    }

    pub fn total(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }
}

/// Sum of several profiles as one weight vector (zero rows included).
pub fn combined_vector(profiles: &[StripProfile]) -> WeightVector {
    profiles
        .iter()
        .fold(WeightVector::new(0, Vec::new()), |acc, p| acc.merged(&p.to_weight_vector()))
        .canonical()
}

/// Strip weight of one line: `Some(w)` when every product deviates from the
/// target by exactly `eps^w` with `w > 0`, `None` when none does.
fn line_weight(
    vals: impl Iterator<Item = (usize, Option<i64>)>,
    line: usize,
    orientation: Orientation,
) -> Result<Option<u32>, ClassifyError> {
    let mut seen: Option<i64> = None;
    let mut any_positive = false;
    let mut all_positive = true;
    for (pos, v) in vals {
        let Some(v) = v else {
            return Err(ClassifyError::UndeterminedProduct { line, position: pos, orientation });
        };
        if v > 0 {
            any_positive = true;
        } else {
            all_positive = false;
        }
        match seen {
            None => seen = Some(v),
            Some(s) if s != v && (v > 0 || s > 0) => {
                return Err(ClassifyError::InconsistentStrip { line, orientation });
            }
            _ => {}
        }
    }
    if any_positive && !all_positive {
        return Err(ClassifyError::InconsistentStrip { line, orientation });
    }
    Ok(if any_positive { seen.map(|v| v as u32) } else { None })
}

fn group(weights: Vec<Option<u32>>, range: (usize, usize), orientation: Orientation) -> Vec<StripProfile> {
    let mut out = Vec::new();
    let mut cur: Option<StripProfile> = None;
    for (r, w) in weights.into_iter().enumerate() {
        match (w, cur.as_mut()) {
            (Some(w), Some(p)) => p.weights.push(w),
            (Some(w), None) => {
                cur = Some(StripProfile {
                    orientation,
                    base_row: r,
                    weights: vec![w],
                    column_range: range,
                })
            }
            (None, _) => out.extend(cur.take()),
        }
    }
    out.extend(cur);
    out
}

/// Horizontal strips measured over the inclusive column range.
pub fn detect_strips<F: Field>(grid: &Grid<F>, column_range: (usize, usize)) -> Result<Vec<StripProfile>, ClassifyError> {
    let (lo, hi) = column_range;
    assert!(lo <= hi && hi <= grid.width(), "column range outside the window");
    let minus_one = F::one().negated();
    let mut weights = Vec::with_capacity(grid.height());
    for r in 0..grid.height() {
        let vals = (lo..=hi).map(|m| {
            let prod = grid.value(m, r).mul(grid.value(m, r + 1)).add_scalar(&minus_one);
            (m, prod.valuation().ok())
        });
        weights.push(line_weight(vals, r, Orientation::Horizontal)?);
    }
    Ok(group(weights, column_range, Orientation::Horizontal))
}

/// Vertical strips measured over the inclusive row range.
pub fn detect_vertical_strips<F: Field>(
    grid: &Grid<F>,
    row_range: (usize, usize),
) -> Result<Vec<StripProfile>, ClassifyError> {
    let (lo, hi) = row_range;
    assert!(lo <= hi && hi <= grid.height(), "row range outside the window");
    let one = F::one();
    let mut weights = Vec::with_capacity(grid.width());
    for c in 0..grid.width() {
        let vals = (lo..=hi).map(|n| {
            let prod = grid.value(c, n).mul(grid.value(c + 1, n)).add_scalar(&one);
            (n, prod.valuation().ok())
        });
        weights.push(line_weight(vals, c, Orientation::Vertical)?);
    }
    Ok(group(weights, row_range, Orientation::Vertical))
}
