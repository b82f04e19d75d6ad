//! Structural description of an evolved grid: valuations, strips, diagonals
//! and confined clusters.

mod objects;
mod render;
mod strips;
mod valuation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use objects::{detect_confined_clusters, detect_diagonals, Band, Cluster, DiagonalSpec};
pub use render::{glyph, overflow_sites, parse_ascii, render_ascii, render_svg, unglyph};
pub use strips::{combined_vector, detect_strips, detect_vertical_strips, Orientation, StripProfile};
pub use valuation::{valuation_map, ValuationMap};

use crate::lattice::Site;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("{orientation:?} strip weight of line {line} varies across the measured range")]
    InconsistentStrip { line: usize, orientation: Orientation },
    #[error("{orientation:?} strip product on line {line} at {position} is zero up to truncation")]
    UndeterminedProduct {
        line: usize,
        position: usize,
        orientation: Orientation,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Regular,
    ZeroOfWeight(u32),
    InfinityOfWeight(u32),
    /// Regular value on a row bordering strip row `row`.
    StripMember { row: usize },
    /// Zero up to truncation.
    Undetermined,
}

/// Per-site classes, row-major from `n = 0`. Regular sites on the two rows
/// of a measured horizontal strip, inside its column range, become
/// [`CellClass::StripMember`].
pub fn classify_cells(vmap: &ValuationMap, strips: &[StripProfile]) -> Vec<CellClass> {
    let mut out = Vec::with_capacity((vmap.width() + 1) * (vmap.height() + 1));
    for n in 0..=vmap.height() {
        for m in 0..=vmap.width() {
            out.push(match vmap.get(m, n) {
                None => CellClass::Undetermined,
                Some(v) if v > 0 => CellClass::ZeroOfWeight(v as u32),
                Some(v) if v < 0 => CellClass::InfinityOfWeight((-v) as u32),
                Some(_) => strip_row_at(strips, m, n)
                    .map(|row| CellClass::StripMember { row })
                    .unwrap_or(CellClass::Regular),
            });
        }
    }
    out
}

fn strip_row_at(strips: &[StripProfile], m: usize, n: usize) -> Option<usize> {
    strips
        .iter()
        .filter(|s| s.orientation == Orientation::Horizontal)
        .filter(|s| s.column_range.0 <= m && m <= s.column_range.1)
        .flat_map(|s| {
            s.weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0)
                .map(move |(i, _)| s.base_row + i)
        })
        .find(|&row| n == row || n == row + 1)
}

/// Everything extracted from one grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub strips: Vec<StripProfile>,
    pub vertical_strips: Vec<StripProfile>,
    pub diagonals: Vec<DiagonalSpec>,
    pub clusters: Vec<Cluster>,
    pub undefined: Vec<Site>,
    /// Measurements that could not be made, e.g. a strip crossed inside its range.
    #[serde(default)]
    pub notes: Vec<String>,
}
