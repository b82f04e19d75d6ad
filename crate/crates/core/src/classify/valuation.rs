use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::exactnum::Field;
use crate::lattice::{Grid, Site};

/// Per-site valuations of an evolved grid; `None` marks a value that is zero
/// up to truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationMap {
    width: usize,
    height: usize,
    vals: Vec<Option<i64>>,
    initial: Vec<bool>,
}

pub fn valuation_map<F: Field>(grid: &Grid<F>) -> ValuationMap {
    let (w, h) = (grid.width(), grid.height());
    let mut vals = Vec::with_capacity((w + 1) * (h + 1));
    let mut initial = Vec::with_capacity(vals.capacity());
    for n in 0..=h {
        for m in 0..=w {
            vals.push(grid.get(m, n).and_then(|v| v.valuation().ok()));
            initial.push(grid.is_initial(m, n));
        }
    }
    ValuationMap {
        width: w,
        height: h,
        vals,
        initial,
    }
}

impl ValuationMap {
    /// Map with no initial-site information (all sites treated as evolved).
    pub fn from_rows(width: usize, height: usize, vals: Vec<Option<i64>>) -> Self {
        assert_eq!(vals.len(), (width + 1) * (height + 1));
        ValuationMap {
            width,
            height,
            initial: vec![false; vals.len()],
            vals,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn index(&self, m: usize, n: usize) -> usize {
        n * (self.width + 1) + m
    }

    pub fn contains(&self, m: i64, n: i64) -> bool {
        m >= 0 && n >= 0 && m as usize <= self.width && n as usize <= self.height
    }

    pub fn get(&self, m: usize, n: usize) -> Option<i64> {
        self.vals[self.index(m, n)]
    }

    pub fn is_initial(&self, m: usize, n: usize) -> bool {
        self.initial[self.index(m, n)]
    }

    pub fn is_regular(&self, m: usize, n: usize) -> bool {
        self.get(m, n) == Some(0)
    }

    /// Sites whose valuation is nonzero or undefined.
    pub fn singular_sites(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for n in 0..=self.height {
            for m in 0..=self.width {
                if !self.is_regular(m, n) {
                    out.push((m, n));
                }
            }
        }
        out
    }

    pub fn undefined_sites(&self) -> Vec<Site> {
        self.singular_sites()
            .into_iter()
            .filter(|&(m, n)| self.get(m, n).is_none())
            .collect()
    }

    /// Tab-separated valuations, one line per row from `n = N` down to 0;
    /// undefined entries are written as `?`.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for n in (0..=self.height).rev() {
            let row: Vec<String> = (0..=self.width)
                .map(|m| match self.get(m, n) {
                    Some(v) => v.to_string(),
                    None => "?".into(),
                })
                .collect();
            let _ = writeln!(s, "{}", row.join("\t"));
        }
        s
    }
}
