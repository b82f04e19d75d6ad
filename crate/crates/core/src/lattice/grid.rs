use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{Field, LaurentSeries};

/// Which sites carry prescribed initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorderShape {
    /// Row `n = 0` plus column `m = 0`.
    #[default]
    LShape,
    /// Row 0, column 0 and every site with `m + n <= offset`. The upper
    /// staircase edge is the antidiagonal `m + n = offset`.
    Staircase { offset: usize },
}

impl BorderShape {
    pub fn is_initial(&self, m: usize, n: usize) -> bool {
        match *self {
            BorderShape::LShape => m == 0 || n == 0,
            BorderShape::Staircase { offset } => m == 0 || n == 0 || m + n <= offset,
        }
    }
}

/// Finite window `[0, M] x [0, N]` of lattice values.
#[derive(Clone, PartialEq)]
pub struct Grid<F> {
    width: usize,
    height: usize,
    shape: BorderShape,
    cells: Vec<Option<LaurentSeries<F>>>,
}

impl<F: Field> Grid<F> {
    /// Empty window of `(M + 1) x (N + 1)` sites.
    pub fn new(width: usize, height: usize, shape: BorderShape) -> Self {
        Grid {
            width,
            height,
            shape,
            cells: vec![None; (width + 1) * (height + 1)],
        }
    }

    /// `M`: the largest `m` index.
    pub fn width(&self) -> usize {
        self.width
    }

    /// `N`: the largest `n` index.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> BorderShape {
        self.shape
    }

    pub fn contains(&self, m: usize, n: usize) -> bool {
        m <= self.width && n <= self.height
    }

    pub fn is_initial(&self, m: usize, n: usize) -> bool {
        self.shape.is_initial(m, n)
    }

    fn index(&self, m: usize, n: usize) -> usize {
        assert!(self.contains(m, n), "site ({m}, {n}) outside the window");
        n * (self.width + 1) + m
    }

    pub fn get(&self, m: usize, n: usize) -> Option<&LaurentSeries<F>> {
        self.cells[self.index(m, n)].as_ref()
    }

    /// Value at a filled site; panics if the site has not been computed.
    pub fn value(&self, m: usize, n: usize) -> &LaurentSeries<F> {
        self.get(m, n)
            .unwrap_or_else(|| panic!("site ({m}, {n}) has no value"))
    }

    pub fn set(&mut self, m: usize, n: usize, value: LaurentSeries<F>) {
        let i = self.index(m, n);
        self.cells[i] = Some(value);
    }

    pub fn is_filled(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// `(m, n, value)` for every filled site, row by row from `n = 0`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &LaurentSeries<F>)> + '_ {
        let w = self.width + 1;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.as_ref().map(|v| (i % w, i / w, v)))
    }
}

impl<F: Field> fmt::Debug for Grid<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}
