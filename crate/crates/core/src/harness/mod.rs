//! Scenario orchestration: lattice runs cross-validated against the strip
//! rules, confinement and transparency probes, and the 1D smoke checks.

mod crosscheck;
mod probes;
mod scenario;

use thiserror::Error;

pub use crosscheck::{
    interference_shift, run_crosscheck, sweep_single_strip, Checkpoint, CrosscheckReport, Verdict,
};
pub use probes::{
    confinement_test, smoke_1d, transparency_test, ConfinementReport, ConfinementVerdict, Smoke1dReport,
    TransparencyReport,
};
pub use scenario::{single_strip_scenario, strips_and_diagonals, Arithmetic, Scenario, ShapeName};

use crate::classify::{
    detect_confined_clusters, detect_diagonals, detect_strips, detect_vertical_strips, valuation_map,
    Classification, ValuationMap,
};
use crate::exactnum::{Field, Mod61, Rational};
use crate::lattice::{simulate, Grid, LatticeError};
use crate::rules::RulesError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("malformed scenario at `{field}`: {message}")]
    Malformed { field: String, message: String },
    #[error("scenario cannot be cross-checked: {0}")]
    NotCrosscheckable(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Rules(#[from] RulesError),
}

impl HarnessError {
    /// Truncation ran out, as opposed to bad input.
    pub fn is_precision(&self) -> bool {
        matches!(self, HarnessError::Lattice(LatticeError::PrecisionExhausted { .. }))
    }
}

/// Valuations and structure of one evolved scenario.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub vmap: ValuationMap,
    pub classification: Classification,
    pub truncation_budget: i64,
}

/// Evolves the scenario (retrying once at `2K` when truncation runs out)
/// and classifies the result.
pub fn simulate_scenario(sc: &Scenario) -> Result<SimulationOutput, HarnessError> {
    sc.validate()?;
    let mut k = sc.truncation_budget();
    let mut retried = false;
    loop {
        let run = match sc.arithmetic {
            Arithmetic::Modular => simulate_and_classify::<Mod61>(sc, k),
            Arithmetic::Rational => simulate_and_classify::<Rational>(sc, k),
        };
        match run {
            Err(e) if e.is_precision() && !retried => {
                log::info!("truncation exhausted at K = {k}; retrying with K = {}", 2 * k);
                k *= 2;
                retried = true;
            }
            other => return other,
        }
    }
}

fn simulate_and_classify<F: Field>(sc: &Scenario, k: i64) -> Result<SimulationOutput, HarnessError> {
    let grid = run_grid::<F>(sc, sc.window(), sc.prng_seed, k)?;
    let classification = classify_grid(&grid, sc.margin);
    Ok(SimulationOutput {
        vmap: valuation_map(&grid),
        classification,
        truncation_budget: k,
    })
}

pub(crate) fn run_grid<F: Field>(
    sc: &Scenario,
    [m, n]: [usize; 2],
    prng_seed: u64,
    k: i64,
) -> Result<Grid<F>, HarnessError> {
    let mut sized = sc.clone();
    sized.window = Some([m, n]);
    Ok(simulate(&sc.seeds, sized.shape(), m, n, &sc.params(prng_seed, k))?)
}

/// Full classification; strips are measured in the west and east margins
/// (south and north margins for vertical strips), and measurement failures
/// are recorded as notes.
pub fn classify_grid<F: Field>(grid: &Grid<F>, margin: usize) -> Classification {
    let vmap = valuation_map(grid);
    let mut notes = Vec::new();
    let (w, h) = (grid.width(), grid.height());
    let mut strips = Vec::new();
    for range in margin_ranges(w, margin) {
        match detect_strips(grid, range) {
            Ok(s) => strips.extend(s),
            Err(e) => notes.push(format!("columns {}..={}: {e}", range.0, range.1)),
        }
    }
    let mut vertical_strips = Vec::new();
    for range in margin_ranges(h, margin) {
        match detect_vertical_strips(grid, range) {
            Ok(s) => vertical_strips.extend(s),
            Err(e) => notes.push(format!("rows {}..={}: {e}", range.0, range.1)),
        }
    }
    let diagonals = detect_diagonals(&vmap);
    let clusters = detect_confined_clusters(&vmap, &diagonals);
    let undefined = vmap.undefined_sites();
    if !undefined.is_empty() {
        log::warn!("{} sites are zero up to truncation", undefined.len());
    }
    Classification {
        strips,
        vertical_strips,
        diagonals,
        clusters,
        undefined,
        notes,
    }
}

fn margin_ranges(extent: usize, margin: usize) -> Vec<(usize, usize)> {
    let margin = margin.min(extent);
    if extent <= 2 * margin + 1 {
        vec![(0, extent)]
    } else {
        vec![(0, margin), (extent - margin, extent)]
    }
}
