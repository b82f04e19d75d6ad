use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_grid, Arithmetic, HarnessError, Scenario};
use crate::classify::{combined_vector, detect_strips, ClassifyError, StripProfile};
use crate::exactnum::{Field, Mod61, Rational};
use crate::lattice::{LatticeError, SeedVariant};
use crate::rules::{
    closed_form_taishi, interact_diagonal, scenario_predict, single_strip_rule, PairOutcome, Taishi, WeightVector,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    Disagree { details: Vec<String> },
    Inconclusive { reason: String },
}

/// East profile after the first `after_diagonals` crossings, measured on a
/// run with the later diagonals left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub after_diagonals: usize,
    pub elementary_steps: u32,
    pub predicted: WeightVector,
    pub observed: Option<WeightVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub scenario: String,
    pub window: [usize; 2],
    pub truncation_budget: i64,
    pub seeds_used: Vec<u64>,
    /// Weights of the crossing diagonals in crossing order.
    pub diagonals: Vec<u32>,
    pub west_profile: Vec<StripProfile>,
    pub east_profile: Vec<StripProfile>,
    pub west: Option<WeightVector>,
    pub east: Option<WeightVector>,
    /// Symbolic dynamics: `interact_diagonal(west, q_total)`.
    pub predicted: Option<WeightVector>,
    /// Closed form, when the west profile is a single taishi.
    pub closed_form: Option<WeightVector>,
    /// Pair prediction, when the west profile is two isolated taishi and one diagonal crosses.
    pub pair: Option<PairOutcome>,
    pub checkpoints: Vec<Checkpoint>,
    pub verdict: Verdict,
}

impl CrosscheckReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Agree => 0,
            Verdict::Disagree { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }

    /// One line per field of interest.
    pub fn summary(&self) -> String {
        let show = |v: &Option<WeightVector>| v.as_ref().map_or("-".to_string(), |v| v.to_string());
        let verdict = match &self.verdict {
            Verdict::Agree => "AGREE".to_string(),
            Verdict::Disagree { details } => format!("DISAGREE ({})", details.join("; ")),
            Verdict::Inconclusive { reason } => format!("INCONCLUSIVE ({reason})"),
        };
        let mut s = format!(
            "scenario    {}\nwindow      {}x{}  K={}  seeds={:?}\ndiagonals   {:?}\nwest        {}\neast        {}\npredicted   {}\n",
            self.scenario,
            self.window[0],
            self.window[1],
            self.truncation_budget,
            self.seeds_used,
            self.diagonals,
            show(&self.west),
            show(&self.east),
            show(&self.predicted),
        );
        if self.closed_form.is_some() {
            s += &format!("closed form {}\n", show(&self.closed_form));
        }
        if let Some(p) = &self.pair {
            s += &format!("pair        {:?} {}\n", p.scenario, show(&p.combined));
        }
        for c in &self.checkpoints {
            s += &format!(
                "step {:<6} predicted {} observed {}\n",
                c.elementary_steps,
                c.predicted,
                show(&c.observed)
            );
        }
        s + &format!("verdict     {verdict}\n")
    }
}

enum Failure {
    /// Truncation ran out or a strip product vanished to known order.
    Precision(String),
    Inconsistent(String),
    Hard(HarnessError),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Lattice(LatticeError::PrecisionExhausted { .. }) => Failure::Precision(e.to_string()),
            e => Failure::Hard(e),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::InconsistentStrip { .. } => Failure::Inconsistent(e.to_string()),
            ClassifyError::UndeterminedProduct { .. } => Failure::Precision(e.to_string()),
        }
    }
}

struct Measured {
    west: Vec<StripProfile>,
    east: Vec<StripProfile>,
}

fn measure<F: Field>(sc: &Scenario, window: [usize; 2], seed: u64, k: i64) -> Result<Measured, Failure> {
    let grid = run_grid::<F>(sc, window, seed, k)?;
    let m = window[0];
    Ok(Measured {
        west: detect_strips(&grid, (0, sc.margin))?,
        east: detect_strips(&grid, (m - sc.margin, m))?,
    })
}

/// Diagonals seeded below every strip, in crossing order, as the indices of
/// their seeds and their weight. Infinity and Zero seeds on consecutive lines
/// with alternating kinds form one band; a band with infinity outer lines and
/// at least three lines acts as a single diagonal of the outer weight.
fn crossing_diagonals(sc: &Scenario) -> Vec<(Vec<usize>, u32)> {
    let lowest_strip = sc
        .seeds
        .iter()
        .filter(|s| matches!(s.variant, SeedVariant::Taishi { .. }))
        .map(|s| s.position.1)
        .min()
        .unwrap_or(0);
    // (line, seed index, signed weight: negative for infinities)
    let mut lines: Vec<(i64, usize, i64)> = sc
        .seeds
        .iter()
        .enumerate()
        .filter(|(_, s)| s.position.1 < lowest_strip)
        .filter_map(|(i, s)| {
            let d = s.position.0 as i64 - s.position.1 as i64;
            match s.variant {
                SeedVariant::Infinity { weight } => Some((d, i, -(weight as i64))),
                SeedVariant::Zero { weight } => Some((d, i, weight as i64)),
                _ => None,
            }
        })
        .collect();
    lines.sort();
    let mut chains: Vec<Vec<(i64, usize, i64)>> = Vec::new();
    for l in lines {
        let extends = chains
            .last()
            .and_then(|c| c.last())
            .is_some_and(|last| last.0 + 1 == l.0 && (last.2 < 0) != (l.2 < 0));
        if extends {
            chains.last_mut().unwrap().push(l);
        } else {
            chains.push(vec![l]);
        }
    }
    let mut out = Vec::new();
    for chain in chains {
        let (Some(lo), Some(hi)) = (chain.iter().position(|l| l.2 < 0), chain.iter().rposition(|l| l.2 < 0)) else {
            continue;
        };
        if hi - lo + 1 >= 3 {
            let seeds = chain[lo..=hi].iter().map(|l| l.1).collect();
            out.push((seeds, (-chain[lo].2) as u32));
        } else {
            out.extend(chain[lo..=hi].iter().filter(|l| l.2 < 0).map(|l| (vec![l.1], (-l.2) as u32)));
        }
    }
    out
}

/// Maximal runs of nonzero entries.
fn groups(v: &WeightVector) -> Vec<WeightVector> {
    let mut out = Vec::new();
    let mut cur: Option<WeightVector> = None;
    for (i, &w) in v.w.iter().enumerate() {
        match (w, cur.as_mut()) {
            (0, _) => out.extend(cur.take()),
            (w, Some(g)) => g.w.push(w),
            (w, None) => cur = Some(WeightVector::new(v.base_row + i as i64, vec![w])),
        }
    }
    out.extend(cur);
    out
}

fn as_taishi(v: &WeightVector) -> Option<Taishi> {
    let v = v.canonical();
    (v.w.len() <= 2 && v.w.first().is_some_and(|&n| n > 0)).then(|| Taishi {
        base_row: v.base_row,
        n: v.w[0],
        p: v.w.get(1).copied().unwrap_or(0),
    })
}

/// Closed form applied once per diagonal, as long as the profile stays a single taishi.
fn closed_form_chain(west: &WeightVector, qs: &[u32]) -> Option<WeightVector> {
    let mut cur = west.canonical();
    for &q in qs {
        let t = as_taishi(&cur)?;
        cur = closed_form_taishi(t.n, t.p, q).ok()?.placed(t.base_row);
    }
    Some(cur)
}

fn enlarge([m, n]: [usize; 2]) -> [usize; 2] {
    [m + m / 2 + 1, n + n / 2 + 1]
}

/// Evolves the scenario under two PRNG seeds and checks the east strip
/// profile against the symbolic dynamics, the closed forms that apply, and
/// `expected_east`. An agreement is re-checked at twice the truncation budget.
pub fn run_crosscheck(sc: &Scenario) -> Result<CrosscheckReport, HarnessError> {
    sc.validate()?;
    if !sc.lambda.is_one() {
        return Err(HarnessError::NotCrosscheckable("the strip rules hold for lambda = 1 only".into()));
    }
    if !sc.seeds.iter().any(|s| matches!(s.variant, SeedVariant::Taishi { .. })) {
        return Err(HarnessError::NotCrosscheckable("no strip seed".into()));
    }
    let crossing = crossing_diagonals(sc);
    if crossing.is_empty() {
        return Err(HarnessError::NotCrosscheckable("no Infinity seed crosses the strips".into()));
    }
    match sc.arithmetic {
        Arithmetic::Modular => crosscheck_in::<Mod61>(sc, &crossing),
        Arithmetic::Rational => crosscheck_in::<Rational>(sc, &crossing),
    }
}

fn crosscheck_in<F: Field>(sc: &Scenario, crossing: &[(Vec<usize>, u32)]) -> Result<CrosscheckReport, HarnessError> {
    let seeds = vec![sc.prng_seed, sc.prng_seed.wrapping_add(1)];
    let qs: Vec<u32> = crossing.iter().map(|c| c.1).collect();
    let q_total: u32 = qs.iter().sum();
    let mut report = CrosscheckReport {
        scenario: sc.label(),
        window: sc.window(),
        truncation_budget: sc.truncation_budget(),
        seeds_used: seeds.clone(),
        diagonals: qs.clone(),
        west_profile: Vec::new(),
        east_profile: Vec::new(),
        west: None,
        east: None,
        predicted: None,
        closed_form: None,
        pair: None,
        checkpoints: Vec::new(),
        verdict: Verdict::Agree,
    };

    let (mut precision_retry, mut enlarge_retry) = (false, false);
    let runs = loop {
        let attempt: Result<Vec<Measured>, Failure> = seeds
            .iter()
            .map(|&s| measure::<F>(sc, report.window, s, report.truncation_budget))
            .collect();
        match attempt {
            Ok(runs) => break runs,
            Err(Failure::Hard(e)) => return Err(e),
            Err(Failure::Precision(why)) if !precision_retry => {
                log::info!("{why}; retrying with doubled truncation budget");
                report.truncation_budget *= 2;
                precision_retry = true;
            }
            Err(Failure::Inconsistent(why)) if !enlarge_retry => {
                log::info!("{why}; retrying in a larger window");
                report.window = enlarge(report.window);
                enlarge_retry = true;
            }
            Err(Failure::Precision(why) | Failure::Inconsistent(why)) => {
                report.verdict = Verdict::Inconclusive { reason: why };
                return Ok(report);
            }
        }
    };

    let west = combined_vector(&runs[0].west);
    let east = combined_vector(&runs[0].east);
    report.west_profile = runs[0].west.clone();
    report.east_profile = runs[0].east.clone();
    report.west = Some(west.clone());
    report.east = Some(east.clone());
    if west.is_zero() {
        report.verdict = Verdict::Inconclusive {
            reason: "no strip found in the west columns".into(),
        };
        return Ok(report);
    }
    let predicted = interact_diagonal(&west, q_total).canonical();
    report.predicted = Some(predicted.clone());

    let mut details = Vec::new();
    for (run, seed) in runs.iter().zip(&seeds) {
        let (w, e) = (combined_vector(&run.west), combined_vector(&run.east));
        if w != west {
            details.push(format!("seed {seed}: west {w} differs from {west}"));
        }
        if e != predicted {
            details.push(format!("seed {seed}: east {e} but dynamics give {predicted}"));
        }
        if e.total() != w.total() {
            details.push(format!("seed {seed}: weight {} west, {} east", w.total(), e.total()));
        }
    }

    report.closed_form = closed_form_chain(&west, &qs);
    if let Some(cf) = &report.closed_form {
        if *cf != predicted {
            details.push(format!("closed form {cf} but dynamics give {predicted}"));
        }
    }
    if let ([q], [n]) = (qs.as_slice(), west.w.as_slice()) {
        let single = single_strip_rule(*n, *q).placed(west.base_row);
        if single != predicted {
            details.push(format!("single-strip rule {single} but dynamics give {predicted}"));
        }
    }
    if let ([q], [lower, upper]) = (qs.as_slice(), groups(&west).as_slice()) {
        if let (Some(lo), Some(up)) = (as_taishi(lower), as_taishi(upper)) {
            if let Ok(outcome) = scenario_predict(lo, up, *q) {
                if let Some(c) = outcome.combined.as_ref().filter(|c| **c != predicted) {
                    details.push(format!("{:?} prediction {c} but dynamics give {predicted}", outcome.scenario));
                }
                report.pair = Some(outcome);
            }
        }
    }
    if let Some(exp) = &sc.expected_east {
        if exp.canonical() != east {
            details.push(format!("expected east {} but observed {east}", exp.canonical()));
        }
    }

    let mut inconclusive = None;
    match measure::<F>(sc, report.window, seeds[0], 2 * report.truncation_budget) {
        Ok(m) => {
            let e = combined_vector(&m.east);
            if e != east {
                details.push(format!("east {e} at doubled truncation budget differs from {east}"));
            }
        }
        Err(Failure::Hard(e)) => return Err(e),
        Err(Failure::Precision(why) | Failure::Inconsistent(why)) => {
            inconclusive = Some(format!("doubled truncation budget: {why}"));
        }
    }

    let mut steps = 0;
    for j in 1..crossing.len() {
        steps += 2 * qs[j - 1];
        let mut sub = sc.clone();
        sub.window = Some(report.window);
        sub.truncation_budget = Some(report.truncation_budget);
        let dropped: Vec<usize> = crossing[j..].iter().flat_map(|c| c.0.iter().copied()).collect();
        sub.seeds = sc
            .seeds
            .iter()
            .enumerate()
            .filter(|(i, _)| !dropped.contains(i))
            .map(|(_, s)| s.clone())
            .collect();
        let predicted = interact_diagonal(&west, qs[..j].iter().sum()).canonical();
        let observed = match measure::<F>(&sub, report.window, seeds[0], report.truncation_budget) {
            Ok(m) => Some(combined_vector(&m.east)),
            Err(Failure::Hard(e)) => return Err(e),
            Err(_) => None,
        };
        if observed.as_ref().is_some_and(|o| *o != predicted) {
            details.push(format!(
                "after {j} diagonals observed {} but dynamics give {predicted}",
                observed.as_ref().unwrap()
            ));
        }
        report.checkpoints.push(Checkpoint {
            after_diagonals: j,
            elementary_steps: steps,
            predicted,
            observed,
        });
    }

    report.verdict = if !details.is_empty() {
        Verdict::Disagree { details }
    } else if let Some(reason) = inconclusive {
        Verdict::Inconclusive { reason }
    } else {
        Verdict::Agree
    };
    Ok(report)
}

/// Cross-checks every single strip of weight `p` in `1..=max_p` against every
/// diagonal weight `q` in `1..=max_q`, in parallel.
pub fn sweep_single_strip(max_p: u32, max_q: u32, prng_seed: u64) -> Vec<(u32, u32, Result<CrosscheckReport, HarnessError>)> {
    let cases: Vec<(u32, u32)> = (1..=max_p).flat_map(|p| (1..=max_q).map(move |q| (p, q))).collect();
    cases
        .into_par_iter()
        .map(|(p, q)| {
            let mut sc = super::single_strip_scenario(p, q);
            sc.prng_seed = prng_seed;
            (p, q, run_crosscheck(&sc))
        })
        .collect()
}

/// Extra upshift of the lower strip of `[lower, 0, upper]` hit by a diagonal
/// of weight `q`, relative to where the lower strip would land on its own.
pub fn interference_shift(lower: u32, upper: u32, q: u32, prng_seed: u64) -> Result<i64, HarnessError> {
    let mut sc = super::strips_and_diagonals(vec![lower, 0, upper], &[(q, (0, 0))]);
    sc.prng_seed = prng_seed;
    let report = run_crosscheck(&sc)?;
    if report.verdict != Verdict::Agree {
        return Err(HarnessError::NotCrosscheckable(format!("lattice run not clean: {:?}", report.verdict)));
    }
    let (west, east) = (report.west.unwrap(), report.east.unwrap());
    let lower_group = match groups(&east).into_iter().filter(|g| g.total() == lower as u64).collect::<Vec<_>>()[..] {
        [ref g] => g.clone(),
        _ => {
            return Err(HarnessError::NotCrosscheckable(format!(
                "cannot identify the lower strip in {east}"
            )))
        }
    };
    let solo = closed_form_taishi(lower, 0, q)?.placed(west.base_row);
    Ok(lower_group.base_row - solo.base_row)
}
