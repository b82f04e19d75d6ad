use serde::{Deserialize, Serialize};

use super::{run_grid, simulate_scenario, HarnessError, Scenario, ShapeName};
use crate::classify::{Band, Cluster};
use crate::exactnum::{LaurentSeries, Mod61, Rational};
use crate::lattice::{iterate_map_1d, Map1d, SeedSpec, SeedVariant, Site, StaircaseEdge};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConfinementVerdict {
    /// The cluster has bounding-box extent `e` in both directions and a regular ring.
    ConfinedWithExtent { extent: usize },
    /// The cluster reaches the north or east window edge.
    Unconfined { band: Option<Band> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfinementReport {
    pub lambda: Rational,
    pub zeros: u32,
    pub window: usize,
    pub seed_sites: Vec<Site>,
    pub seeds_used: Vec<u64>,
    /// Cluster holding the first seeded zero, from the first PRNG seed.
    pub cluster: Option<Cluster>,
    /// Singular objects found besides it (diagonals and other clusters).
    pub other_objects: usize,
    pub verdict: ConfinementVerdict,
}

/// `zeros` contiguous weight-1 zeros on the upper edge of a staircase
/// border at level `window / 2`, evolved under two PRNG seeds.
pub fn confinement_test(
    lambda: &Rational,
    zeros: u32,
    window: usize,
    prng_seed: u64,
) -> Result<ConfinementReport, HarnessError> {
    if zeros == 0 {
        return Err(HarnessError::Malformed {
            field: "num_zeros".into(),
            message: "at least one zero is needed".into(),
        });
    }
    let offset = window / 2;
    let m0 = (offset / 2).saturating_sub(zeros as usize / 2).max(1);
    if m0 + zeros as usize > offset {
        return Err(HarnessError::Malformed {
            field: "window".into(),
            message: format!("{zeros} zeros do not fit on a staircase of level {offset}"),
        });
    }
    let sites = StaircaseEdge::Upper.sites(offset, m0, zeros as usize);
    let mut sc = Scenario::new(sites.iter().map(|&s| SeedSpec::zero(1, s)).collect());
    sc.name = Some(format!("{zeros} zeros, lambda {lambda}"));
    sc.lambda = lambda.clone();
    sc.window = Some([window, window]);
    sc.border_shape = ShapeName::Staircase;
    sc.staircase_offset = Some(offset);

    let seeds_used = vec![prng_seed, prng_seed.wrapping_add(1)];
    let mut verdicts = Vec::new();
    let mut first_cluster = None;
    let mut other_objects = 0;
    for &seed in &seeds_used {
        sc.prng_seed = seed;
        let out = match simulate_scenario(&sc) {
            Ok(out) => out,
            Err(e) if e.is_precision() => {
                verdicts.push(ConfinementVerdict::Inconclusive { reason: e.to_string() });
                continue;
            }
            Err(e) => return Err(e),
        };
        let c = &out.classification;
        let (m, n) = sites[0];
        let cluster = c.clusters.iter().find(|cl| {
            let (a, b, x, y) = cl.bbox;
            a <= m && m <= x && b <= n && n <= y
        });
        let verdict = match cluster {
            None => ConfinementVerdict::Inconclusive {
                reason: "the seeded zeros belong to no cluster".into(),
            },
            Some(cl) if cl.confined && cl.extent.0 == cl.extent.1 => {
                ConfinementVerdict::ConfinedWithExtent { extent: cl.extent.0 }
            }
            Some(cl) if cl.touches_ne_edge => ConfinementVerdict::Unconfined {
                band: cl.escaping_band.clone(),
            },
            Some(cl) => ConfinementVerdict::Inconclusive {
                reason: format!("cluster with extents {:?} is neither confined nor escaping", cl.extent),
            },
        };
        if first_cluster.is_none() {
            first_cluster = cluster.cloned();
            other_objects = c.clusters.len() + c.diagonals.len() - usize::from(cluster.is_some());
        }
        verdicts.push(verdict);
    }
    let verdict = if verdicts.windows(2).all(|w| w[0] == w[1]) {
        verdicts.swap_remove(0)
    } else {
        ConfinementVerdict::Inconclusive {
            reason: format!("PRNG seeds disagree: {verdicts:?}"),
        }
    };
    Ok(ConfinementReport {
        lambda: lambda.clone(),
        zeros,
        window,
        seed_sites: sites,
        seeds_used,
        cluster: first_cluster,
        other_objects,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransparencyReport {
    pub strip_rows: (usize, usize),
    pub compared: usize,
    /// Sites off the strip rows whose leading terms differ between the two anchors.
    pub differing: Vec<Site>,
    pub pass: bool,
}

/// Evolves one strip of weight `p` twice, with column-0 anchors `a` and
/// `a2`, and compares leading terms everywhere off the strip's two rows.
pub fn transparency_test(
    p: u32,
    a: &Rational,
    a2: &Rational,
    lambda: &Rational,
    window: usize,
    prng_seed: u64,
) -> Result<TransparencyReport, HarnessError> {
    if a == a2 || a.is_zero() || a2.is_zero() {
        return Err(HarnessError::Malformed {
            field: "anchor".into(),
            message: "anchors must be distinct and nonzero".into(),
        });
    }
    let base = window / 3;
    let build = |anchor: &Rational| {
        let seed = SeedSpec::new(
            SeedVariant::Taishi {
                weights: vec![p],
                anchor: Some(anchor.clone()),
            },
            (0, base),
        );
        let mut sc = Scenario::new(vec![seed]);
        sc.lambda = lambda.clone();
        sc.window = Some([window, window]);
        sc.prng_seed = prng_seed;
        sc.truncation_budget = Some(4 * p as i64 + 16);
        sc
    };
    let (sa, sb) = (build(a), build(a2));
    let k = sa.truncation_budget();
    let ga = run_grid::<Mod61>(&sa, [window, window], prng_seed, k)?;
    let gb = run_grid::<Mod61>(&sb, [window, window], prng_seed, k)?;
    let mut compared = 0;
    let mut differing = Vec::new();
    for (m, n, x) in ga.iter() {
        if n == base || n == base + 1 {
            continue;
        }
        compared += 1;
        if x.leading_term() != gb.value(m, n).leading_term() {
            differing.push((m, n));
        }
    }
    Ok(TransparencyReport {
        strip_rows: (base, base + 1),
        compared,
        pass: differing.is_empty(),
        differing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoke1dReport {
    /// Valuations of `x[n+1] + x[n-1] = 1 + 1/x[n]` from a simple zero.
    pub eq2: Vec<Option<i64>>,
    /// Valuations of `x[n+1] + x[n-1] = 1 + 1/x[n]^2` from a simple zero.
    pub eq1: Vec<Option<i64>>,
    /// Valuations of the first map from a regular start.
    pub eq2_generic: Vec<Option<i64>>,
    pub eq2_confined: bool,
    pub eq1_persists: bool,
    pub generic_regular: bool,
    pub pass: bool,
}

/// Singularity patterns of the two one-dimensional maps with `a = 1`.
pub fn smoke_1d() -> Smoke1dReport {
    type S = LaurentSeries<Rational>;
    let k = 12;
    let one = Rational::from_integer(1);
    let prev = S::constant(Rational::from_integer(7), k);
    let zero = S::monomial(one.clone(), 1, k);
    let regular = S::constant(Rational::new(3, 5).expect("nonzero denominator"), k);
    let vals = |map, start: &S, steps| -> Vec<Option<i64>> {
        match iterate_map_1d(map, &one, &prev, start, steps) {
            Ok(orbit) => orbit.iter().map(|x| x.valuation().ok()).collect(),
            Err(_) => vec![None],
        }
    };
    let eq2 = vals(Map1d::Eq2, &zero, 10);
    let eq1 = vals(Map1d::Eq1, &zero, 20);
    let eq2_generic = vals(Map1d::Eq2, &regular, 10);

    let eq2_expect: Vec<Option<i64>> = [1, -1, 0, -1, 1].into_iter().chain([0; 6]).map(Some).collect();
    let eq1_expect: Vec<Option<i64>> = (0..=20).map(|i| Some([1, -2, 0, -2][i % 4])).collect();
    let eq2_confined = eq2 == eq2_expect;
    let eq1_persists = eq1 == eq1_expect;
    let generic_regular = eq2_generic.len() == 11 && eq2_generic.iter().all(|&v| v == Some(0));
    Smoke1dReport {
        pass: eq2_confined && eq1_persists && generic_regular,
        eq2,
        eq1,
        eq2_generic,
        eq2_confined,
        eq1_persists,
        generic_regular,
    }
}
