use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::ValuationMap;
use crate::lattice::Site;

/// Diagonal of infinities (type 2) or alternating band (type 3) entering
/// the window from its initial data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalSpec {
    /// Initial site of the first (lowest `m - n`) line.
    pub anchor: Site,
    /// Weight of the infinities on the outer lines.
    pub weight: u32,
    pub alternating: bool,
    /// Number of parallel lines.
    pub band_width: u32,
    /// Sites of every line, continuation segments included.
    pub cells: Vec<Site>,
}

/// Alternating lines reaching the north or east window edge, listed by
/// increasing `m - n`. Each entry is the signed weight at the edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub lines: Vec<i64>,
}

impl Band {
    /// A zero line with infinity lines on both sides.
    pub fn is_flanked_zero_line(&self) -> bool {
        self.lines.windows(3).any(|w| w[0] < 0 && w[1] > 0 && w[2] < 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    /// `(m_lo, n_lo, m_hi, n_hi)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
    /// Horizontal and vertical extent in elementary-cell units.
    pub extent: (usize, usize),
    pub size: usize,
    /// Every neighbour is regular and the cluster stays off the north and east edges.
    pub confined: bool,
    pub touches_ne_edge: bool,
    /// Present when the cluster reaches the north or east edge along
    /// parallel diagonal lines.
    pub escaping_band: Option<Band>,
}

#[derive(Debug, Clone)]
struct Run {
    start: Site,
    len: usize,
    val: i64,
}

impl Run {
    fn line(&self) -> i64 {
        self.start.0 as i64 - self.start.1 as i64
    }

    fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len).map(move |i| (self.start.0 + i, self.start.1 + i))
    }

    fn end(&self) -> Site {
        (self.start.0 + self.len - 1, self.start.1 + self.len - 1)
    }
}

/// Maximal runs of one nonzero valuation along direction (+1, +1).
fn runs(vmap: &ValuationMap) -> Vec<Run> {
    let mut out = Vec::new();
    for n in 0..=vmap.height() {
        for m in 0..=vmap.width() {
            let Some(v) = vmap.get(m, n).filter(|&v| v != 0) else {
                continue;
            };
            if m > 0 && n > 0 && vmap.get(m - 1, n - 1) == Some(v) {
                continue;
            }
            let mut len = 1;
            while m + len <= vmap.width() && n + len <= vmap.height() && vmap.get(m + len, n + len) == Some(v) {
                len += 1;
            }
            out.push(Run { start: (m, n), len, val: v });
        }
    }
    out
}

fn neighbours(vmap: &ValuationMap, (m, n): Site) -> impl Iterator<Item = Site> + '_ {
    (-1i64..=1)
        .flat_map(|dm| (-1i64..=1).map(move |dn| (dm, dn)))
        .filter(|&d| d != (0, 0))
        .map(move |(dm, dn)| (m as i64 + dm, n as i64 + dn))
        .filter(|&(a, b)| vmap.contains(a, b))
        .map(|(a, b)| (a as usize, b as usize))
}

/// 8-connected component of singular, unclaimed sites around `start`.
fn component(vmap: &ValuationMap, start: Site, claimed: &HashSet<Site>) -> Vec<Site> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        out.push(s);
        for nb in neighbours(vmap, s) {
            if !vmap.is_regular(nb.0, nb.1) && !claimed.contains(&nb) && seen.insert(nb) {
                queue.push_back(nb);
            }
        }
    }
    out
}

/// Diagonals and alternating bands whose lines start on initial sites.
///
/// A line interrupted inside the window (by a strip crossing) is followed
/// through the 8-connected singular zone around its end: the longest run of
/// the same valuation starting in that zone continues it.
pub fn detect_diagonals(vmap: &ValuationMap) -> Vec<DiagonalSpec> {
    let all = runs(vmap);
    let mut by_line: BTreeMap<i64, &Run> = BTreeMap::new();
    for r in all.iter().filter(|r| vmap.is_initial(r.start.0, r.start.1)) {
        by_line.entry(r.line()).or_insert(r);
    }

    // Chains of consecutive lines with alternating signs.
    let mut groups: Vec<Vec<&Run>> = Vec::new();
    for (&d, &r) in &by_line {
        let extends = groups.last().and_then(|g| g.last()).is_some_and(|last| {
            last.line() + 1 == d && (last.val < 0) != (r.val < 0)
        });
        if extends {
            groups.last_mut().unwrap().push(r);
        } else {
            groups.push(vec![r]);
        }
    }

    let mut objects: Vec<Vec<&Run>> = Vec::new();
    for g in groups {
        let lo = g.iter().position(|r| r.val < 0);
        let hi = g.iter().rposition(|r| r.val < 0);
        let (Some(lo), Some(hi)) = (lo, hi) else { continue };
        if hi - lo + 1 >= 3 {
            objects.push(g[lo..=hi].to_vec());
        } else {
            objects.extend(g[lo..=hi].iter().filter(|r| r.val < 0).map(|&r| vec![r]));
        }
    }

    let mut claimed: HashSet<Site> = objects.iter().flatten().flat_map(|r| r.sites()).collect();
    let mut out = Vec::new();
    for lines in objects {
        let mut cells: Vec<Site> = lines.iter().flat_map(|r| r.sites()).collect();
        if lines.len() == 1 {
            let mut cur = lines[0].clone();
            while let Some(next) = continuation(vmap, &all, &cur, &claimed) {
                claimed.extend(next.sites());
                cells.extend(next.sites());
                cur = next;
            }
        }
        out.push(DiagonalSpec {
            anchor: lines[0].start,
            weight: (-lines[0].val) as u32,
            alternating: lines.len() > 1,
            band_width: lines.len() as u32,
            cells,
        });
    }
    out
}

fn continuation(vmap: &ValuationMap, all: &[Run], run: &Run, claimed: &HashSet<Site>) -> Option<Run> {
    let (m, n) = run.end();
    if m == vmap.width() || n == vmap.height() {
        return None;
    }
    let mut zone: HashSet<Site> = HashSet::new();
    for nb in neighbours(vmap, (m, n)) {
        if !vmap.is_regular(nb.0, nb.1) && !claimed.contains(&nb) {
            zone.extend(component(vmap, nb, claimed));
        }
    }
    all.iter()
        .filter(|r| r.val == run.val && r.start.0 + r.start.1 >= m + n && zone.contains(&r.start))
        .filter(|r| !claimed.contains(&r.start))
        .max_by_key(|r| (r.len, std::cmp::Reverse(r.start)))
        .cloned()
}

/// Connected singular zones left after removing `diagonals`.
pub fn detect_confined_clusters(vmap: &ValuationMap, diagonals: &[DiagonalSpec]) -> Vec<Cluster> {
    let mut claimed: HashSet<Site> = diagonals.iter().flat_map(|d| d.cells.iter().copied()).collect();
    let mut out = Vec::new();
    for site in vmap.singular_sites() {
        if claimed.contains(&site) {
            continue;
        }
        let cells = component(vmap, site, &claimed);
        claimed.extend(cells.iter().copied());
        out.push(describe(vmap, &cells));
    }
    out
}

fn describe(vmap: &ValuationMap, cells: &[Site]) -> Cluster {
    let m_lo = cells.iter().map(|c| c.0).min().unwrap();
    let m_hi = cells.iter().map(|c| c.0).max().unwrap();
    let n_lo = cells.iter().map(|c| c.1).min().unwrap();
    let n_hi = cells.iter().map(|c| c.1).max().unwrap();
    let members: HashSet<Site> = cells.iter().copied().collect();
    let ring_regular = cells
        .iter()
        .flat_map(|&c| neighbours(vmap, c))
        .filter(|nb| !members.contains(nb))
        .all(|nb| vmap.is_regular(nb.0, nb.1));
    let touches_ne_edge = m_hi == vmap.width() || n_hi == vmap.height();
    let escaping_band = touches_ne_edge.then(|| edge_band(vmap, &members)).flatten();
    Cluster {
        bbox: (m_lo, n_lo, m_hi, n_hi),
        extent: (m_hi - m_lo, n_hi - n_lo),
        size: cells.len(),
        confined: ring_regular && !touches_ne_edge,
        touches_ne_edge,
        escaping_band,
    }
}

/// Signed weights at the north/east edge of lines reaching it by a run of
/// at least three sites.
fn edge_band(vmap: &ValuationMap, members: &HashSet<Site>) -> Option<Band> {
    let mut lines: BTreeMap<i64, i64> = BTreeMap::new();
    for &(m, n) in members {
        if m != vmap.width() && n != vmap.height() {
            continue;
        }
        let Some(v) = vmap.get(m, n) else { continue };
        let run = (0..3).all(|i| m >= i && n >= i && vmap.get(m - i, n - i) == Some(v));
        if v != 0 && run {
            lines.insert(m as i64 - n as i64, v);
        }
    }
    if lines.is_empty() {
        return None;
    }
    // Keep the longest stretch of consecutive line indices.
    let mut best: Vec<i64> = Vec::new();
    let mut cur: Vec<i64> = Vec::new();
    let mut prev: Option<i64> = None;
    for (&d, &v) in &lines {
        if prev.is_some_and(|p| p + 1 != d) {
            cur.clear();
        }
        cur.push(v);
        prev = Some(d);
        if cur.len() > best.len() {
            best = cur.clone();
        }
    }
    Some(Band { lines: best })
}
