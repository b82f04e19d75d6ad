use std::fmt::Write as _;

use super::{classify_cells, CellClass, StripProfile, ValuationMap};
use crate::lattice::Site;

/// Glyph of one site. Valuations that have no glyph render as `#`.
pub fn glyph(class: CellClass) -> char {
    match class {
        CellClass::Regular => '.',
        CellClass::StripMember { .. } => '=',
        CellClass::Undetermined => '?',
        CellClass::ZeroOfWeight(w @ 1..=9) => char::from(b'0' + w as u8),
        CellClass::ZeroOfWeight(w @ 10..=35) => char::from(b'a' + (w - 10) as u8),
        CellClass::InfinityOfWeight(w @ 1..=26) => char::from(b'A' + (w - 1) as u8),
        _ => '#',
    }
}

/// Inverse of [`glyph`] at the valuation level: `Some(None)` is an undefined
/// site, `None` an unknown or overflow glyph.
pub fn unglyph(c: char) -> Option<Option<i64>> {
    Some(match c {
        '.' | '=' => Some(0),
        '?' => None,
        '1'..='9' => Some(c as i64 - '0' as i64),
        'a'..='z' => Some(c as i64 - 'a' as i64 + 10),
        'A'..='Z' => Some(-(c as i64 - 'A' as i64 + 1)),
        _ => return None,
    })
}

/// One text line per row, top row (`n = N`) first.
pub fn render_ascii(vmap: &ValuationMap, strips: &[StripProfile]) -> String {
    let classes = classify_cells(vmap, strips);
    let w = vmap.width() + 1;
    let mut s = String::with_capacity(classes.len() + vmap.height() + 1);
    for n in (0..=vmap.height()).rev() {
        s.extend(classes[n * w..(n + 1) * w].iter().map(|&c| glyph(c)));
        s.push('\n');
    }
    s
}

/// Rebuilds a valuation map from [`render_ascii`] output plus the valuations
/// of `#` sites.
pub fn parse_ascii(text: &str, overflow: &[(Site, i64)]) -> Result<ValuationMap, String> {
    let rows: Vec<&str> = text.lines().collect();
    if rows.is_empty() {
        return Err("empty rendering".into());
    }
    let width = rows[0].chars().count() - 1;
    let height = rows.len() - 1;
    let mut vals = vec![Some(0); (width + 1) * (height + 1)];
    for (i, line) in rows.iter().enumerate() {
        let n = height - i;
        if line.chars().count() != width + 1 {
            return Err(format!("row {n} has the wrong length"));
        }
        for (m, c) in line.chars().enumerate() {
            vals[n * (width + 1) + m] = match (c, unglyph(c)) {
                (_, Some(v)) => v,
                ('#', None) => overflow
                    .iter()
                    .find(|(site, _)| *site == (m, n))
                    .map(|&(_, v)| Some(v))
                    .ok_or_else(|| format!("no overflow valuation for site ({m}, {n})"))?,
                _ => return Err(format!("unknown glyph `{c}` at ({m}, {n})")),
            };
        }
    }
    Ok(ValuationMap::from_rows(width, height, vals))
}

/// Sites whose valuation has no glyph of its own.
pub fn overflow_sites(vmap: &ValuationMap) -> Vec<(Site, i64)> {
    vmap.singular_sites()
        .into_iter()
        .filter_map(|(m, n)| vmap.get(m, n).map(|v| ((m, n), v)))
        .filter(|&(_, v)| !(-26..=35).contains(&v))
        .collect()
}

/// Grid of coloured squares with the ASCII glyph on each singular site.
pub fn render_svg(vmap: &ValuationMap, strips: &[StripProfile], cell: u32) -> String {
    let classes = classify_cells(vmap, strips);
    let (w, h) = (vmap.width() + 1, vmap.height() + 1);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="monospace" font-size="{}">"#,
        w as u32 * cell,
        h as u32 * cell,
        cell * 3 / 4
    );
    for n in 0..h {
        for m in 0..w {
            let class = classes[n * w + m];
            let fill = match class {
                CellClass::Regular => "#ffffff",
                CellClass::StripMember { .. } => "#d9d9d9",
                CellClass::ZeroOfWeight(_) => "#9ecae1",
                CellClass::InfinityOfWeight(_) => "#fc9272",
                CellClass::Undetermined => "#000000",
            };
            let (x, y) = (m as u32 * cell, (h - 1 - n) as u32 * cell);
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="#eeeeee"/>"##
            );
            if !matches!(class, CellClass::Regular | CellClass::StripMember { .. }) {
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                    x + cell / 2,
                    y + cell * 3 / 4,
                    glyph(class)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
