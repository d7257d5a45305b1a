use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use ribbon_core::geometry::{Cell, Region};
use ribbon_core::solver::Tiling;
use ribbon_core::structure::decompose;
use ribbon_core::tiles::Placement;

const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWYZabcdefghijklmnopqrstuvwxyz";

const CELL: usize = 20;
const REGULAR_FILL: &str = "#eeeeee";
const CRACK_FILL: &str = "#9a9a9a";
const MISSING_FILL: &str = "#222222";

fn owners(tiling: &Tiling) -> HashMap<Cell, usize> {
    tiling
        .placements
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.cells().into_iter().map(move |c| (c, i)))
        .collect()
}

/// One character per cell: a letter per tile, `X` for the missing cell, `.`
/// outside the region.
pub fn ascii(region: &Region, tiling: &Tiling) -> String {
    let owner = owners(tiling);
    let mut out = String::new();
    for r in 0..region.height() {
        for c in 0..region.width() {
            let cell = Cell::new(r, c);
            let ch = if region.missing() == Some(cell) {
                'X'
            } else if let Some(&i) = owner.get(&cell) {
                LETTERS[i % LETTERS.len()] as char
            } else {
                '.'
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

fn crack_tiles(region: &Region, tiling: &Tiling) -> BTreeSet<Placement> {
    if region.deficient_square_side().is_none() {
        return BTreeSet::new();
    }
    decompose(region, tiling)
        .map(|d| d.irregular.into_iter().collect())
        .unwrap_or_default()
}

/// SVG 1.1 drawing: regular tiles light, crack tiles mid-gray, the missing
/// cell dark, tile boundaries drawn heavier than cell grid lines.
pub fn svg(region: &Region, tiling: &Tiling) -> String {
    let owner = owners(tiling);
    let crack = crack_tiles(region, tiling);
    let (w, h) = (region.width() * CELL, region.height() * CELL);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="-1 -1 {} {}">"#,
        w + 2,
        h + 2,
        w + 2,
        h + 2
    );
    for r in 0..region.height() {
        for c in 0..region.width() {
            let cell = Cell::new(r, c);
            let fill = if region.missing() == Some(cell) {
                MISSING_FILL
            } else if let Some(&i) = owner.get(&cell) {
                if crack.contains(&tiling.placements[i]) {
                    CRACK_FILL
                } else {
                    REGULAR_FILL
                }
            } else {
                continue;
            };
            let _ = writeln!(
                s,
                r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#cccccc" stroke-width="0.5"/>"##,
                c * CELL,
                r * CELL
            );
        }
    }
    // heavy edges wherever the owner changes
    let key = |r: isize, c: isize| -> Option<Option<usize>> {
        if r < 0 || c < 0 {
            return None;
        }
        let cell = Cell::new(r as usize, c as usize);
        region.in_bounds(cell).then(|| owner.get(&cell).copied())
    };
    for r in 0..=region.height() as isize {
        for c in 0..=region.width() as isize {
            let here = key(r, c).flatten();
            let up = key(r - 1, c).flatten();
            let left = key(r, c - 1).flatten();
            if c < region.width() as isize && here != up {
                let (x, y) = (c as usize * CELL, r as usize * CELL);
                let _ = writeln!(
                    s,
                    r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="black" stroke-width="2"/>"#,
                    x + CELL
                );
            }
            if r < region.height() as isize && here != left {
                let (x, y) = (c as usize * CELL, r as usize * CELL);
                let _ = writeln!(
                    s,
                    r#"<line x1="{x}" y1="{y}" x2="{x}" y2="{}" stroke="black" stroke-width="2"/>"#,
                    y + CELL
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ribbon_core::geometry::make_deficient_square;
    use ribbon_core::solver::enumerate_tilings;
    use ribbon_core::tiles::TileSet;

    #[test]
    fn ascii_five_by_five() {
        let r = make_deficient_square(5, Cell::new(0, 0)).unwrap();
        let t = enumerate_tilings(&r, TileSet::RibbonT4, Some(1))
            .unwrap()
            .next()
            .unwrap();
        let text = ascii(&r, &t);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines.iter().all(|l| l.len() == 5));
        assert!(lines[0].starts_with('X'));
        let letters: BTreeSet<char> = text
            .chars()
            .filter(|c| c.is_alphabetic() && *c != 'X')
            .collect();
        assert_eq!(letters.len(), t.len());
    }

    #[test]
    fn svg_shades_crack_and_missing() {
        let r = make_deficient_square(5, Cell::new(0, 0)).unwrap();
        let t = enumerate_tilings(&r, TileSet::RibbonT4, Some(1))
            .unwrap()
            .next()
            .unwrap();
        let out = svg(&r, &t);
        assert!(out.contains("<svg"));
        assert_eq!(out.matches(MISSING_FILL).count(), 1);
        // two crack tiles of four cells each
        assert_eq!(out.matches(CRACK_FILL).count(), 8);
        assert_eq!(out.matches(REGULAR_FILL).count(), 16);
    }
}
