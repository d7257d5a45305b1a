//! The tile sets T4 (four ribbon L-tetrominoes) and T4+ (plus the 2×2 square),
//! and the rectangle macro-pieces used when filling with aligned blocks.
//!
//! Shapes are fixed: only translations are allowed. Offsets are `(drow, dcol)`
//! relative to the anchor, the NW-most corner of the shape's bounding box.
//! For every shape the anchor cell itself is covered and is the first covered
//! cell in row-major order, which the solver relies on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{Cell, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TileKind {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl TileKind {
    pub const ALL: [TileKind; 5] = [
        TileKind::T1,
        TileKind::T2,
        TileKind::T3,
        TileKind::T4,
        TileKind::T5,
    ];

    pub fn offsets(self) -> &'static [(usize, usize); 4] {
        match self {
            // vertical bar of three, foot to the east at the bottom
            TileKind::T1 => &[(0, 0), (1, 0), (2, 0), (2, 1)],
            TileKind::T2 => &[(0, 0), (0, 1), (1, 1), (2, 1)],
            TileKind::T3 => &[(0, 0), (1, 0), (1, 1), (1, 2)],
            TileKind::T4 => &[(0, 0), (0, 1), (0, 2), (1, 2)],
            TileKind::T5 => &[(0, 0), (0, 1), (1, 0), (1, 1)],
        }
    }

    /// Bounding box as `(height, width)`.
    pub fn bounding_box(self) -> (usize, usize) {
        match self {
            TileKind::T1 | TileKind::T2 => (3, 2),
            TileKind::T3 | TileKind::T4 => (2, 3),
            TileKind::T5 => (2, 2),
        }
    }

    pub fn is_ribbon(self) -> bool {
        self != TileKind::T5
    }

    pub fn name(self) -> &'static str {
        match self {
            TileKind::T1 => "T1",
            TileKind::T2 => "T2",
            TileKind::T3 => "T3",
            TileKind::T4 => "T4",
            TileKind::T5 => "T5",
        }
    }
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn is_ribbon(kind: TileKind) -> bool {
    kind.is_ribbon()
}

/// Cells covered by `kind` anchored at `anchor`.
pub fn tile_cells(kind: TileKind, anchor: Cell) -> [Cell; 4] {
    kind.offsets()
        .map(|(dr, dc)| Cell::new(anchor.row + dr, anchor.col + dc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TileSet {
    /// T1..T4
    RibbonT4,
    /// T1..T5
    RibbonT4Plus,
}

impl TileSet {
    pub fn kinds(self) -> &'static [TileKind] {
        match self {
            TileSet::RibbonT4 => &TileKind::ALL[..4],
            TileSet::RibbonT4Plus => &TileKind::ALL,
        }
    }

    pub fn contains(self, kind: TileKind) -> bool {
        self.kinds().contains(&kind)
    }

    pub fn name(self) -> &'static str {
        match self {
            TileSet::RibbonT4 => "t4",
            TileSet::RibbonT4Plus => "t4plus",
        }
    }
}

impl FromStr for TileSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t4" | "T4" => Ok(TileSet::RibbonT4),
            "t4plus" | "T4+" | "t4+" => Ok(TileSet::RibbonT4Plus),
            other => Err(format!(
                "unknown tile set {other:?} (expected t4 or t4plus)"
            )),
        }
    }
}

/// A tile kind anchored at a cell. Serializes as `{"kind":"T3","anchor":[r,c]}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub kind: TileKind,
    pub anchor: Cell,
}

impl Ord for Placement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.anchor, self.kind).cmp(&(other.anchor, other.kind))
    }
}

impl PartialOrd for Placement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Placement {
    pub fn new(kind: TileKind, anchor: Cell) -> Self {
        Self { anchor, kind }
    }

    pub fn cells(&self) -> [Cell; 4] {
        tile_cells(self.kind, self.anchor)
    }

    pub fn fits(&self, region: &Region) -> bool {
        self.cells().iter().all(|&c| region.contains(c))
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.anchor)
    }
}

/// Every placement of a tile from `set` lying inside `region`, ordered by
/// `(anchor.row, anchor.col, kind)`.
pub fn placements_in(region: &Region, set: TileSet) -> Vec<Placement> {
    let mut out = Vec::new();
    for row in 0..region.height() {
        for col in 0..region.width() {
            for &kind in set.kinds() {
                let p = Placement::new(kind, Cell::new(row, col));
                if p.fits(region) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Rectangle macro-pieces: a 2×4 or 4×2 box tiled by two L-tetrominoes, or a
/// 2×2 square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BlockShape {
    /// 2 rows × 4 columns
    Horizontal,
    /// 4 rows × 2 columns
    Vertical,
    Square,
}

impl BlockShape {
    /// `(height, width)`
    pub fn dims(self) -> (usize, usize) {
        match self {
            BlockShape::Horizontal => (2, 4),
            BlockShape::Vertical => (4, 2),
            BlockShape::Square => (2, 2),
        }
    }

    pub fn offsets(self) -> Vec<(usize, usize)> {
        let (h, w) = self.dims();
        (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).collect()
    }

    /// The tiles that make up the block. Each rectangle has exactly one
    /// tiling by T4, so this is well defined.
    pub fn tiles(self, origin: Cell) -> Vec<Placement> {
        let Cell { row, col } = origin;
        match self {
            BlockShape::Horizontal => vec![
                Placement::new(TileKind::T3, origin),
                Placement::new(TileKind::T4, Cell::new(row, col + 1)),
            ],
            BlockShape::Vertical => vec![
                Placement::new(TileKind::T2, origin),
                Placement::new(TileKind::T1, Cell::new(row + 1, col)),
            ],
            BlockShape::Square => vec![Placement::new(TileKind::T5, origin)],
        }
    }

    /// The macro-pieces available when the underlying tile set is `set`.
    pub fn for_set(set: TileSet) -> &'static [BlockShape] {
        match set {
            TileSet::RibbonT4 => &[BlockShape::Horizontal, BlockShape::Vertical],
            TileSet::RibbonT4Plus => &[
                BlockShape::Horizontal,
                BlockShape::Vertical,
                BlockShape::Square,
            ],
        }
    }
}

/// If `p` is one half of a two-tile rectangle, the rectangle's shape, origin
/// and the placement of the other half. Every L-tetromino belongs to exactly
/// one such candidate rectangle.
pub fn block_partner(p: Placement) -> Option<(BlockShape, Cell, Placement)> {
    let Cell { row, col } = p.anchor;
    match p.kind {
        TileKind::T3 => Some((
            BlockShape::Horizontal,
            p.anchor,
            Placement::new(TileKind::T4, Cell::new(row, col + 1)),
        )),
        TileKind::T4 => {
            let origin = Cell::new(row, col.checked_sub(1)?);
            Some((
                BlockShape::Horizontal,
                origin,
                Placement::new(TileKind::T3, origin),
            ))
        }
        TileKind::T2 => Some((
            BlockShape::Vertical,
            p.anchor,
            Placement::new(TileKind::T1, Cell::new(row + 1, col)),
        )),
        TileKind::T1 => {
            let origin = Cell::new(row.checked_sub(1)?, col);
            Some((
                BlockShape::Vertical,
                origin,
                Placement::new(TileKind::T2, origin),
            ))
        }
        TileKind::T5 => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn cellset(cells: &[(usize, usize)]) -> BTreeSet<Cell> {
        cells.iter().copied().map(Cell::from).collect()
    }

    #[test]
    fn tile_cell_examples() {
        assert_eq!(
            BTreeSet::from(tile_cells(TileKind::T3, Cell::new(0, 0))),
            cellset(&[(0, 0), (1, 0), (1, 1), (1, 2)])
        );
        assert_eq!(
            BTreeSet::from(tile_cells(TileKind::T5, Cell::new(2, 2))),
            cellset(&[(2, 2), (2, 3), (3, 2), (3, 3)])
        );
        assert_eq!(
            BTreeSet::from(tile_cells(TileKind::T1, Cell::new(5, 5))),
            cellset(&[(5, 5), (6, 5), (7, 5), (7, 6)])
        );
    }

    #[test]
    fn ribbon_flags() {
        assert!(is_ribbon(TileKind::T1));
        assert!(is_ribbon(TileKind::T4));
        assert!(!is_ribbon(TileKind::T5));
    }

    #[test]
    fn bounding_boxes_match_offsets() {
        for kind in TileKind::ALL {
            let h = kind.offsets().iter().map(|o| o.0).max().unwrap() + 1;
            let w = kind.offsets().iter().map(|o| o.1).max().unwrap() + 1;
            assert_eq!(kind.bounding_box(), (h, w));
            assert_eq!(kind.offsets()[0], (0, 0));
            assert_eq!(kind.offsets().iter().min(), Some(&(0, 0)));
        }
    }

    /// All 4-cell lattice paths with East/South steps and exactly one turn,
    /// normalized to their bounding-box corner, are exactly T1..T4.
    #[test]
    fn ribbon_shapes_are_the_one_turn_paths() {
        let mut paths = BTreeSet::new();
        for mask in 0u8..8 {
            let steps: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect(); // true = East
            let turns = steps.windows(2).filter(|w| w[0] != w[1]).count();
            if turns != 1 {
                continue;
            }
            let mut cells = vec![(0usize, 0usize)];
            for east in steps {
                let (r, c) = *cells.last().unwrap();
                cells.push(if east { (r, c + 1) } else { (r + 1, c) });
            }
            paths.insert(cells.into_iter().collect::<BTreeSet<_>>());
        }
        let shapes: BTreeSet<BTreeSet<(usize, usize)>> = TileSet::RibbonT4
            .kinds()
            .iter()
            .map(|k| k.offsets().iter().copied().collect())
            .collect();
        assert_eq!(paths, shapes);
    }

    #[test]
    fn placement_enumeration() {
        // T1/T2 are three rows tall and cannot fit; each of T3/T4 fits at
        // both anchors of the top row that leave room for three columns.
        let r24 = Region::rectangle(2, 4);
        assert_eq!(
            placements_in(&r24, TileSet::RibbonT4),
            vec![
                Placement::new(TileKind::T3, Cell::new(0, 0)),
                Placement::new(TileKind::T4, Cell::new(0, 0)),
                Placement::new(TileKind::T3, Cell::new(0, 1)),
                Placement::new(TileKind::T4, Cell::new(0, 1)),
            ]
        );
        assert_eq!(
            placements_in(&Region::rectangle(2, 2), TileSet::RibbonT4Plus),
            vec![Placement::new(TileKind::T5, Cell::new(0, 0))]
        );
        let t5 = placements_in(&Region::rectangle(5, 5), TileSet::RibbonT4Plus)
            .into_iter()
            .filter(|p| p.kind == TileKind::T5)
            .count();
        assert_eq!(t5, 16);
    }

    #[test]
    fn placement_order_is_row_col_kind() {
        let ps = placements_in(&Region::rectangle(6, 6), TileSet::RibbonT4Plus);
        let mut sorted = ps.clone();
        sorted.sort_by_key(|p| (p.anchor.row, p.anchor.col, p.kind));
        assert_eq!(ps, sorted);
    }

    #[test]
    fn blocks_are_exactly_covered_by_their_tiles() {
        let origin = Cell::new(3, 5);
        for shape in [
            BlockShape::Horizontal,
            BlockShape::Vertical,
            BlockShape::Square,
        ] {
            let mut covered: Vec<Cell> =
                shape.tiles(origin).iter().flat_map(|p| p.cells()).collect();
            covered.sort();
            let mut expected: Vec<Cell> = shape
                .offsets()
                .into_iter()
                .map(|(r, c)| Cell::new(origin.row + r, origin.col + c))
                .collect();
            expected.sort();
            assert_eq!(covered, expected, "{shape:?}");
        }
    }

    #[test]
    fn partners_are_symmetric() {
        for kind in TileSet::RibbonT4.kinds() {
            let p = Placement::new(*kind, Cell::new(4, 4));
            let (shape, origin, q) = block_partner(p).unwrap();
            let (shape2, origin2, back) = block_partner(q).unwrap();
            assert_eq!((shape, origin, p), (shape2, origin2, back));
            let mut pair = vec![p, q];
            pair.sort();
            let mut tiles = shape.tiles(origin);
            tiles.sort();
            assert_eq!(pair, tiles);
        }
        assert_eq!(
            block_partner(Placement::new(TileKind::T5, Cell::new(0, 0))),
            None
        );
    }

    #[test]
    fn json_shape() {
        let p = Placement::new(TileKind::T3, Cell::new(0, 0));
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"kind":"T3","anchor":[0,0]}"#
        );
    }
}
