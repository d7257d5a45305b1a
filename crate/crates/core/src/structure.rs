//! Rectangular pattern, crack extraction and crack census.
//!
//! A block (a 2×4 or 4×2 box tiled by two L-tetrominoes, or a 2×2 tile) is
//! *aligned* when the lattice coordinates of its four corners are all even or
//! all odd, measured from the SW corner of the region's bounding box with the
//! y axis pointing north. In a square of odd side the even-aligned blocks are
//! the ones anchored at the SW corner (the lower staircase, below the
//! diagonal) and the odd-aligned ones are anchored at the NE corner (the upper
//! staircase). In row-down cell coordinates an even block has an odd top row
//! and an even left column, and an odd block the reverse.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{self, central_windows, classify_side, Cell, Region, SquareClass};
use crate::solver::{enumerate_tilings, validate_tiling, SolverError, Tiling, Violation};
use crate::tiles::{block_partner, BlockShape, Placement, TileKind, TileSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("tiling is not an exact cover of the region ({} violations)", .0.len())]
    InvalidTiling(Vec<Violation>),
    #[error("region is not a deficient square of odd side")]
    NotDeficientSquare,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Alignment {
    /// all corners even; the lower (SW) staircase of a square
    Even,
    /// all corners odd; the upper (NE) staircase of a square
    Odd,
}

/// Alignment of a block whose top-left cell is `origin` inside a region of
/// height `region_height`. Block heights are even, so only the parity of the
/// top edge matters.
pub fn block_alignment(region_height: usize, origin: Cell) -> Option<Alignment> {
    let x_even = origin.col % 2 == 0;
    let y_even = (region_height + origin.row) % 2 == 0;
    match (x_even, y_even) {
        (true, true) => Some(Alignment::Even),
        (false, false) => Some(Alignment::Odd),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    #[serde(rename = "H")]
    Horizontal,
    #[serde(rename = "V")]
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectBlock {
    pub origin: Cell,
    pub orientation: Orientation,
    pub alignment: Alignment,
    pub tiles: [Placement; 2],
}

impl RectBlock {
    pub fn shape(&self) -> BlockShape {
        match self.orientation {
            Orientation::Horizontal => BlockShape::Horizontal,
            Orientation::Vertical => BlockShape::Vertical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareBlock {
    pub origin: Cell,
    pub alignment: Alignment,
    pub tile: Placement,
}

/// Split of a tiling into aligned rectangles, aligned 2×2 tiles and the
/// remaining irregular tiles. Every placement lands in exactly one list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub rect_blocks: Vec<RectBlock>,
    pub square_blocks: Vec<SquareBlock>,
    pub irregular: Vec<Placement>,
}

impl Decomposition {
    /// Every aligned block as `(shape, origin, alignment)`.
    pub fn blocks(&self) -> impl Iterator<Item = (BlockShape, Cell, Alignment)> + '_ {
        self.rect_blocks
            .iter()
            .map(|b| (b.shape(), b.origin, b.alignment))
            .chain(
                self.square_blocks
                    .iter()
                    .map(|b| (BlockShape::Square, b.origin, b.alignment)),
            )
    }
}

/// Pairs L-tetrominoes into aligned rectangles and collects aligned 2×2 tiles.
///
/// Each L-tetromino has exactly one candidate partner (the other half of the
/// unique two-tile rectangle containing it), so the pairing is forced and the
/// leftover set is unique.
pub fn decompose(region: &Region, tiling: &Tiling) -> Result<Decomposition, StructureError> {
    validate_tiling(region, tiling).map_err(StructureError::InvalidTiling)?;
    let present: BTreeSet<Placement> = tiling.placements.iter().copied().collect();
    let height = region.height();
    let mut out = Decomposition::default();
    for &p in &tiling.placements {
        match p.kind {
            TileKind::T5 => match block_alignment(height, p.anchor) {
                Some(alignment) => out.square_blocks.push(SquareBlock {
                    origin: p.anchor,
                    alignment,
                    tile: p,
                }),
                None => out.irregular.push(p),
            },
            _ => {
                let paired = block_partner(p).and_then(|(shape, origin, partner)| {
                    let alignment = block_alignment(height, origin)?;
                    present
                        .contains(&partner)
                        .then_some((shape, origin, partner, alignment))
                });
                match paired {
                    // record each rectangle once, from its first tile
                    Some((shape, origin, partner, alignment)) => {
                        if p < partner {
                            out.rect_blocks.push(RectBlock {
                                origin,
                                orientation: if shape == BlockShape::Horizontal {
                                    Orientation::Horizontal
                                } else {
                                    Orientation::Vertical
                                },
                                alignment,
                                tiles: [p, partner],
                            });
                        }
                    }
                    None => out.irregular.push(p),
                }
            }
        }
    }
    out.rect_blocks.sort_by_key(|b| b.origin);
    Ok(out)
}

/// Which 2×2 corner of a central window is covered by an aligned block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WindowSide {
    /// the SW 2×2 of the window, an even-aligned block (lower staircase)
    Lower,
    /// the NE 2×2 of the window, an odd-aligned block (upper staircase)
    Upper,
    /// the window's center is the missing cell
    MissingCenter,
    /// none of the above; never happens in a tiling with the crack structure
    Vacant,
}

impl From<Alignment> for WindowSide {
    fn from(a: Alignment) -> Self {
        match a {
            Alignment::Even => WindowSide::Lower,
            Alignment::Odd => WindowSide::Upper,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrackReport {
    pub side: usize,
    /// cells of the irregular tiles together with the missing cell, sorted
    pub crack_cells: Vec<Cell>,
    pub irregular_count: usize,
    /// 4-connected components of the rest of the square, each sorted,
    /// ordered by first cell
    pub components: Vec<Vec<Cell>>,
    pub window_occupancy: Vec<WindowSide>,
}

/// Decomposes `tiling` and reports the crack of a deficient odd square.
pub fn extract_crack(region: &Region, tiling: &Tiling) -> Result<CrackReport, StructureError> {
    let d = decompose(region, tiling)?;
    crack_from_decomposition(region, &d)
}

pub fn crack_from_decomposition(
    region: &Region,
    d: &Decomposition,
) -> Result<CrackReport, StructureError> {
    let side = region
        .deficient_square_side()
        .ok_or(StructureError::NotDeficientSquare)?;
    let missing = region
        .missing()
        .expect("deficient square has a missing cell");
    let mut crack: BTreeSet<Cell> = d.irregular.iter().flat_map(|p| p.cells()).collect();
    crack.insert(missing);

    let mut seen = crack.clone();
    let mut components = Vec::new();
    for start in region.cells() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for nb in c.neighbours() {
                if region.contains(nb) && seen.insert(nb) {
                    comp.push(nb);
                    queue.push_back(nb);
                }
            }
        }
        comp.sort();
        components.push(comp);
    }

    // aligned block covering each window center
    let mut center_side: BTreeMap<Cell, Alignment> = BTreeMap::new();
    for (shape, origin, alignment) in d.blocks() {
        for (dr, dc) in shape.offsets() {
            let c = Cell::new(origin.row + dr, origin.col + dc);
            if c.row == c.col && c.row % 2 == 1 {
                center_side.insert(c, alignment);
            }
        }
    }
    let window_occupancy = central_windows(side)
        .map_err(|_| StructureError::NotDeficientSquare)?
        .iter()
        .map(|w| {
            let center = w.center();
            if center == missing {
                WindowSide::MissingCenter
            } else {
                center_side
                    .get(&center)
                    .map_or(WindowSide::Vacant, |&a| a.into())
            }
        })
        .collect();

    Ok(CrackReport {
        side,
        crack_cells: crack.into_iter().collect(),
        irregular_count: d.irregular.len(),
        components,
        window_occupancy,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrackVerdict {
    /// crack lies inside the union of the central 3×3 windows
    pub location_ok: bool,
    /// both the NW and SE corner cells belong to the crack
    pub endpoints_ok: bool,
    /// `n` irregular tiles for side 4m+1, `n+1` for side 4m+3
    pub count_ok: bool,
    pub two_components_ok: bool,
    /// measured always; part of `is_ok` only for T4
    pub equal_area_ok: bool,
    pub equal_area_asserted: bool,
    pub irregular_count: usize,
    pub expected_irregular: usize,
    pub component_sizes: Vec<usize>,
    pub cells_outside_windows: Vec<Cell>,
}

impl CrackVerdict {
    pub fn is_ok(&self) -> bool {
        self.location_ok
            && self.endpoints_ok
            && self.count_ok
            && self.two_components_ok
            && (self.equal_area_ok || !self.equal_area_asserted)
    }
}

pub fn validate_crack(report: &CrackReport, side: usize, set: TileSet) -> CrackVerdict {
    let n = (side - 1) / 2;
    let expected_irregular = match classify_side(side) {
        SquareClass::FourMPlusThree { .. } => n + 1,
        _ => n,
    };
    let cells_outside_windows: Vec<Cell> = report
        .crack_cells
        .iter()
        .copied()
        .filter(|&c| !geometry::in_central_region(side, c))
        .collect();
    let crack: BTreeSet<Cell> = report.crack_cells.iter().copied().collect();
    let component_sizes: Vec<usize> = report.components.iter().map(Vec::len).collect();
    CrackVerdict {
        location_ok: cells_outside_windows.is_empty(),
        endpoints_ok: crack.contains(&Cell::new(0, 0))
            && crack.contains(&Cell::new(side - 1, side - 1)),
        count_ok: report.irregular_count == expected_irregular,
        two_components_ok: component_sizes.len() == 2,
        equal_area_ok: component_sizes.len() == 2 && component_sizes[0] == component_sizes[1],
        equal_area_asserted: set == TileSet::RibbonT4,
        irregular_count: report.irregular_count,
        expected_irregular,
        component_sizes,
        cells_outside_windows,
    }
}

/// Cracks of all tilings of a deficient square, grouped by cell set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub distinct_cracks: usize,
    pub weighted_cracks: usize,
    pub cracks: Vec<CrackEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrackEntry {
    pub cells: Vec<Cell>,
    pub tilings: u64,
    /// distinct irregular-tile fillings realizing this cell set
    #[serde(skip)]
    pub fillings: usize,
}

pub fn crack_census(region: &Region, set: TileSet) -> Result<CensusReport, StructureError> {
    if region.deficient_square_side().is_none() {
        return Err(StructureError::NotDeficientSquare);
    }
    let mut groups: BTreeMap<Vec<Cell>, (BTreeSet<Vec<Placement>>, u64)> = BTreeMap::new();
    for tiling in enumerate_tilings(region, set, None)? {
        let d = decompose(region, &tiling)?;
        let report = crack_from_decomposition(region, &d)?;
        let mut filling = d.irregular.clone();
        filling.sort();
        let entry = groups.entry(report.crack_cells).or_default();
        entry.0.insert(filling);
        entry.1 += 1;
    }
    let cracks: Vec<CrackEntry> = groups
        .into_iter()
        .map(|(cells, (fillings, tilings))| CrackEntry {
            cells,
            tilings,
            fillings: fillings.len(),
        })
        .collect();
    Ok(CensusReport {
        distinct_cracks: cracks.len(),
        weighted_cracks: cracks.iter().map(|c| c.fillings).sum(),
        cracks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{admissible_positions, deficient_square_at, make_deficient_square};

    fn tilings(side: usize, pos: usize, set: TileSet) -> (Region, Vec<Tiling>) {
        let r = deficient_square_at(side, pos).unwrap();
        let ts = enumerate_tilings(&r, set, None).unwrap().collect();
        (r, ts)
    }

    #[test]
    fn alignment_in_odd_squares() {
        assert_eq!(block_alignment(5, Cell::new(1, 0)), Some(Alignment::Even));
        assert_eq!(block_alignment(5, Cell::new(0, 1)), Some(Alignment::Odd));
        assert_eq!(block_alignment(5, Cell::new(0, 0)), None);
        assert_eq!(block_alignment(5, Cell::new(1, 1)), None);
        // a 2-row region: the top-left block sits on even coordinates
        assert_eq!(block_alignment(2, Cell::new(0, 0)), Some(Alignment::Even));
    }

    #[test]
    fn full_rectangle_is_one_block() {
        let r = Region::rectangle(2, 4);
        let t = Tiling::new(BlockShape::Horizontal.tiles(Cell::new(0, 0)));
        let d = decompose(&r, &t).unwrap();
        assert_eq!(d.rect_blocks.len(), 1);
        assert_eq!(d.rect_blocks[0].origin, Cell::new(0, 0));
        assert_eq!(d.rect_blocks[0].orientation, Orientation::Horizontal);
        assert_eq!(d.rect_blocks[0].alignment, Alignment::Even);
        assert!(d.irregular.is_empty());
    }

    #[test]
    fn misaligned_square_tile_is_irregular() {
        // 2×2 tile whose corners mix parities inside a 5×5 square
        let p = Placement::new(TileKind::T5, Cell::new(2, 2));
        let r = Region::from_cells(5, 5, p.cells(), None).unwrap();
        let d = decompose(&r, &Tiling::new(vec![p])).unwrap();
        assert_eq!(d.irregular, vec![p]);
        assert!(d.square_blocks.is_empty());
    }

    #[test]
    fn invalid_tilings_are_rejected() {
        let r = Region::rectangle(2, 4);
        let t = Tiling::new(vec![Placement::new(TileKind::T3, Cell::new(0, 0))]);
        assert!(matches!(
            decompose(&r, &t),
            Err(StructureError::InvalidTiling(_))
        ));
        assert_eq!(
            extract_crack(
                &r,
                &Tiling::new(BlockShape::Horizontal.tiles(Cell::new(0, 0)))
            ),
            Err(StructureError::NotDeficientSquare)
        );
    }

    #[test]
    fn five_by_five() {
        let (r, ts) = tilings(5, 1, TileSet::RibbonT4);
        assert_eq!(ts.len(), 2);
        for t in &ts {
            let d = decompose(&r, t).unwrap();
            assert_eq!(d.rect_blocks.len(), 2);
            assert_eq!(d.irregular.len(), 2);
            let report = extract_crack(&r, t).unwrap();
            assert_eq!(report.crack_cells.len(), 9);
            assert_eq!(
                report.components.iter().map(Vec::len).collect::<Vec<_>>(),
                [8, 8]
            );
            let v = validate_crack(&report, 5, TileSet::RibbonT4);
            assert!(v.is_ok(), "{v:?}");
        }
    }

    #[test]
    fn seven_by_seven_center() {
        let (r, ts) = tilings(7, 4, TileSet::RibbonT4);
        assert_eq!(ts.len(), 4);
        for t in &ts {
            let report = extract_crack(&r, t).unwrap();
            assert_eq!(report.irregular_count, 4);
            assert_eq!(report.window_occupancy[1], WindowSide::MissingCenter);
            assert!(validate_crack(&report, 7, TileSet::RibbonT4).is_ok());
        }
    }

    #[test]
    fn nine_by_nine_counts() {
        for pos in admissible_positions(9) {
            let (r, ts) = tilings(9, pos, TileSet::RibbonT4);
            for t in &ts {
                let v = validate_crack(&extract_crack(&r, t).unwrap(), 9, TileSet::RibbonT4);
                assert!(v.is_ok());
                assert_eq!(v.irregular_count, 4);
            }
        }
    }

    #[test]
    fn synthetic_crack_outside_windows() {
        let report = CrackReport {
            side: 5,
            crack_cells: vec![Cell::new(0, 0), Cell::new(0, 4), Cell::new(4, 4)],
            irregular_count: 2,
            components: vec![vec![], vec![]],
            window_occupancy: vec![],
        };
        let v = validate_crack(&report, 5, TileSet::RibbonT4);
        assert!(!v.location_ok);
        assert_eq!(v.cells_outside_windows, vec![Cell::new(0, 4)]);
    }

    #[test]
    fn window_balance() {
        for side in [5usize, 7, 9] {
            let m = classify_side(side).m().unwrap();
            for pos in admissible_positions(side) {
                let (r, ts) = tilings(side, pos, TileSet::RibbonT4);
                for t in &ts {
                    let occ = extract_crack(&r, t).unwrap().window_occupancy;
                    let count = |s| occ.iter().filter(|&&w| w == s).count();
                    assert_eq!(count(WindowSide::Lower), m);
                    assert_eq!(count(WindowSide::Upper), m);
                    assert_eq!(count(WindowSide::MissingCenter), side % 4 / 3);
                    assert_eq!(count(WindowSide::Vacant), 0);
                }
            }
        }
    }

    #[test]
    fn census_examples() {
        let r = deficient_square_at(9, 3).unwrap();
        assert_eq!(
            crack_census(&r, TileSet::RibbonT4).unwrap().weighted_cracks,
            6
        );

        let r = deficient_square_at(7, 2).unwrap();
        let c = crack_census(&r, TileSet::RibbonT4).unwrap();
        assert_eq!((c.distinct_cracks, c.weighted_cracks), (2, 4));

        let r = make_deficient_square(5, Cell::new(0, 0)).unwrap();
        let c = crack_census(&r, TileSet::RibbonT4Plus).unwrap();
        assert_eq!(c.weighted_cracks, 4);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json
            .starts_with(r#"{"distinct_cracks":4,"weighted_cracks":4,"cracks":[{"cells":[[0,0],"#));
    }

    #[test]
    fn crack_fillings_are_unique_for_4m_plus_1() {
        for pos in admissible_positions(9) {
            let c = crack_census(&deficient_square_at(9, pos).unwrap(), TileSet::RibbonT4).unwrap();
            assert!(c.cracks.iter().all(|e| e.fillings == 1));
        }
    }
}
