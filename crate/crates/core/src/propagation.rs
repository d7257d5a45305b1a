//! Extending a tiling of a deficient `(2n+1)`-square to the `(2n+5)`-square
//! with the same missing cell. The old square stays in the NW corner; the new
//! band runs along the S and E edges.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Cell, CentralWindow, Region};
use crate::projection::Side;
use crate::solver::{first_block_filling, validate_tiling, SolverError, Tiling};
use crate::structure::{block_alignment, extract_crack, validate_crack, StructureError};
use crate::tiles::{BlockShape, Placement, TileKind, TileSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagationError {
    #[error("input tiling does not have a valid crack: {0}")]
    InputCrackInvalid(String),
    #[error("the band around the square could not be filled with aligned blocks")]
    BandFillFailed,
    #[error("propagated tiling failed validation: {0}")]
    OutputInvalid(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// The fixed part of an extension from side `old_side` to `old_side + 4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FramePlan {
    pub old_side: usize,
    pub new_side: usize,
    pub band_cells: BTreeSet<Cell>,
    pub crack_extension: [Placement; 2],
    /// sides of the aligned blocks covering the centers of `S_n` and `S_{n+1}`
    pub window_sides: [(usize, Side); 2],
}

pub fn frame_plan(old_side: usize) -> FramePlan {
    let n = (old_side - 1) / 2;
    let new_side = old_side + 4;
    let band_cells = (0..new_side)
        .flat_map(|r| (0..new_side).map(move |c| Cell::new(r, c)))
        .filter(|c| c.row >= old_side || c.col >= old_side)
        .collect();
    FramePlan {
        old_side,
        new_side,
        band_cells,
        crack_extension: [
            Placement::new(TileKind::T2, Cell::new(2 * n, 2 * n + 1)),
            Placement::new(TileKind::T3, Cell::new(2 * n + 3, 2 * n + 2)),
        ],
        window_sides: [(n, Side::Lower), (n + 1, Side::Upper)],
    }
}

pub fn propagate(
    region: &Region,
    tiling: &Tiling,
    set: TileSet,
) -> Result<(Region, Tiling), PropagationError> {
    let report = extract_crack(region, tiling)?;
    let verdict = validate_crack(&report, report.side, set);
    if !verdict.is_ok() {
        return Err(PropagationError::InputCrackInvalid(
            serde_json::to_string(&verdict).expect("verdict serializes"),
        ));
    }
    let plan = frame_plan(report.side);
    let missing = region.missing().expect("deficient square");
    let new_side = plan.new_side;

    let fixed: BTreeSet<Cell> = plan
        .crack_extension
        .iter()
        .flat_map(|p| p.cells())
        .collect();
    // the window centers must land in blocks on the planned sides
    let mut forced = Vec::new();
    for &(k, side) in &plan.window_sides {
        let center = CentralWindow::new(k).center();
        let origin = match side {
            Side::Lower => Cell::new(center.row, center.col - 1),
            Side::Upper => Cell::new(center.row - 1, center.col),
        };
        let cells: Vec<Cell> = BlockShape::Square
            .offsets()
            .into_iter()
            .map(|(dr, dc)| Cell::new(origin.row + dr, origin.col + dc))
            .collect();
        forced.push(cells);
    }
    let band = Region::from_cells(
        new_side,
        new_side,
        plan.band_cells
            .iter()
            .copied()
            .filter(|c| !fixed.contains(c)),
        None,
    )
    .expect("band lies in the new square");

    let shapes = [BlockShape::Horizontal, BlockShape::Vertical];
    let filling = first_block_filling(&band, &shapes, |shape, origin| {
        if block_alignment(new_side, origin).is_none() {
            return false;
        }
        // a block touching a forced 2×2 must contain all of it
        let (h, w) = shape.dims();
        let inside = |c: &Cell| {
            (origin.row..origin.row + h).contains(&c.row)
                && (origin.col..origin.col + w).contains(&c.col)
        };
        forced
            .iter()
            .all(|sq| sq.iter().all(inside) || !sq.iter().any(inside))
    })?
    .ok_or(PropagationError::BandFillFailed)?;

    let mut placements = tiling.placements.clone();
    placements.extend(plan.crack_extension);
    for (shape, origin) in filling {
        placements.extend(shape.tiles(origin));
    }
    let out = Tiling::new(placements);
    let new_region = crate::geometry::make_deficient_square(new_side, missing)
        .expect("same missing cell fits the larger square");

    validate_tiling(&new_region, &out)
        .map_err(|v| PropagationError::OutputInvalid(format!("{} cover violations", v.len())))?;
    let verdict = validate_crack(&extract_crack(&new_region, &out)?, new_side, set);
    if !verdict.is_ok() {
        return Err(PropagationError::OutputInvalid(
            serde_json::to_string(&verdict).expect("verdict serializes"),
        ));
    }
    Ok((new_region, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{admissible_positions, deficient_square_at};
    use crate::solver::enumerate_tilings;

    #[test]
    fn plan_geometry() {
        let plan = frame_plan(5);
        assert_eq!(plan.new_side, 9);
        assert_eq!(plan.band_cells.len(), 81 - 25);
        for p in plan.crack_extension {
            assert!(p
                .cells()
                .iter()
                .all(|&c| crate::geometry::in_central_region(9, c)));
            assert!(p.cells().iter().all(|c| plan.band_cells.contains(c)));
        }
    }

    #[test]
    fn five_to_nine_to_thirteen() {
        let r = deficient_square_at(5, 1).unwrap();
        for t in enumerate_tilings(&r, TileSet::RibbonT4, None).unwrap() {
            let (r9, t9) = propagate(&r, &t, TileSet::RibbonT4).unwrap();
            assert_eq!(r9.missing(), Some(Cell::new(0, 0)));
            assert!(t.placements.iter().all(|p| t9.placements.contains(p)));
            assert_eq!(extract_crack(&r9, &t9).unwrap().irregular_count, 4);
            let (r13, t13) = propagate(&r9, &t9, TileSet::RibbonT4).unwrap();
            assert_eq!(r13.deficient_square_side(), Some(13));
            assert!(t9.placements.iter().all(|p| t13.placements.contains(p)));
        }
    }

    #[test]
    fn crack_restricted_to_old_box_is_unchanged() {
        for pos in admissible_positions(7) {
            let r = deficient_square_at(7, pos).unwrap();
            for t in enumerate_tilings(&r, TileSet::RibbonT4, None).unwrap() {
                let old = extract_crack(&r, &t).unwrap().crack_cells;
                let (r11, t11) = propagate(&r, &t, TileSet::RibbonT4).unwrap();
                let new: Vec<Cell> = extract_crack(&r11, &t11)
                    .unwrap()
                    .crack_cells
                    .into_iter()
                    .filter(|c| c.row < 7 && c.col < 7)
                    .collect();
                assert_eq!(old, new);
            }
        }
    }

    #[test]
    fn four_plus_tilings_propagate() {
        let r = deficient_square_at(5, 3).unwrap();
        for t in enumerate_tilings(&r, TileSet::RibbonT4Plus, None).unwrap() {
            propagate(&r, &t, TileSet::RibbonT4Plus).unwrap();
        }
    }

    #[test]
    fn rejects_tilings_without_a_crack() {
        let r = deficient_square_at(5, 2).unwrap();
        let t = enumerate_tilings(&r, TileSet::RibbonT4Plus, Some(1))
            .unwrap()
            .next()
            .unwrap();
        assert!(matches!(
            propagate(&r, &t, TileSet::RibbonT4Plus),
            Err(PropagationError::InputCrackInvalid(_))
        ));
    }
}
