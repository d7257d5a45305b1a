//! Counting, enumeration and validation of tilings of arbitrary regions.
//!
//! Enumeration order is a public contract: the search always branches on the
//! first uncovered cell in row-major order and tries the tiles anchored there
//! in `T1..T5` order. Counting visits the same search tree but merges
//! identical frontier states, so it never materializes placements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::{BigCount, Count};
use crate::geometry::{Cell, Region};
use crate::search::{self, Engine, EngineError, Shape};
use crate::tiles::{BlockShape, Placement, TileKind, TileSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("region is too wide for the search frontier (needs {reach} cells, limit {limit}); both dimensions exceed the supported width")]
    RegionTooWide { reach: usize, limit: usize },
    #[error("count overflowed the chosen counter type")]
    Overflow,
}

impl From<EngineError> for SolverError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::FrontierTooWide { reach } => SolverError::RegionTooWide {
                reach,
                limit: search::MAX_REACH,
            },
            EngineError::Overflow => SolverError::Overflow,
        }
    }
}

/// An exact cover of a region, placements in canonical `(anchor, kind)` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tiling {
    pub placements: Vec<Placement>,
}

impl Tiling {
    pub fn new(mut placements: Vec<Placement>) -> Self {
        placements.sort();
        Self { placements }
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("tiling serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let t: Tiling = serde_json::from_str(text)?;
        Ok(Tiling::new(t.placements))
    }
}

fn tile_shapes(set: TileSet) -> Vec<Shape> {
    set.kinds()
        .iter()
        .map(|k| Shape {
            offsets: k.offsets().to_vec(),
        })
        .collect()
}

fn transpose(region: &Region) -> Region {
    let cells = region.cells().map(|c| Cell::new(c.col, c.row));
    let missing = region.missing().map(|c| Cell::new(c.col, c.row));
    Region::from_cells(region.width(), region.height(), cells, missing)
        .expect("transposed cells stay in the transposed box")
}

/// Exact number of tilings of `region` by `set`. The empty region has one.
pub fn count_tilings(region: &Region, set: TileSet) -> Result<BigCount, SolverError> {
    count_tilings_with(region, set, 1)
}

/// As [`count_tilings`], with a choice of counter type and worker threads.
/// The result does not depend on `threads`.
pub fn count_tilings_with<C: Count>(
    region: &Region,
    set: TileSet,
    threads: usize,
) -> Result<C, SolverError> {
    let shapes = tile_shapes(set);
    // Both tile sets are closed under transposition (T1<->T4, T2<->T3), so a
    // region that is too wide can be counted on its transpose.
    let engine = if search::reach_for(region.width(), &shapes) > search::MAX_REACH
        && search::reach_for(region.height(), &shapes) <= search::MAX_REACH
    {
        Engine::new(&transpose(region), &shapes, |_, _| true)?
    } else {
        Engine::new(region, &shapes, |_, _| true)?
    };
    Ok(engine.count(threads.max(1))?)
}

/// Lazily enumerated tilings in canonical search order.
pub struct Tilings {
    stream: std::iter::Take<search::Solutions>,
    kinds: &'static [TileKind],
    width: usize,
}

impl Iterator for Tilings {
    type Item = Tiling;

    fn next(&mut self) -> Option<Tiling> {
        let sol = self.stream.next()?;
        Some(Tiling::new(
            sol.into_iter()
                .map(|(si, i)| {
                    Placement::new(self.kinds[si], Cell::new(i / self.width, i % self.width))
                })
                .collect(),
        ))
    }
}

/// Every tiling of `region` by `set`, each exactly once, truncated at `limit`.
pub fn enumerate_tilings(
    region: &Region,
    set: TileSet,
    limit: Option<usize>,
) -> Result<Tilings, SolverError> {
    let engine = Engine::new(region, &tile_shapes(set), |_, _| true)?;
    Ok(Tilings {
        stream: engine.into_solutions().take(limit.unwrap_or(usize::MAX)),
        kinds: set.kinds(),
        width: region.width(),
    })
}

/// First filling of `region` by the block shapes in `shapes` (tried in the
/// given order), restricted to origins accepted by `allowed`.
pub(crate) fn first_block_filling(
    region: &Region,
    shapes: &[BlockShape],
    allowed: impl Fn(BlockShape, Cell) -> bool,
) -> Result<Option<Vec<(BlockShape, Cell)>>, SolverError> {
    let compiled: Vec<Shape> = shapes
        .iter()
        .map(|s| Shape {
            offsets: s.offsets(),
        })
        .collect();
    let engine = Engine::new(region, &compiled, |si, i| {
        allowed(shapes[si], region.cell_at(i))
    })?;
    let first = engine.into_solutions().next();
    Ok(first.map(|sol| {
        sol.into_iter()
            .map(|(si, i)| (shapes[si], region.cell_at(i)))
            .collect()
    }))
}

/// A defect that keeps a placement list from being an exact cover.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Violation {
    OverlapAt(Cell),
    UncoveredCell(Cell),
    OutsideRegion(Placement),
}

/// `Ok` iff `tiling` is an exact cover of `region`; otherwise every defect,
/// outside placements first, then overlaps and uncovered cells in row-major
/// order.
pub fn validate_tiling(region: &Region, tiling: &Tiling) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut cover: BTreeMap<Cell, usize> = BTreeMap::new();
    for p in &tiling.placements {
        if !p.fits(region) {
            violations.push(Violation::OutsideRegion(*p));
        }
        for c in p.cells() {
            *cover.entry(c).or_default() += 1;
        }
    }
    violations.extend(
        cover
            .iter()
            .filter(|(_, &n)| n > 1)
            .map(|(&c, _)| Violation::OverlapAt(c)),
    );
    violations.extend(
        region
            .cells()
            .filter(|c| !cover.contains_key(c))
            .map(Violation::UncoveredCell),
    );
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Whether every placement uses a kind from `set`.
pub fn uses_only(tiling: &Tiling, set: TileSet) -> bool {
    tiling.placements.iter().all(|p| set.contains(p.kind))
}

/// Deficient-square counts keyed by `(side, diagonal position, tile set)`,
/// computed on first request.
#[derive(Clone, Debug, Default)]
pub struct CountLedger {
    entries: BTreeMap<(usize, usize, TileSet), BigCount>,
    threads: usize,
}

impl CountLedger {
    pub fn new(threads: usize) -> Self {
        Self {
            entries: BTreeMap::new(),
            threads,
        }
    }

    pub fn count(
        &mut self,
        side: usize,
        pos: usize,
        set: TileSet,
    ) -> Result<BigCount, LedgerError> {
        if let Some(v) = self.entries.get(&(side, pos, set)) {
            return Ok(v.clone());
        }
        let region = crate::geometry::deficient_square_at(side, pos)?;
        let v: BigCount = count_tilings_with(&region, set, self.threads.max(1))?;
        self.entries.insert((side, pos, set), v.clone());
        Ok(v)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, TileSet), &BigCount)> {
        self.entries.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
