//! Cells, regions, deficient squares and the chain of 3×3 central windows.
//!
//! Coordinates are row-down: row 0 is the top (north) edge, column 0 the west
//! edge. The NW–SE main diagonal of a square is therefore `{row == col}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A unit cell of the lattice. Serializes as `[row, col]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// The 4-neighbours that stay in the nonnegative quadrant.
    pub fn neighbours(self) -> impl Iterator<Item = Cell> {
        let Cell { row, col } = self;
        [
            row.checked_sub(1).map(|r| Cell::new(r, col)),
            Some(Cell::new(row + 1, col)),
            col.checked_sub(1).map(|c| Cell::new(row, c)),
            Some(Cell::new(row, col + 1)),
        ]
        .into_iter()
        .flatten()
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell::new(row, col)
    }
}

impl From<Cell> for (usize, usize) {
    fn from(c: Cell) -> Self {
        (c.row, c.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("side {0} is even; a deficient square needs an odd side")]
    EvenSide(usize),
    #[error("side {0} is too small; need at least 3")]
    SideTooSmall(usize),
    #[error("missing cell {cell} lies outside the {side}x{side} square")]
    MissingOutOfBounds { side: usize, cell: Cell },
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("more than one missing cell ('*') at line {line}, column {column}")]
    MultipleMissing { line: usize, column: usize },
    #[error("cell {cell} lies outside the {height}x{width} bounding box")]
    CellOutOfBounds {
        cell: Cell,
        width: usize,
        height: usize,
    },
}

/// A finite set of cells inside a `height × width` bounding box, with an
/// optional designated missing cell.
///
/// Membership is stored densely (one flag per bounding-box cell, row-major),
/// so irregular regions need no special handling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    width: usize,
    height: usize,
    present: Vec<bool>,
    missing: Option<Cell>,
}

impl Region {
    /// The full `height × width` rectangle.
    pub fn rectangle(height: usize, width: usize) -> Self {
        assert!(width >= 1 && height >= 1, "region must be at least 1x1");
        Self {
            width,
            height,
            present: vec![true; width * height],
            missing: None,
        }
    }

    /// Builds a region from an explicit cell list. The missing cell, when
    /// given, is removed from the cell set.
    pub fn from_cells(
        height: usize,
        width: usize,
        cells: impl IntoIterator<Item = Cell>,
        missing: Option<Cell>,
    ) -> Result<Self, GeometryError> {
        assert!(width >= 1 && height >= 1, "region must be at least 1x1");
        let mut present = vec![false; width * height];
        let check = |cell: Cell| {
            if cell.row < height && cell.col < width {
                Ok(())
            } else {
                Err(GeometryError::CellOutOfBounds {
                    cell,
                    width,
                    height,
                })
            }
        };
        for cell in cells {
            check(cell)?;
            present[cell.row * width + cell.col] = true;
        }
        if let Some(m) = missing {
            check(m)?;
            present[m.row * width + m.col] = false;
        }
        Ok(Self {
            width,
            height,
            present,
            missing,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn missing(&self) -> Option<Cell> {
        self.missing
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width && self.present[self.index(cell)]
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width
    }

    /// Row-major index of an in-bounds cell.
    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index / self.width, index % self.width)
    }

    /// Present cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| self.cell_at(i))
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Side length when this is a deficient odd square, i.e. a square box with
    /// a designated missing cell and every other cell present.
    pub fn deficient_square_side(&self) -> Option<usize> {
        let missing = self.missing?;
        if self.width != self.height || self.width % 2 == 0 {
            return None;
        }
        let full = self
            .present
            .iter()
            .enumerate()
            .all(|(i, &p)| p != (self.cell_at(i) == missing));
        full.then_some(self.width)
    }

    /// Serializes to the region text grammar: `#` present, `.` absent,
    /// `*` missing. Lines are rectangular and newline-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in 0..self.height {
            for col in 0..self.width {
                let cell = Cell::new(row, col);
                out.push(if Some(cell) == self.missing {
                    '*'
                } else if self.contains(cell) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the region text grammar.
    ///
    /// Rows may be ragged (short rows are padded with `.`), trailing blank
    /// lines are ignored, and at most one `*` is allowed.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut lines: Vec<&str> = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .collect();
        while lines.last().is_some_and(|l| l.trim().is_empty()) {
            lines.pop();
        }
        if lines.is_empty() {
            return Err(GeometryError::SyntaxError {
                line: 1,
                column: 1,
                message: "region is empty".into(),
            });
        }
        let height = lines.len();
        let width = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        if width == 0 {
            return Err(GeometryError::SyntaxError {
                line: 1,
                column: 1,
                message: "region has no columns".into(),
            });
        }
        let mut present = vec![false; width * height];
        let mut missing = None;
        for (row, line) in lines.iter().enumerate() {
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '#' => present[row * width + col] = true,
                    '.' => {}
                    '*' => {
                        if missing.is_some() {
                            return Err(GeometryError::MultipleMissing {
                                line: row + 1,
                                column: col + 1,
                            });
                        }
                        missing = Some(Cell::new(row, col));
                    }
                    other => {
                        return Err(GeometryError::SyntaxError {
                            line: row + 1,
                            column: col + 1,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
        }
        Ok(Self {
            width,
            height,
            present,
            missing,
        })
    }
}

/// Square of side `side` with every cell except `missing`.
pub fn make_deficient_square(side: usize, missing: Cell) -> Result<Region, GeometryError> {
    if side % 2 == 0 {
        return Err(GeometryError::EvenSide(side));
    }
    if side < 3 {
        return Err(GeometryError::SideTooSmall(side));
    }
    if missing.row >= side || missing.col >= side {
        return Err(GeometryError::MissingOutOfBounds {
            side,
            cell: missing,
        });
    }
    let mut region = Region::rectangle(side, side);
    let i = region.index(missing);
    region.present[i] = false;
    region.missing = Some(missing);
    Ok(region)
}

/// Deficient square with the missing cell at 1-indexed diagonal position `pos`.
pub fn deficient_square_at(side: usize, pos: usize) -> Result<Region, GeometryError> {
    let cell = Cell::new(pos.wrapping_sub(1), pos.wrapping_sub(1));
    make_deficient_square(side, cell)
}

pub fn parse_region(text: &str) -> Result<Region, GeometryError> {
    Region::parse(text)
}

pub fn serialize_region(region: &Region) -> String {
    region.to_text()
}

/// Residue class of a square side modulo 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareClass {
    /// side = 4m + 1
    FourMPlusOne {
        m: usize,
    },
    /// side = 4m + 3
    FourMPlusThree {
        m: usize,
    },
    NotOddSquare,
}

impl SquareClass {
    pub fn m(self) -> Option<usize> {
        match self {
            SquareClass::FourMPlusOne { m } | SquareClass::FourMPlusThree { m } => Some(m),
            SquareClass::NotOddSquare => None,
        }
    }

    /// Whether a missing cell at 1-indexed diagonal position `pos` has the
    /// parity that admits tilings: odd for 4m+1, even for 4m+3.
    pub fn admits_position(self, pos: usize) -> bool {
        match self {
            SquareClass::FourMPlusOne { .. } => pos % 2 == 1,
            SquareClass::FourMPlusThree { .. } => pos % 2 == 0,
            SquareClass::NotOddSquare => false,
        }
    }
}

pub fn classify_side(side: usize) -> SquareClass {
    match side % 4 {
        1 => SquareClass::FourMPlusOne { m: (side - 1) / 4 },
        3 => SquareClass::FourMPlusThree { m: (side - 3) / 4 },
        _ => SquareClass::NotOddSquare,
    }
}

/// Admissible missing-cell positions (1-indexed) on the diagonal of an odd square.
pub fn admissible_positions(side: usize) -> Vec<usize> {
    let class = classify_side(side);
    (1..=side).filter(|&p| class.admits_position(p)).collect()
}

/// 1-indexed position of `cell` on the NW–SE diagonal, or `None` off it.
pub fn diagonal_position(side: usize, cell: Cell) -> Option<usize> {
    (cell.row == cell.col && cell.row < side).then_some(cell.row + 1)
}

/// One 3×3 square of the central chain: cells `[2k, 2k+3)` on both axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CentralWindow {
    pub index: usize,
    pub origin: Cell,
}

impl CentralWindow {
    pub const SPAN: usize = 3;

    pub fn new(index: usize) -> Self {
        Self {
            index,
            origin: Cell::new(2 * index, 2 * index),
        }
    }

    pub fn contains(&self, cell: Cell) -> bool {
        (self.origin.row..self.origin.row + Self::SPAN).contains(&cell.row)
            && (self.origin.col..self.origin.col + Self::SPAN).contains(&cell.col)
    }

    pub fn center(&self) -> Cell {
        Cell::new(self.origin.row + 1, self.origin.col + 1)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        let o = self.origin;
        (0..Self::SPAN)
            .flat_map(move |dr| (0..Self::SPAN).map(move |dc| Cell::new(o.row + dr, o.col + dc)))
    }
}

/// The windows `k = 0..n` of a side `2n + 1` square.
pub fn central_windows(side: usize) -> Result<Vec<CentralWindow>, GeometryError> {
    if side % 2 == 0 {
        return Err(GeometryError::EvenSide(side));
    }
    if side < 3 {
        return Err(GeometryError::SideTooSmall(side));
    }
    Ok((0..(side - 1) / 2).map(CentralWindow::new).collect())
}

/// Whether `cell` lies in the union of the central windows of a side `side` square.
pub fn in_central_region(side: usize, cell: Cell) -> bool {
    let n = (side - 1) / 2;
    // Window k covers [2k, 2k+2]; a cell belongs to some window iff both
    // coordinates fall in a common [2k, 2k+2] with k < n.
    let lo = cell.row.max(cell.col).saturating_sub(2).div_ceil(2);
    let hi = cell.row.min(cell.col) / 2;
    lo <= hi && lo < n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deficient_square_constructor() {
        let r = make_deficient_square(5, Cell::new(0, 0)).unwrap();
        assert_eq!(r.len(), 24);
        assert_eq!(r.missing(), Some(Cell::new(0, 0)));
        assert_eq!(r.deficient_square_side(), Some(5));
        assert!(matches!(
            make_deficient_square(5, Cell::new(5, 0)),
            Err(GeometryError::MissingOutOfBounds { .. })
        ));
        assert_eq!(
            make_deficient_square(4, Cell::new(0, 0)),
            Err(GeometryError::EvenSide(4))
        );
        assert_eq!(
            make_deficient_square(1, Cell::new(0, 0)),
            Err(GeometryError::SideTooSmall(1))
        );
    }

    #[test]
    fn parse_examples() {
        let r = parse_region("##\n##").unwrap();
        assert_eq!((r.height(), r.width(), r.len()), (2, 2, 4));
        assert_eq!(r.missing(), None);

        let r = parse_region("*#\n##").unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.missing(), Some(Cell::new(0, 0)));

        assert!(matches!(
            parse_region("*#\n*#"),
            Err(GeometryError::MultipleMissing { line: 2, column: 1 })
        ));
        assert!(matches!(
            parse_region("#x"),
            Err(GeometryError::SyntaxError {
                line: 1,
                column: 2,
                ..
            })
        ));
        assert!(parse_region("\n\n").is_err());
    }

    #[test]
    fn ragged_rows_and_trailing_blanks() {
        let r = parse_region("###\n#\r\n\n\n").unwrap();
        assert_eq!((r.height(), r.width()), (2, 3));
        assert_eq!(r.to_text(), "###\n#..\n");
    }

    #[test]
    fn classify() {
        assert_eq!(classify_side(5), SquareClass::FourMPlusOne { m: 1 });
        assert_eq!(classify_side(11), SquareClass::FourMPlusThree { m: 2 });
        assert_eq!(classify_side(8), SquareClass::NotOddSquare);
        assert_eq!(classify_side(3), SquareClass::FourMPlusThree { m: 0 });
        assert_eq!(admissible_positions(11), vec![2, 4, 6, 8, 10]);
        assert_eq!(admissible_positions(9), vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn diagonal_positions() {
        assert_eq!(diagonal_position(11, Cell::new(3, 3)), Some(4));
        assert_eq!(diagonal_position(5, Cell::new(0, 0)), Some(1));
        assert_eq!(diagonal_position(5, Cell::new(1, 2)), None);
    }

    #[test]
    fn windows() {
        let w5: Vec<_> = central_windows(5)
            .unwrap()
            .iter()
            .map(|w| w.origin)
            .collect();
        assert_eq!(w5, vec![Cell::new(0, 0), Cell::new(2, 2)]);

        let w7 = central_windows(7).unwrap();
        assert_eq!(w7.len(), 3);
        for pair in w7.windows(2) {
            let shared: Vec<_> = pair[0].cells().filter(|&c| pair[1].contains(c)).collect();
            assert_eq!(shared, vec![pair[1].origin]);
        }

        let w11 = central_windows(11).unwrap();
        assert_eq!(w11.len(), 5);
        assert_eq!(w11[4].origin, Cell::new(8, 8));
        assert!(w11[4].contains(Cell::new(10, 10)));
        assert_eq!(central_windows(6), Err(GeometryError::EvenSide(6)));
    }

    #[test]
    fn central_region_matches_window_union() {
        for side in [3, 5, 7, 9, 11, 13] {
            let windows = central_windows(side).unwrap();
            for row in 0..side {
                for col in 0..side {
                    let cell = Cell::new(row, col);
                    let expected = windows.iter().any(|w| w.contains(cell));
                    assert_eq!(in_central_region(side, cell), expected, "{side} {cell}");
                }
                assert!(in_central_region(side, Cell::new(row, row)));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_region() -> impl Strategy<Value = Region> {
            (1usize..8, 1usize..8).prop_flat_map(|(h, w)| {
                (
                    proptest::collection::vec(any::<bool>(), h * w),
                    proptest::option::of((0..h, 0..w)),
                )
                    .prop_map(move |(bits, missing)| {
                        let cells = bits
                            .iter()
                            .enumerate()
                            .filter(|(_, &b)| b)
                            .map(|(i, _)| Cell::new(i / w, i % w));
                        Region::from_cells(h, w, cells, missing.map(Cell::from)).unwrap()
                    })
            })
        }

        proptest! {
            #[test]
            fn text_round_trip(region in arb_region()) {
                let parsed = parse_region(&serialize_region(&region)).unwrap();
                prop_assert_eq!(parsed, region);
            }

            #[test]
            fn diagonal_position_is_injective(side in 1usize..30) {
                let mut seen = std::collections::BTreeSet::new();
                for r in 0..side {
                    for c in 0..side {
                        if let Some(p) = diagonal_position(side, Cell::new(r, c)) {
                            prop_assert!(seen.insert(p));
                        }
                    }
                }
                prop_assert_eq!(seen.len(), side);
            }
        }
    }
}
