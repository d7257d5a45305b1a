//! The 1/2-homothety from tilings of deficient squares to domino (and
//! monomer) tilings, and its inverse lift.
//!
//! Even-aligned blocks sit below the diagonal with top-left cell `(2i+1, 2j)`
//! and odd-aligned blocks above it with top-left cell `(2i, 2j+1)`; both map
//! to image cell `(i, j)`. Dropping the crack and halving the two staircase
//! regions this way reassembles them into one square of side `(s-1)/2`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::BigCount;
use crate::geometry::{classify_side, Cell, Region, SquareClass};
use crate::solver::{enumerate_tilings, Tiling};
use crate::structure::{decompose, Alignment, StructureError};
use crate::tiles::{BlockShape, TileSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("aligned blocks do not tile the image square: {0}")]
    StructureViolation(String),
    #[error("image is inconsistent with the requested square: {0}")]
    InconsistentImage(String),
    #[error("the crack left by the lifted blocks has no tiling")]
    CrackNotCompletable,
    #[error("the crack left by the lifted blocks has {found} tilings, expected {expected}")]
    CrackCompletionNotUnique { found: usize, expected: usize },
}

/// Domino and monomer tiling of the image square, possibly missing one
/// diagonal cell. Lists are kept sorted; each domino is stored with its
/// smaller cell first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ImageTiling {
    pub size: usize,
    #[serde(rename = "missing")]
    pub missing_image: Option<Cell>,
    pub dominoes: Vec<(Cell, Cell)>,
    pub monomers: Vec<Cell>,
}

impl ImageTiling {
    pub fn new(
        size: usize,
        missing_image: Option<Cell>,
        dominoes: impl IntoIterator<Item = (Cell, Cell)>,
        monomers: impl IntoIterator<Item = Cell>,
    ) -> Self {
        let mut dominoes: Vec<(Cell, Cell)> = dominoes
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        dominoes.sort();
        let mut monomers: Vec<Cell> = monomers.into_iter().collect();
        monomers.sort();
        Self {
            size,
            missing_image,
            dominoes,
            monomers,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("image serializes")
    }

    /// Checks that the pieces are well formed and cover the box exactly.
    pub fn check_cover(&self) -> Result<(), String> {
        let n = self.size;
        let mut covered = vec![false; n * n];
        let mut mark = |c: Cell, what: &str| -> Result<(), String> {
            if c.row >= n || c.col >= n {
                return Err(format!("{what} cell {c} outside the {n}x{n} box"));
            }
            let slot = &mut covered[c.row * n + c.col];
            if *slot {
                return Err(format!("cell {c} covered twice"));
            }
            *slot = true;
            Ok(())
        };
        if let Some(m) = self.missing_image {
            mark(m, "missing")?;
        }
        for &(a, b) in &self.dominoes {
            if a.row.abs_diff(b.row) + a.col.abs_diff(b.col) != 1 {
                return Err(format!("domino {a}-{b} is not an adjacent pair"));
            }
            mark(a, "domino")?;
            mark(b, "domino")?;
        }
        for &c in &self.monomers {
            mark(c, "monomer")?;
        }
        match covered.iter().position(|&x| !x) {
            Some(i) => Err(format!("cell {} uncovered", Cell::new(i / n, i % n))),
            None => Ok(()),
        }
    }

    pub fn diagonal_monomers(&self) -> impl Iterator<Item = Cell> + '_ {
        self.monomers.iter().copied().filter(|c| c.row == c.col)
    }
}

/// Staircase a lifted piece lands in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

impl From<Alignment> for Side {
    fn from(a: Alignment) -> Self {
        match a {
            Alignment::Even => Side::Lower,
            Alignment::Odd => Side::Upper,
        }
    }
}

/// The data the image forgets: which of the two crack fillings a 4m+3
/// square uses, and on which side each diagonal 2×2 tile sits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftChoices {
    pub variant_bit: Option<u8>,
    #[serde(with = "cell_keyed")]
    pub monomer_sides: BTreeMap<Cell, Side>,
}

mod cell_keyed {
    use super::{Cell, Side};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(map: &BTreeMap<Cell, Side>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Cell, Side>, D::Error> {
        Ok(Vec::<(Cell, Side)>::deserialize(d)?.into_iter().collect())
    }
}

fn image_cell(origin: Cell, alignment: Alignment) -> Cell {
    match alignment {
        Alignment::Even => Cell::new((origin.row - 1) / 2, origin.col / 2),
        Alignment::Odd => Cell::new(origin.row / 2, (origin.col - 1) / 2),
    }
}

fn block_origin(image: Cell, side: Side) -> Cell {
    match side {
        Side::Lower => Cell::new(2 * image.row + 1, 2 * image.col),
        Side::Upper => Cell::new(2 * image.row, 2 * image.col + 1),
    }
}

/// Image cell left uncovered for a 4m+3 square with the missing cell at
/// diagonal position `pos`.
fn expected_missing_image(side: usize, pos: usize) -> Option<Cell> {
    match classify_side(side) {
        SquareClass::FourMPlusThree { .. } => Some(Cell::new((pos - 2) / 2, (pos - 2) / 2)),
        _ => None,
    }
}

fn missing_position(region: &Region) -> Result<(usize, usize), ProjectionError> {
    let side = region
        .deficient_square_side()
        .ok_or(StructureError::NotDeficientSquare)?;
    let m = region.missing().expect("deficient square");
    if m.row != m.col || !classify_side(side).admits_position(m.row + 1) {
        return Err(ProjectionError::StructureViolation(format!(
            "missing cell {m} is not at an admissible diagonal position"
        )));
    }
    Ok((side, m.row + 1))
}

pub fn project(region: &Region, tiling: &Tiling) -> Result<ImageTiling, ProjectionError> {
    let (side, pos) = missing_position(region)?;
    let d = decompose(region, tiling)?;
    let mut dominoes = Vec::new();
    let mut monomers = Vec::new();
    for (shape, origin, alignment) in d.blocks() {
        let a = image_cell(origin, alignment);
        match shape {
            BlockShape::Horizontal => dominoes.push((a, Cell::new(a.row, a.col + 1))),
            BlockShape::Vertical => dominoes.push((a, Cell::new(a.row + 1, a.col))),
            BlockShape::Square => monomers.push(a),
        }
    }
    let image = ImageTiling::new(
        (side - 1) / 2,
        expected_missing_image(side, pos),
        dominoes,
        monomers,
    );
    image
        .check_cover()
        .map_err(ProjectionError::StructureViolation)?;
    Ok(image)
}

/// Staircase of a domino under the pairing rule: off the diagonal by
/// position, on it by where the partner cell lies.
fn domino_side(a: Cell, b: Cell) -> Side {
    let (diag, other) = if a.row == a.col {
        (a, b)
    } else if b.row == b.col {
        (b, a)
    } else {
        return if a.row > a.col {
            Side::Lower
        } else {
            Side::Upper
        };
    };
    if other.row > diag.row || other.col < diag.col {
        Side::Lower
    } else {
        Side::Upper
    }
}

fn check_image(
    image: &ImageTiling,
    side: usize,
    pos: Option<usize>,
) -> Result<(), ProjectionError> {
    let bad = |msg: String| Err(ProjectionError::InconsistentImage(msg));
    if side < 3 || side % 2 == 0 {
        return bad(format!("side {side} is not an odd square side"));
    }
    if image.size != (side - 1) / 2 {
        return bad(format!(
            "image size {} does not match side {side}",
            image.size
        ));
    }
    let is_4m3 = matches!(classify_side(side), SquareClass::FourMPlusThree { .. });
    if let Some(pos) = pos {
        if !(1..=side).contains(&pos) || !classify_side(side).admits_position(pos) {
            return bad(format!("position {pos} is not admissible for side {side}"));
        }
        if image.missing_image != expected_missing_image(side, pos) {
            return bad("missing image cell does not match the position".into());
        }
    } else if image.missing_image.is_some() != is_4m3 {
        return bad("missing image cell present iff side is 4m+3".into());
    }
    image
        .check_cover()
        .map_err(ProjectionError::InconsistentImage)
}

pub fn lift(
    image: &ImageTiling,
    side: usize,
    missing_pos: usize,
    choices: &LiftChoices,
) -> Result<Tiling, ProjectionError> {
    check_image(image, side, Some(missing_pos))?;
    let is_4m3 = image.missing_image.is_some();
    if choices.variant_bit.is_some() != is_4m3 || choices.variant_bit.is_some_and(|b| b > 1) {
        return Err(ProjectionError::InconsistentImage(
            "variant bit must be 0 or 1 exactly when the side is 4m+3".into(),
        ));
    }
    let diag: BTreeSet<Cell> = image.diagonal_monomers().collect();
    if !choices
        .monomer_sides
        .keys()
        .copied()
        .eq(diag.iter().copied())
    {
        return Err(ProjectionError::InconsistentImage(
            "monomer sides must be given for exactly the diagonal monomers".into(),
        ));
    }

    let mut placements = Vec::new();
    for &(a, b) in &image.dominoes {
        let shape = if a.row == b.row {
            BlockShape::Horizontal
        } else {
            BlockShape::Vertical
        };
        placements.extend(shape.tiles(block_origin(a, domino_side(a, b))));
    }
    for &c in &image.monomers {
        let side = match c.row.cmp(&c.col) {
            std::cmp::Ordering::Greater => Side::Lower,
            std::cmp::Ordering::Less => Side::Upper,
            std::cmp::Ordering::Equal => choices.monomer_sides[&c],
        };
        placements.extend(BlockShape::Square.tiles(block_origin(c, side)));
    }

    let missing = Cell::new(missing_pos - 1, missing_pos - 1);
    let mut covered = vec![false; side * side];
    covered[missing.row * side + missing.col] = true;
    for p in &placements {
        for c in p.cells() {
            covered[c.row * side + c.col] = true;
        }
    }
    let crack_cells = (0..side * side)
        .filter(|&i| !covered[i])
        .map(|i| Cell::new(i / side, i % side));
    let crack =
        Region::from_cells(side, side, crack_cells, None).expect("cells come from the square");
    let mut fillings: Vec<Tiling> = enumerate_tilings(&crack, TileSet::RibbonT4, Some(3))
        .map_err(|_| ProjectionError::CrackNotCompletable)?
        .collect();
    fillings.sort();
    let expected = if is_4m3 { 2 } else { 1 };
    if fillings.is_empty() {
        return Err(ProjectionError::CrackNotCompletable);
    }
    if fillings.len() != expected {
        return Err(ProjectionError::CrackCompletionNotUnique {
            found: fillings.len(),
            expected,
        });
    }
    let chosen = &fillings[usize::from(choices.variant_bit.unwrap_or(0))];
    placements.extend(chosen.placements.iter().copied());
    Ok(Tiling::new(placements))
}

/// Reads back the choices that make `lift(project(t), ..)` return `t`.
pub fn lift_choices(region: &Region, tiling: &Tiling) -> Result<LiftChoices, ProjectionError> {
    let (side, pos) = missing_position(region)?;
    let d = decompose(region, tiling)?;
    let monomer_sides = d
        .square_blocks
        .iter()
        .map(|b| (image_cell(b.origin, b.alignment), Side::from(b.alignment)))
        .filter(|(c, _)| c.row == c.col)
        .collect();
    let mut choices = LiftChoices {
        variant_bit: None,
        monomer_sides,
    };
    if matches!(classify_side(side), SquareClass::FourMPlusThree { .. }) {
        let image = project(region, tiling)?;
        choices.variant_bit = Some(0);
        if lift(&image, side, pos, &choices)? != *tiling {
            choices.variant_bit = Some(1);
        }
    }
    Ok(choices)
}

/// Size of the fiber of `image` among tilings of the side-`side` square:
/// `2^k` for `k` diagonal monomers, doubled for sides 4m+3.
pub fn preimage_cardinality(image: &ImageTiling, side: usize) -> Result<BigCount, ProjectionError> {
    check_image(image, side, None)?;
    let k = image.diagonal_monomers().count() + usize::from(image.missing_image.is_some());
    Ok(BigCount::one() << k)
}

/// Diagonal cells covered by dominoes pairing down/left (lower) and
/// up/right (upper).
pub fn diagonal_balance(image: &ImageTiling) -> (usize, usize) {
    image
        .dominoes
        .iter()
        .filter(|(a, b)| a.row == a.col || b.row == b.col)
        .fold((0, 0), |(lo, up), &(a, b)| match domino_side(a, b) {
            Side::Lower => (lo + 1, up),
            Side::Upper => (lo, up + 1),
        })
}
