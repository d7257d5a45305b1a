//! The exact-cover solver and the dimer counters against small naive
//! enumerators written from scratch here.

use std::collections::BTreeSet;

use proptest::prelude::*;
use ribbon_core::dimers::{count_dimer_deficient, count_dimer_tilings, diagonal_profile};
use ribbon_core::geometry::{Cell, Region};
use ribbon_core::solver::{count_tilings, enumerate_tilings};
use ribbon_core::tiles::TileSet;
use ribbon_core::verify::brute_force_matchings;

type Shape = &'static [(i32, i32)];

// the four ribbon L-tetrominoes and the square, as (row, col) offsets
const RIBBON: [Shape; 4] = [
    &[(0, 0), (1, 0), (2, 0), (2, 1)],
    &[(0, 0), (0, 1), (1, 1), (2, 1)],
    &[(0, 0), (1, 0), (1, 1), (1, 2)],
    &[(0, 0), (0, 1), (0, 2), (1, 2)],
];
const SQUARE: Shape = &[(0, 0), (0, 1), (1, 0), (1, 1)];

fn shapes(set: TileSet) -> Vec<Shape> {
    let mut v = RIBBON.to_vec();
    if set == TileSet::RibbonT4Plus {
        v.push(SQUARE);
    }
    v
}

type Partition = BTreeSet<BTreeSet<(usize, usize)>>;

/// Every tiling of `free` (row-major grid of `h`×`w`), as a set of cell sets.
fn naive(
    h: usize,
    w: usize,
    free: &mut Vec<bool>,
    shapes: &[Shape],
    acc: &mut Vec<Vec<BTreeSet<(usize, usize)>>>,
    cur: &mut Vec<BTreeSet<(usize, usize)>>,
) {
    let Some(first) = free.iter().position(|&f| f) else {
        acc.push(cur.clone());
        return;
    };
    let (r0, c0) = ((first / w) as i32, (first % w) as i32);
    for shape in shapes {
        // the first free cell must be the shape's first cell in row-major order
        let lead = shape.iter().min().unwrap();
        let cells: Option<Vec<usize>> = shape
            .iter()
            .map(|&(dr, dc)| {
                let (r, c) = (r0 + dr - lead.0, c0 + dc - lead.1);
                (r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w)
                    .then(|| r as usize * w + c as usize)
                    .filter(|&i| free[i])
            })
            .collect();
        let Some(cells) = cells else { continue };
        for &i in &cells {
            free[i] = false;
        }
        cur.push(cells.iter().map(|&i| (i / w, i % w)).collect());
        naive(h, w, free, shapes, acc, cur);
        cur.pop();
        for &i in &cells {
            free[i] = true;
        }
    }
}

fn naive_partitions(h: usize, w: usize, mask: &[bool], set: TileSet) -> BTreeSet<Partition> {
    let mut acc = Vec::new();
    naive(
        h,
        w,
        &mut mask.to_vec(),
        &shapes(set),
        &mut acc,
        &mut Vec::new(),
    );
    acc.into_iter().map(|t| t.into_iter().collect()).collect()
}

fn solver_partitions(region: &Region, set: TileSet) -> BTreeSet<Partition> {
    enumerate_tilings(region, set, None)
        .unwrap()
        .map(|t| {
            t.placements
                .iter()
                .map(|p| p.cells().iter().map(|c| (c.row, c.col)).collect())
                .collect()
        })
        .collect()
}

fn region_of(h: usize, w: usize, mask: &[bool]) -> Region {
    let cells = (0..h * w)
        .filter(|&i| mask[i])
        .map(|i| Cell::new(i / w, i % w));
    Region::from_cells(h, w, cells, None).unwrap()
}

fn check(h: usize, w: usize, mask: &[bool], set: TileSet) -> Result<(), TestCaseError> {
    let region = region_of(h, w, mask);
    let expected = naive_partitions(h, w, mask, set);
    let got = solver_partitions(&region, set);
    prop_assert_eq!(got.len(), expected.len());
    prop_assert_eq!(&got, &expected);
    prop_assert_eq!(
        count_tilings(&region, set).unwrap(),
        (expected.len() as u64).into()
    );
    Ok(())
}

fn masks() -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (2usize..=6, 2usize..=6).prop_flat_map(|(h, w)| {
        // mostly filled, so tilings exist often enough
        let cell = prop::bool::weighted(0.85);
        (Just(h), Just(w), prop::collection::vec(cell, h * w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_naive_t4((h, w, mask) in masks()) {
        prop_assume!(mask.iter().filter(|&&b| b).count() <= 28);
        check(h, w, &mask, TileSet::RibbonT4)?;
    }

    #[test]
    fn solver_matches_naive_t4plus((h, w, mask) in masks()) {
        prop_assume!(mask.iter().filter(|&&b| b).count() <= 28);
        check(h, w, &mask, TileSet::RibbonT4Plus)?;
    }

    #[test]
    fn rectangles_with_one_hole(h in 3usize..=5, w in 3usize..=5, hole in 0usize..25) {
        let mut mask = vec![true; h * w];
        mask[hole % (h * w)] = false;
        check(h, w, &mask, TileSet::RibbonT4)?;
        check(h, w, &mask, TileSet::RibbonT4Plus)?;
    }
}

#[test]
fn deficient_five_by_five_everywhere() {
    for hole in 0..25 {
        let mut mask = vec![true; 25];
        mask[hole] = false;
        let n4 = naive_partitions(5, 5, &mask, TileSet::RibbonT4).len();
        let n4p = naive_partitions(5, 5, &mask, TileSet::RibbonT4Plus).len();
        let region = region_of(5, 5, &mask);
        assert_eq!(
            count_tilings(&region, TileSet::RibbonT4).unwrap(),
            (n4 as u64).into()
        );
        assert_eq!(
            count_tilings(&region, TileSet::RibbonT4Plus).unwrap(),
            (n4p as u64).into()
        );
    }
}

#[test]
fn matcher_against_dp_on_deficient_boards() {
    for n in [1usize, 3, 5, 7] {
        for pos in 1..=n {
            let hole = Cell::new(pos - 1, pos - 1);
            let brute = brute_force_matchings(n, n, Some(hole));
            assert_eq!(
                count_dimer_deficient(n, pos).unwrap(),
                brute.into(),
                "n={n} pos={pos}"
            );
        }
    }
    for n in [2usize, 4, 6] {
        assert_eq!(
            count_dimer_tilings(n).unwrap(),
            brute_force_matchings(n, n, None).into()
        );
    }
}

/// Domino+monomer tilings of the n×n board, tallied by diagonal monomers.
fn naive_profile(n: usize) -> Vec<u64> {
    fn go(n: usize, used: &mut Vec<bool>, k: usize, out: &mut Vec<u64>) {
        let Some(i) = used.iter().position(|&u| !u) else {
            out[k] += 1;
            return;
        };
        let (r, c) = (i / n, i % n);
        used[i] = true;
        go(n, used, k + usize::from(r == c), out);
        if c + 1 < n && !used[i + 1] {
            used[i + 1] = true;
            go(n, used, k, out);
            used[i + 1] = false;
        }
        if r + 1 < n {
            used[i + n] = true;
            go(n, used, k, out);
            used[i + n] = false;
        }
        used[i] = false;
    }
    let mut out = vec![0; n + 1];
    go(n, &mut vec![false; n * n], 0, &mut out);
    out
}

#[test]
fn diagonal_profile_against_naive() {
    for n in 1..=4 {
        let p = diagonal_profile(n).unwrap();
        let expected: Vec<_> = naive_profile(n).into_iter().map(Into::into).collect();
        assert_eq!(p.counts, expected, "n={n}");
    }
    assert_eq!(naive_profile(2), vec![2, 4, 1]);
}

#[test]
fn full_rectangles() {
    let mut tileable = 0;
    for h in 1..=7 {
        for w in 1..=7 {
            if h * w > 28 {
                continue;
            }
            let mask = vec![true; h * w];
            check(h, w, &mask, TileSet::RibbonT4).unwrap();
            check(h, w, &mask, TileSet::RibbonT4Plus).unwrap();
            tileable += usize::from(!naive_partitions(h, w, &mask, TileSet::RibbonT4).is_empty());
        }
    }
    assert!(tileable >= 4);
}
