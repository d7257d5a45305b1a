//! Domino and domino+monomer counts on square boards, independent of the
//! tetromino solver.

use std::collections::HashMap;

use num_bigint::{BigInt, Sign};
use num_traits::{Float, FloatConst, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::count::{add_into, serialize_counts, BigCount, Count};

/// Widest board the profile DP accepts (the frontier is one bit per column
/// plus one).
pub const MAX_BOARD: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimerError {
    #[error("board side {0} is odd; domino tilings need an even side")]
    OddSide(usize),
    #[error("diagonal position {pos} is outside 1..={n}")]
    PositionOutOfRange { n: usize, pos: usize },
    #[error("board side {0} exceeds the supported maximum of {MAX_BOARD}")]
    BoardTooLarge(usize),
    #[error("closed form not within 1e-3 of an integer at {bits} bits")]
    PrecisionLoss { bits: u64 },
    #[error("count overflowed the counter type")]
    Overflow,
}

/// Board cells are processed row-major. The frontier holds one bit for each
/// of the next `n + 1` cells, set when a vertical domino from the row above
/// (or a horizontal one from the left) already covers it. The value at each
/// state is indexed by the number of diagonal monomers placed so far.
fn profile_dp<C: Count>(
    n: usize,
    hole: Option<usize>,
    monomers: bool,
) -> Result<Vec<C>, DimerError> {
    if n > MAX_BOARD {
        return Err(DimerError::BoardTooLarge(n));
    }
    let slots = if monomers { n + 1 } else { 1 };
    let is_hole = |r: usize, c: usize| hole == Some(r) && r == c;
    let mut layer: HashMap<u64, Vec<C>> = HashMap::new();
    let mut start = vec![C::zero(); slots];
    start[0] = C::one();
    layer.insert(0, start);
    for r in 0..n {
        for c in 0..n {
            let mut next: HashMap<u64, Vec<C>> = HashMap::with_capacity(layer.len() * 2);
            let mut push = |state: u64, counts: &[C], bump: bool| -> Result<(), DimerError> {
                let entry = next
                    .entry(state >> 1)
                    .or_insert_with(|| vec![C::zero(); slots]);
                for (k, v) in counts.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let slot = if bump { k + 1 } else { k };
                    add_into(&mut entry[slot], v).ok_or(DimerError::Overflow)?;
                }
                Ok(())
            };
            for (&state, counts) in &layer {
                if state & 1 == 1 {
                    push(state, counts, false)?;
                    continue;
                }
                if is_hole(r, c) {
                    push(state, counts, false)?;
                    continue;
                }
                if monomers {
                    push(state, counts, r == c)?;
                }
                if c + 1 < n && state & 2 == 0 && !is_hole(r, c + 1) {
                    push(state | 2, counts, false)?;
                }
                if r + 1 < n && !is_hole(r + 1, c) {
                    push(state | 1 << n, counts, false)?;
                }
            }
            layer = next;
        }
    }
    Ok(layer.remove(&0).unwrap_or_else(|| vec![C::zero(); slots]))
}

fn single<C: Count>(mut v: Vec<C>) -> C {
    v.swap_remove(0)
}

/// Domino tilings of the `n × n` board.
pub fn count_dimer_tilings(n: usize) -> Result<BigCount, DimerError> {
    count_dimer_tilings_with(n)
}

pub fn count_dimer_tilings_with<C: Count>(n: usize) -> Result<C, DimerError> {
    if n % 2 == 1 {
        return Err(DimerError::OddSide(n));
    }
    profile_dp(n, None, false).map(single)
}

/// Domino tilings of the `n × n` board without diagonal cell `diag_pos`
/// (1-indexed).
pub fn count_dimer_deficient(n: usize, diag_pos: usize) -> Result<BigCount, DimerError> {
    count_dimer_deficient_with(n, diag_pos)
}

pub fn count_dimer_deficient_with<C: Count>(n: usize, diag_pos: usize) -> Result<C, DimerError> {
    if !(1..=n).contains(&diag_pos) {
        return Err(DimerError::PositionOutOfRange { n, pos: diag_pos });
    }
    profile_dp(n, Some(diag_pos - 1), false).map(single)
}

/// `N_k`: domino+monomer tilings of the `n × n` board with exactly `k`
/// monomers on the main diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalProfile {
    pub n: usize,
    #[serde(rename = "N", serialize_with = "serialize_counts")]
    pub counts: Vec<BigCount>,
}

impl DiagonalProfile {
    pub fn total(&self) -> BigCount {
        self.counts.iter().sum()
    }

    /// `Σ 2^k N_k`, from `k = 1` or from `k = 0`.
    pub fn weighted(&self, include_k0: bool) -> BigCount {
        let from = usize::from(!include_k0);
        self.counts
            .iter()
            .enumerate()
            .skip(from)
            .map(|(k, v)| v << k)
            .sum()
    }
}

pub fn diagonal_profile(n: usize) -> Result<DiagonalProfile, DimerError> {
    Ok(DiagonalProfile {
        n,
        counts: profile_dp(n, None, true)?,
    })
}

/// As [`diagonal_profile`] on the board without diagonal cell `diag_pos`;
/// the hole is not counted as a monomer.
pub fn diagonal_profile_deficient(
    n: usize,
    diag_pos: usize,
) -> Result<DiagonalProfile, DimerError> {
    if !(1..=n).contains(&diag_pos) {
        return Err(DimerError::PositionOutOfRange { n, pos: diag_pos });
    }
    let mut counts: Vec<BigCount> = profile_dp(n, Some(diag_pos - 1), true)?;
    counts.pop();
    Ok(DiagonalProfile { n, counts })
}

/// All domino+monomer tilings of the `n × n` board, by a plain profile DP
/// that does not track monomers.
pub fn count_monomer_dimer(n: usize) -> Result<BigCount, DimerError> {
    if n > MAX_BOARD {
        return Err(DimerError::BoardTooLarge(n));
    }
    let mut layer: HashMap<u64, BigCount> = HashMap::from([(0, BigCount::one())]);
    for r in 0..n {
        for c in 0..n {
            let mut next: HashMap<u64, BigCount> = HashMap::new();
            for (state, v) in layer {
                let mut put = |s: u64| *next.entry(s >> 1).or_default() += &v;
                if state & 1 == 1 {
                    put(state);
                    continue;
                }
                put(state);
                if c + 1 < n && state & 2 == 0 {
                    put(state | 2);
                }
                if r + 1 < n {
                    put(state | 1 << n);
                }
            }
            layer = next;
        }
    }
    Ok(layer.remove(&0).unwrap_or_default())
}

/// `N(m) = Σ 2^k N_k` over the `2m × 2m` board.
pub fn capital_n(m: usize, include_k0: bool) -> Result<BigCount, DimerError> {
    Ok(diagonal_profile(2 * m)?.weighted(include_k0))
}

/// Kasteleyn's product for the `n × n` board in floating point.
pub fn kasteleyn_float<F: Float + FloatConst>(n: usize) -> F {
    let four = F::from(4).expect("small constant");
    let denom = F::from(n + 1).expect("board side fits");
    let cos2 = |j: usize| {
        let c = (F::from(j).expect("index fits") * F::PI() / denom).cos();
        four * c * c
    };
    let mut acc = F::one();
    for j in 1..=n / 2 {
        for k in 1..=n / 2 {
            acc = acc * (cos2(j) + cos2(k));
        }
    }
    acc
}

/// Fixed-point reals: `value = raw / 2^bits`.
struct Fixed {
    bits: u64,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    /// `atan(1/x)` by its alternating series.
    fn atan_inv(&self, x: u32) -> BigInt {
        let x2 = BigInt::from(x * x);
        let mut term = self.one() / x;
        let mut sum = BigInt::zero();
        let mut k = 0u32;
        while !term.is_zero() {
            let t = &term / (2 * k + 1);
            if k % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
            term /= &x2;
            k += 1;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        self.atan_inv(5) * 16 - self.atan_inv(239) * 4
    }

    /// Taylor series; accurate for `|theta| <= 2`.
    fn cos(&self, theta: &BigInt) -> BigInt {
        let t2 = self.mul(theta, theta);
        let mut term = self.one();
        let mut sum = term.clone();
        let mut i = 1u32;
        while !term.is_zero() {
            term = -self.mul(&term, &t2) / ((2 * i - 1) * (2 * i));
            sum += &term;
            i += 1;
        }
        sum
    }
}

fn kasteleyn_at(n: usize, bits: u64) -> Result<BigCount, DimerError> {
    // guard bits absorb truncation in the series and the product
    let f = Fixed { bits: bits + 64 };
    let pi = f.pi();
    let factors: Vec<BigInt> = (1..=n / 2)
        .map(|j| {
            let c = f.cos(&(&pi * j / (n + 1)));
            f.mul(&c, &c) * 4
        })
        .collect();
    let mut acc = f.one();
    for a in &factors {
        for b in &factors {
            acc = f.mul(&acc, &(a + b));
        }
    }
    let half = BigInt::one() << (f.bits - 1);
    let rounded: BigInt = (&acc + half) >> f.bits;
    let err = (&acc - (&rounded << f.bits)).abs();
    if err * 1000 > f.one() {
        return Err(DimerError::PrecisionLoss { bits: f.bits });
    }
    match rounded.into_parts() {
        (Sign::Minus, _) => Err(DimerError::PrecisionLoss { bits: f.bits }),
        (_, mag) => Ok(mag),
    }
}

/// Kasteleyn's product for the `n × n` board, evaluated in fixed point and
/// rounded. The working precision starts at the size of the answer plus a
/// margin and doubles on failure.
pub fn kasteleyn_closed_form(n: usize) -> Result<BigCount, DimerError> {
    if n % 2 == 1 {
        return Err(DimerError::OddSide(n));
    }
    let magnitude = kasteleyn_float::<f64>(n).log2();
    let estimate = if magnitude.is_finite() {
        magnitude.max(0.0).to_u64().unwrap_or(u64::MAX / 4)
    } else {
        // each factor is at most 8
        3 * (n as u64 / 2).pow(2)
    };
    let mut bits = estimate + 2 * (n as u64 + 1).ilog2() as u64 + 32;
    let mut last = DimerError::PrecisionLoss { bits };
    for _ in 0..4 {
        match kasteleyn_at(n, bits) {
            Ok(v) => return Ok(v),
            Err(e) => last = e,
        }
        bits *= 2;
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigCount {
        BigCount::from(v)
    }

    #[test]
    fn dimer_counts() {
        let expected = [1u64, 2, 36, 6728, 12_988_816];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(count_dimer_tilings(2 * i).unwrap(), big(e));
        }
        assert_eq!(count_dimer_tilings(3), Err(DimerError::OddSide(3)));
        assert_eq!(count_dimer_tilings_with::<u8>(6), Err(DimerError::Overflow));
    }

    #[test]
    fn deficient_counts() {
        assert_eq!(count_dimer_deficient(3, 1).unwrap(), big(4));
        assert_eq!(count_dimer_deficient(3, 2).unwrap(), big(2));
        let row: Vec<BigCount> = (1..=5)
            .map(|p| count_dimer_deficient(5, p).unwrap())
            .collect();
        assert_eq!(row, [192, 112, 196, 112, 192].map(big));
        assert!(matches!(
            count_dimer_deficient(5, 6),
            Err(DimerError::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn profiles() {
        let p = diagonal_profile(2).unwrap();
        assert_eq!(p.counts, [2, 4, 1].map(big));
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"n":2,"N":[2,4,1]}"#);
        assert_eq!(diagonal_profile(1).unwrap().counts, [0, 1].map(big));
        for n in 1..=6 {
            let p = diagonal_profile(n).unwrap();
            assert_eq!(p.total(), count_monomer_dimer(n).unwrap());
        }
        // the hole is not a monomer
        let d = diagonal_profile_deficient(3, 2).unwrap();
        assert_eq!(d.counts.len(), 3);
        assert!(d.counts[0] >= count_dimer_deficient(3, 2).unwrap());
    }

    #[test]
    fn capital_n_small() {
        assert_eq!(capital_n(1, false).unwrap(), big(12));
        assert_eq!(capital_n(1, true).unwrap(), big(14));
        assert!(capital_n(1, false).unwrap() > count_monomer_dimer(2).unwrap());
    }

    #[test]
    fn kasteleyn_matches_dp() {
        for n in (2..=12).step_by(2) {
            assert_eq!(
                kasteleyn_closed_form(n).unwrap(),
                count_dimer_tilings(n).unwrap(),
                "n={n}"
            );
        }
        assert_eq!(kasteleyn_float::<f64>(4).round(), 36.0);
        assert_eq!(kasteleyn_float::<f32>(6).round(), 6728.0);
    }

    #[test]
    fn large_board_closed_form_tracks_float() {
        let exact = kasteleyn_closed_form(40).unwrap().to_f64().unwrap();
        let approx = kasteleyn_float::<f64>(40);
        assert!(((exact - approx) / approx).abs() < 1e-9);
    }
}
