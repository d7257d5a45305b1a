//! Exact counter types.
//!
//! Every counter in the crate is generic over [`Count`], so callers can pick
//! a machine integer when they know the answer fits, or [`BigCount`] when it
//! may not. Overflow is always reported, never wrapped.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, One, ToPrimitive, Zero};
use serde::Serializer;

/// An exact nonnegative counter.
pub trait Count:
    Clone + Debug + PartialEq + Zero + One + CheckedAdd + CheckedMul + Send + Sync + 'static
{
    /// `self * 2^k`, or `None` on overflow.
    fn checked_shl(&self, k: u32) -> Option<Self> {
        let mut out = self.clone();
        let two = Self::one() + Self::one();
        for _ in 0..k {
            out = out.checked_mul(&two)?;
        }
        Some(out)
    }
}

impl<T> Count for T where
    T: Clone + Debug + PartialEq + Zero + One + CheckedAdd + CheckedMul + Send + Sync + 'static
{
}

/// Unbounded exact count.
pub type BigCount = BigUint;

/// Adds `rhs` into `acc`, reporting overflow as `None`.
pub(crate) fn add_into<C: Count>(acc: &mut C, rhs: &C) -> Option<()> {
    *acc = acc.checked_add(rhs)?;
    Some(())
}

/// Serializes a [`BigCount`] as a JSON number when it fits in `u128`, and as a
/// decimal string otherwise.
pub fn serialize_count<S: Serializer>(value: &BigCount, s: S) -> Result<S::Ok, S::Error> {
    match value.to_u128() {
        Some(v) => s.serialize_u128(v),
        None => s.serialize_str(&value.to_string()),
    }
}

pub(crate) fn serialize_counts<S: Serializer>(
    values: &[BigCount],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One<'a>(&'a BigCount);
    impl serde::Serialize for One<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize_count(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&One(v))?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_reports_overflow() {
        assert_eq!(Count::checked_shl(&3u8, 2), Some(12));
        assert_eq!(Count::checked_shl(&3u8, 7), None);
        assert_eq!(
            Count::checked_shl(&BigCount::from(3u8), 100),
            Some(BigCount::from(3u8) << 100u32)
        );
    }

    #[test]
    fn json_numbers_then_strings() {
        #[derive(serde::Serialize)]
        struct W(#[serde(serialize_with = "serialize_count")] BigCount);
        assert_eq!(
            serde_json::to_string(&W(BigCount::from(384u32))).unwrap(),
            "384"
        );
        let big: BigCount = BigCount::from(1u8) << 200u32;
        assert_eq!(
            serde_json::to_string(&W(big.clone())).unwrap(),
            format!("\"{big}\"")
        );
    }
}
