//! Scalar traits the matrix and search code is generic over.
//!
//! Everything in this crate is exact. Integer work runs on either a machine
//! `i64` (fast path for the backtracking kernel) or an arbitrary-precision
//! `BigInt`; congruence diagonalization runs over exact rationals.

use std::fmt::{Debug, Display};
use std::ops::{Div, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// A commutative ring element usable as a matrix entry.
pub trait Ring:
    Clone + PartialEq + Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Neg<Output = T>
        + Sub<Output = T>
        + Send
        + Sync
{
}

/// An exact integer scalar.
pub trait IntScalar:
    Ring + Integer + Signed + Roots + Ord + Display + FromPrimitive + ToPrimitive + From<i64> + 'static
{
    fn to_big(&self) -> BigInt;

    /// Narrowing conversion; `None` when the value does not fit.
    fn from_big(v: &BigInt) -> Option<Self>;
}

impl IntScalar for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl IntScalar for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }

    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

/// An exact field scalar (rationals over some integer type).
pub trait FieldScalar: Ring + Div<Output = Self> + Signed + PartialOrd {
    fn from_int<I: IntScalar>(v: &I) -> Self;
}

impl<I> FieldScalar for Ratio<I>
where
    I: IntScalar + Clone,
{
    fn from_int<J: IntScalar>(v: &J) -> Self {
        let big = v.to_big();
        Ratio::from_integer(I::from_big(&big).expect("integer does not fit the rational base type"))
    }
}

/// Exact integer square root, `None` for negative input or non-squares.
pub fn exact_sqrt<T: IntScalar>(v: &T) -> Option<T> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    if r.clone() * r.clone() == *v {
        Some(r)
    } else {
        None
    }
}

/// Iteration order used for integer coordinates: 0, 1, -1, 2, -2, ...
pub fn search_order_key(v: i64) -> (u64, bool) {
    (v.unsigned_abs(), v < 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sqrt_both_scalars() {
        assert_eq!(exact_sqrt(&49i64), Some(7));
        assert_eq!(exact_sqrt(&50i64), None);
        assert_eq!(exact_sqrt(&-4i64), None);
        let big = BigInt::from(10).pow(40u32);
        assert_eq!(exact_sqrt(&big), Some(BigInt::from(10).pow(20u32)));
    }

    #[test]
    fn order_key_sorts_small_first() {
        let mut v = vec![-2i64, 2, 0, -1, 1];
        v.sort_by_key(|x| search_order_key(*x));
        assert_eq!(v, vec![0, 1, -1, 2, -2]);
    }
}
