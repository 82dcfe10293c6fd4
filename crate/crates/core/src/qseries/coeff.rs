//! Series coefficients: arbitrary-precision integers with an i128 fast
//! path.
//!
//! Eta-product expansions to 2·10^5 terms perform a few billion coefficient
//! additions; boxing every coefficient in a heap big-integer would blow the
//! runtime budget. Values are kept in an `i128` until an operation would
//! overflow, at which point they promote to a `BigInt`. The representation
//! is canonical (a `Big` value never fits in `i128`), so derived equality
//! is value equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactInt {
    Small(i128),
    Big(Box<BigInt>),
}

impl ExactInt {
    pub const ZERO: ExactInt = ExactInt::Small(0);
    pub const ONE: ExactInt = ExactInt::Small(1);

    pub fn from_bigint(b: BigInt) -> ExactInt {
        match b.to_i128() {
            Some(v) => ExactInt::Small(v),
            None => ExactInt::Big(Box::new(b)),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            ExactInt::Small(v) => BigInt::from(*v),
            ExactInt::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactInt::Small(0))
    }

    pub fn signum(&self) -> i32 {
        match self {
            ExactInt::Small(v) => match v.cmp(&0) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            },
            ExactInt::Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactInt::Small(v) => *v as f64,
            ExactInt::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn add(&self, other: &ExactInt) -> ExactInt {
        match (self, other) {
            (ExactInt::Small(a), ExactInt::Small(b)) => match a.checked_add(*b) {
                Some(v) => ExactInt::Small(v),
                None => ExactInt::from_bigint(BigInt::from(*a) + BigInt::from(*b)),
            },
            _ => ExactInt::from_bigint(self.to_bigint() + other.to_bigint()),
        }
    }

    pub fn sub(&self, other: &ExactInt) -> ExactInt {
        match (self, other) {
            (ExactInt::Small(a), ExactInt::Small(b)) => match a.checked_sub(*b) {
                Some(v) => ExactInt::Small(v),
                None => ExactInt::from_bigint(BigInt::from(*a) - BigInt::from(*b)),
            },
            _ => ExactInt::from_bigint(self.to_bigint() - other.to_bigint()),
        }
    }

    pub fn mul(&self, other: &ExactInt) -> ExactInt {
        match (self, other) {
            (ExactInt::Small(a), ExactInt::Small(b)) => match a.checked_mul(*b) {
                Some(v) => ExactInt::Small(v),
                None => ExactInt::from_bigint(BigInt::from(*a) * BigInt::from(*b)),
            },
            _ => ExactInt::from_bigint(self.to_bigint() * other.to_bigint()),
        }
    }

    pub fn neg(&self) -> ExactInt {
        match self {
            ExactInt::Small(v) => match v.checked_neg() {
                Some(n) => ExactInt::Small(n),
                None => ExactInt::from_bigint(-BigInt::from(*v)),
            },
            ExactInt::Big(b) => ExactInt::from_bigint(-(**b).clone()),
        }
    }

    pub fn abs_cmp_u64(&self, bound: u64) -> Ordering {
        match self {
            ExactInt::Small(v) => v.unsigned_abs().cmp(&(bound as u128)),
            ExactInt::Big(_) => Ordering::Greater,
        }
    }
}

impl From<i64> for ExactInt {
    fn from(v: i64) -> Self {
        ExactInt::Small(v as i128)
    }
}

impl From<i128> for ExactInt {
    fn from(v: i128) -> Self {
        ExactInt::Small(v)
    }
}

impl fmt::Display for ExactInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactInt::Small(v) => write!(f, "{v}"),
            ExactInt::Big(b) => write!(f, "{b}"),
        }
    }
}

impl Ord for ExactInt {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactInt::Small(a), ExactInt::Small(b)) => a.cmp(b),
            _ => self.to_bigint().cmp(&other.to_bigint()),
        }
    }
}

impl PartialOrd for ExactInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Accumulator for `Σ ±c·x` sums inside series multiplication: stays on the
/// i128 path until an addition overflows.
pub struct Accumulator {
    small: i128,
    big: Option<BigInt>,
}

impl Accumulator {
    pub fn new() -> Accumulator {
        Accumulator {
            small: 0,
            big: None,
        }
    }

    #[inline]
    pub fn add_scaled(&mut self, value: &ExactInt, scale: i64) {
        match (&mut self.big, value) {
            (None, ExactInt::Small(v)) => {
                // the eta factors have unit coefficients; skip the multiply
                let term = match scale {
                    1 => Some(*v),
                    -1 => v.checked_neg(),
                    _ => v.checked_mul(scale as i128),
                };
                match term.and_then(|t| self.small.checked_add(t)) {
                    Some(s) => self.small = s,
                    None => {
                        let mut b = BigInt::from(self.small);
                        b += BigInt::from(*v) * scale;
                        self.big = Some(b);
                    }
                }
            }
            (None, ExactInt::Big(b)) => {
                let mut acc = BigInt::from(self.small);
                acc += &**b * scale;
                self.big = Some(acc);
            }
            (Some(acc), ExactInt::Small(v)) => *acc += BigInt::from(*v) * scale,
            (Some(acc), ExactInt::Big(b)) => *acc += &**b * scale,
        }
    }

    pub fn finish(self) -> ExactInt {
        match self.big {
            Some(b) => ExactInt::from_bigint(b),
            None => ExactInt::Small(self.small),
        }
    }
}

impl Default for Accumulator {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn representation_is_canonical() {
        let top = ExactInt::Small(i128::MAX);
        let bumped = top.add(&ExactInt::ONE);
        assert!(matches!(bumped, ExactInt::Big(_)));
        let back = bumped.sub(&ExactInt::ONE);
        assert_eq!(back, top); // demoted back to Small, equality by value
        assert!(matches!(back, ExactInt::Small(_)));
    }

    #[test]
    fn accumulator_promotes_and_finishes() {
        let mut acc = Accumulator::new();
        let huge = ExactInt::Small(i128::MAX / 2);
        acc.add_scaled(&huge, 1);
        acc.add_scaled(&huge, 1);
        acc.add_scaled(&huge, 1); // overflows i128 here
        acc.add_scaled(&ExactInt::Small(5), -1);
        let expected = BigInt::from(i128::MAX / 2) * 3 - 5;
        assert_eq!(acc.finish().to_bigint(), expected);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_bigint_reference(
            a in any::<i128>(), b in any::<i128>(), s in -3i64..=3
        ) {
            let (x, y) = (ExactInt::Small(a), ExactInt::Small(b));
            prop_assert_eq!(x.add(&y).to_bigint(), BigInt::from(a) + BigInt::from(b));
            prop_assert_eq!(x.sub(&y).to_bigint(), BigInt::from(a) - BigInt::from(b));
            prop_assert_eq!(x.mul(&y).to_bigint(), BigInt::from(a) * BigInt::from(b));
            prop_assert_eq!(x.neg().to_bigint(), -BigInt::from(a));
            let mut acc = Accumulator::new();
            acc.add_scaled(&x, s);
            acc.add_scaled(&y, 1);
            prop_assert_eq!(acc.finish().to_bigint(), BigInt::from(a) * s + BigInt::from(b));
        }
    }
}
