use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A half-integer stored as twice its value, so that `j`, `m` and their sums
/// stay exact. Serialized as its numeric value (`0.5`, `1`, `1.5`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    #[inline]
    pub const fn from_int(n: i32) -> Self {
        Self { twice: 2 * n }
    }

    /// Nearest half-integer to `v`; `None` if `v` is not a multiple of ½.
    pub fn from_f64(v: f64) -> Option<Self> {
        let t = (2.0 * v).round();
        if (2.0 * v - t).abs() > 1e-9 || !t.is_finite() {
            return None;
        }
        Some(Self { twice: t as i32 })
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.twice
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, when there is one.
    #[inline]
    pub fn as_int(self) -> Option<i32> {
        self.is_integer().then_some(self.twice / 2)
    }

    #[inline]
    pub fn abs(self) -> Self {
        Self { twice: self.twice.abs() }
    }

    /// True when `self` and `other` differ by an integer.
    #[inline]
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }

    /// The projections `m = j, j-1, …, -j` (descending, matching the matrix
    /// row order used throughout the crate).
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + ExactSizeIterator {
        let j = self.twice;
        (0..self.multiplicity()).map(move |k| HalfInt { twice: j - 2 * k as i32 })
    }

    /// Dimension `2j + 1` of the spin-j representation.
    #[inline]
    pub fn multiplicity(self) -> usize {
        (self.twice + 1).max(0) as usize
    }

    /// Row index of projection `m` within spin `self` (descending order).
    #[inline]
    pub fn index_of(self, m: HalfInt) -> usize {
        ((self.twice - m.twice) / 2) as usize
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_int() {
            Some(n) => s.serialize_i32(n),
            None => s.serialize_f64(self.value()),
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if v.abs() > 1e6 {
            return Err(serde::de::Error::custom(format!("{v} is out of range")));
        }
        HalfInt::from_f64(v).ok_or_else(|| serde::de::Error::custom(format!("{v} is not a multiple of 1/2")))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_descend() {
        let j = HalfInt::from_twice(3);
        let ms: Vec<i32> = j.projections().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        for (k, m) in j.projections().enumerate() {
            assert_eq!(j.index_of(m), k);
        }
        assert_eq!(HalfInt::ZERO.projections().count(), 1);
    }

    #[test]
    fn parsing_rejects_non_half_values() {
        assert_eq!(HalfInt::from_f64(1.5), Some(HalfInt::from_twice(3)));
        assert_eq!(HalfInt::from_f64(0.3), None);
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
    }
}
