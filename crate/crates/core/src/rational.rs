use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub};
use serde::{Deserialize, Serialize};

use crate::arith::ArithError;

/// An exact rational in lowest terms with positive denominator.
///
/// Serializes as the string `"num/den"`, denominator included even when it is 1. `Display`
/// drops a unit denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ExactRational(Ratio<i128>);

impl ExactRational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        ExactRational(Ratio::new(num, den))
    }

    pub fn integer(n: i128) -> Self {
        ExactRational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.0.checked_add(&other.0).map(ExactRational).ok_or(ArithError::Overflow("rational add"))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.0.checked_sub(&other.0).map(ExactRational).ok_or(ArithError::Overflow("rational sub"))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.0.checked_mul(&other.0).map(ExactRational).ok_or(ArithError::Overflow("rational mul"))
    }

    /// Least integer ≥ self.
    pub fn ceil(&self) -> i128 {
        Integer::div_ceil(self.0.numer(), self.0.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn max(self, other: Self) -> Self {
        if self.cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRationalError(String);

impl FromStr for ExactRational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseRationalError(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        if den <= 0 {
            return Err(bad());
        }
        Ok(ExactRational::new(num, den))
    }
}

impl From<ExactRational> for String {
    fn from(r: ExactRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl TryFrom<String> for ExactRational {
    type Error = ParseRationalError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_format() {
        let r = ExactRational::new(2142, 200);
        assert_eq!((r.numer(), r.denom()), (1071, 100));
        assert_eq!(ExactRational::new(3, -6).to_string(), "-1/2");
        assert_eq!(ExactRational::integer(8).to_string(), "8");
        assert_eq!("25/3".parse::<ExactRational>().unwrap(), ExactRational::new(25, 3));
        assert!("1/0".parse::<ExactRational>().is_err());
    }

    #[test]
    fn ceil_rounds_up() {
        assert_eq!(ExactRational::new(2550, 3).ceil(), 850);
        assert_eq!(ExactRational::new(2551, 3).ceil(), 851);
        assert_eq!(ExactRational::new(-21, 200).ceil(), 0);
    }

    #[test]
    fn overflow_is_error() {
        let big = ExactRational::integer(i128::MAX / 2);
        assert!(big.checked_mul(&ExactRational::integer(4)).is_err());
    }

    #[test]
    fn serde_as_string() {
        let r = ExactRational::new(37, 3);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"37/3\"");
        assert_eq!(serde_json::from_str::<ExactRational>(&s).unwrap(), r);
        assert_eq!(serde_json::to_string(&ExactRational::integer(8)).unwrap(), "\"8/1\"");
    }
}
