//! Local points on the genus-one curve X^14 : Y² = −2X⁴ + 52X² − 1024 over quadratic fields.
//!
//! The integral model comes from (x² − 13)² + 7³ + 2y² = 0 via Y = 2y. A place of Q(√m)
//! can only obstruct points if it lies above ∞ or a prime of bad reduction of the model;
//! at every other prime a genus-one curve with good reduction has points over every
//! finite extension of Q_p.

mod field;
mod real;
mod solve;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::factor_squarefree;

pub use field::{
    completion_kind, is_square_local, least_nonresidue, square_class, square_class_of_int, CompletionKind,
    Elt, LocalField, LocalFieldDesc, SquareClass,
};
pub use real::count_real_roots;
pub use solve::{
    density_scan, everywhere_locally, local_breakdown, locally_solvable, Completion, DensityReport,
    LocalOracle, LocalVerdict, Mismatch, PlaceVerdict, DENSITY_SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("square test on zero")]
    ZeroElement,
    #[error("residue-disc search at {field} exceeded depth {depth}")]
    PrecisionExhausted { field: String, depth: i64 },
    #[error("m = {0} must be a squarefree integer other than 0 and 1")]
    InvalidQuadraticField(i64),
    #[error("polynomial is not a squarefree quartic (discriminant {0})")]
    NotSquarefreeQuartic(String),
}

/// Y² = f(X) with f an integral quartic with distinct roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticModel {
    /// Coefficients of f from X⁴ down to the constant term.
    pub coefficients: [i64; 5],
    pub discriminant: String,
    pub bad_primes: Vec<u64>,
}

impl QuarticModel {
    pub fn new(coefficients: [i64; 5]) -> Result<Self, LocalError> {
        let disc = quartic_discriminant(&coefficients);
        if coefficients[0] == 0 || disc == BigInt::from(0) {
            return Err(LocalError::NotSquarefreeQuartic(disc.to_string()));
        }
        let mut bad = prime_divisors(&(disc.clone() * 2 * coefficients[0]));
        bad.sort_unstable();
        Ok(QuarticModel { coefficients, discriminant: disc.to_string(), bad_primes: bad })
    }

    /// Coefficients in ascending degree.
    pub fn ascending(&self) -> Vec<i64> {
        self.coefficients.iter().rev().copied().collect()
    }

    pub fn eval(&self, x: i64) -> i128 {
        self.coefficients.iter().fold(0i128, |acc, &c| acc * i128::from(x) + i128::from(c))
    }

    pub fn discriminant_value(&self) -> BigInt {
        self.discriminant.parse().expect("stored discriminant parses")
    }
}

/// The model of X^14 with integer coefficients.
pub fn x14_model() -> QuarticModel {
    QuarticModel::new([-2, 0, 52, 0, -1024]).expect("X^14 model is a squarefree quartic")
}

/// Discriminant of a x⁴ + b x³ + c x² + d x + e.
pub fn quartic_discriminant(coefficients: &[i64; 5]) -> BigInt {
    let [a, b, c, d, e] = coefficients.map(BigInt::from);
    let p = |k: i64, parts: &[&BigInt]| parts.iter().fold(BigInt::from(k), |acc, x| acc * *x);
    let terms = [
        p(256, &[&a, &a, &a, &e, &e, &e]),
        p(-192, &[&a, &a, &b, &d, &e, &e]),
        p(-128, &[&a, &a, &c, &c, &e, &e]),
        p(144, &[&a, &a, &c, &d, &d, &e]),
        p(-27, &[&a, &a, &d, &d, &d, &d]),
        p(144, &[&a, &b, &b, &c, &e, &e]),
        p(-6, &[&a, &b, &b, &d, &d, &e]),
        p(-80, &[&a, &b, &c, &c, &d, &e]),
        p(18, &[&a, &b, &c, &d, &d, &d]),
        p(16, &[&a, &c, &c, &c, &c, &e]),
        p(-4, &[&a, &c, &c, &c, &d, &d]),
        p(-27, &[&b, &b, &b, &b, &e, &e]),
        p(18, &[&b, &b, &b, &c, &d, &e]),
        p(-4, &[&b, &b, &b, &d, &d, &d]),
        p(-4, &[&b, &b, &c, &c, &c, &e]),
        p(1, &[&b, &b, &c, &c, &d, &d]),
    ];
    terms.into_iter().sum()
}

fn prime_divisors(n: &BigInt) -> Vec<u64> {
    use num_integer::Integer;
    use num_traits::{Signed, ToPrimitive, Zero};
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= rest {
        let pb = BigInt::from(p);
        if rest.is_multiple_of(&pb) {
            out.push(p);
            while rest.is_multiple_of(&pb) && !rest.is_zero() {
                rest /= &pb;
            }
        }
        p += 1;
    }
    if rest > BigInt::from(1) {
        out.push(rest.to_u64().expect("prime factor fits in u64"));
    }
    out
}

/// A quadratic field Q(√m), m squarefree and not 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct QuadraticFieldSpec {
    m: i64,
}

impl QuadraticFieldSpec {
    pub fn new(m: i64) -> Result<Self, LocalError> {
        if m == 0 || m == 1 || factor_squarefree(m.unsigned_abs()).is_err() {
            return Err(LocalError::InvalidQuadraticField(m));
        }
        Ok(QuadraticFieldSpec { m })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn is_imaginary(&self) -> bool {
        self.m < 0
    }
}

impl TryFrom<i64> for QuadraticFieldSpec {
    type Error = LocalError;

    fn try_from(m: i64) -> Result<Self, Self::Error> {
        QuadraticFieldSpec::new(m)
    }
}

impl From<QuadraticFieldSpec> for i64 {
    fn from(k: QuadraticFieldSpec) -> i64 {
        k.m
    }
}

impl fmt::Display for QuadraticFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt {})", self.m)
    }
}
