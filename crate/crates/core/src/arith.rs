//! Exact integer arithmetic on squarefree integers and Shimura levels.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{n} is not squarefree ({p}^2 divides it)")]
    NotSquarefree { n: u64, p: u64 },
    #[error("D = {d} and N = {n} are not coprime")]
    NotCoprime { d: u64, n: u64 },
    #[error("D = {d} has {count} prime factors; a discriminant needs an even number")]
    OddPrimeCount { d: u64, count: usize },
    #[error("D = 1 is not allowed (the quaternion algebra must be nonsplit)")]
    DisallowedUnit,
    #[error("expected a positive integer, got 0")]
    Zero,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

/// A positive squarefree integer together with its (sorted) prime divisors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u64", try_from = "u64")]
pub struct SquarefreeFactored {
    value: u64,
    primes: Vec<u64>,
}

impl SquarefreeFactored {
    pub fn one() -> Self {
        SquarefreeFactored { value: 1, primes: Vec::new() }
    }

    /// Builds from a strictly increasing list of primes. The caller vouches for primality.
    fn from_primes(primes: Vec<u64>) -> Result<Self, ArithError> {
        debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
        let mut value: u64 = 1;
        for &p in &primes {
            value = value.checked_mul(p).ok_or(ArithError::Overflow("squarefree product"))?;
        }
        Ok(SquarefreeFactored { value, primes })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of distinct prime divisors, ω(n).
    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    pub fn divides_by(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn is_coprime_to(&self, other: &SquarefreeFactored) -> bool {
        self.primes.iter().all(|p| !other.divides_by(*p))
    }
}

impl From<SquarefreeFactored> for u64 {
    fn from(n: SquarefreeFactored) -> u64 {
        n.value
    }
}

impl TryFrom<u64> for SquarefreeFactored {
    type Error = ArithError;

    fn try_from(n: u64) -> Result<Self, Self::Error> {
        factor_squarefree(n)
    }
}

impl fmt::Display for SquarefreeFactored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Factors `n` by trial division, failing if some p^2 divides it.
pub fn factor_squarefree(n: u64) -> Result<SquarefreeFactored, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut rest = n;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return Err(ArithError::NotSquarefree { n, p });
            }
            primes.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        primes.push(rest);
    }
    Ok(SquarefreeFactored { value: n, primes })
}

/// Smallest-prime-factor table for fast factorization of every integer up to a bound.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    spf: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let limit = usize::try_from(limit).expect("sieve limit fits in usize");
        assert!(limit < u32::MAX as usize, "sieve limit too large");
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        PrimeSieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// Factors `n`, returning `None` when `n` is not squarefree. Panics if `n` exceeds the limit.
    pub fn squarefree(&self, n: u64) -> Option<SquarefreeFactored> {
        assert!(n >= 1 && n <= self.limit(), "{n} outside sieve range");
        let mut rest = n as usize;
        let mut primes = Vec::new();
        while rest > 1 {
            let p = self.spf[rest] as usize;
            rest /= p;
            if rest.is_multiple_of(p) {
                return None;
            }
            primes.push(p as u64);
        }
        Some(SquarefreeFactored { value: n, primes })
    }
}

/// φ(n) for squarefree n: ∏ (p − 1).
pub fn euler_phi(n: &SquarefreeFactored) -> u128 {
    n.primes.iter().map(|p| u128::from(p - 1)).product()
}

/// Dedekind ψ(n) for squarefree n: ∏ (p + 1).
pub fn dedekind_psi(n: &SquarefreeFactored) -> u128 {
    n.primes.iter().map(|p| u128::from(*p) + 1).product()
}

/// The Kronecker symbol (−4/p) for a prime p.
pub fn kronecker_minus4(p: u64) -> i64 {
    match p % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// The Kronecker symbol (−3/p) for a prime p.
pub fn kronecker_minus3(p: u64) -> i64 {
    match p % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// A validated pair (D, N): D a quaternion discriminant, N squarefree and prime to D.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLevel", into = "RawLevel")]
pub struct ShimuraLevel {
    d: SquarefreeFactored,
    n: SquarefreeFactored,
}

#[derive(Serialize, Deserialize)]
struct RawLevel {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "N")]
    n: u64,
}

impl TryFrom<RawLevel> for ShimuraLevel {
    type Error = ArithError;

    fn try_from(raw: RawLevel) -> Result<Self, Self::Error> {
        make_level(raw.d, raw.n)
    }
}

impl From<ShimuraLevel> for RawLevel {
    fn from(level: ShimuraLevel) -> Self {
        RawLevel { d: level.d.value, n: level.n.value }
    }
}

impl ShimuraLevel {
    fn from_parts(d: SquarefreeFactored, n: SquarefreeFactored) -> Result<Self, ArithError> {
        if d.value == 1 {
            return Err(ArithError::DisallowedUnit);
        }
        if !d.omega().is_multiple_of(2) {
            return Err(ArithError::OddPrimeCount { d: d.value, count: d.omega() });
        }
        if !d.is_coprime_to(&n) {
            return Err(ArithError::NotCoprime { d: d.value, n: n.value });
        }
        Ok(ShimuraLevel { d, n })
    }

    pub fn d(&self) -> &SquarefreeFactored {
        &self.d
    }

    pub fn n(&self) -> &SquarefreeFactored {
        &self.n
    }

    /// D·N (cannot overflow: checked at construction time by `make_level`).
    pub fn product(&self) -> u64 {
        self.d.value * self.n.value
    }

    /// ω(DN).
    pub fn omega(&self) -> usize {
        self.d.omega() + self.n.omega()
    }

    /// Canonical ordering key: ascending D·N, then ascending D.
    pub fn sort_key(&self) -> (u64, u64) {
        (self.product(), self.d.value)
    }
}

impl fmt::Display for ShimuraLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(D={}, N={})", self.d.value, self.n.value)
    }
}

pub fn make_level(d: u64, n: u64) -> Result<ShimuraLevel, ArithError> {
    let d = factor_squarefree(d)?;
    let n = factor_squarefree(n)?;
    d.value.checked_mul(n.value).ok_or(ArithError::Overflow("D*N"))?;
    ShimuraLevel::from_parts(d, n)
}

/// Every level (D, N) with D·N = `n.value()`, in ascending D.
pub fn levels_with_product(n: &SquarefreeFactored) -> Vec<ShimuraLevel> {
    let k = n.omega();
    if k < 2 {
        return Vec::new();
    }
    let mut out: Vec<ShimuraLevel> = (0u32..1 << k)
        .filter(|mask| mask.count_ones() >= 2 && mask.count_ones() % 2 == 0)
        .map(|mask| {
            let (dp, np): (Vec<_>, Vec<_>) =
                n.primes.iter().enumerate().partition(|(i, _)| mask & (1 << i) != 0);
            let d = SquarefreeFactored::from_primes(dp.into_iter().map(|(_, p)| *p).collect())
                .expect("divisor of a valid product");
            let nn = SquarefreeFactored::from_primes(np.into_iter().map(|(_, p)| *p).collect())
                .expect("divisor of a valid product");
            ShimuraLevel { d, n: nn }
        })
        .collect();
    out.sort_by_key(|l| l.d.value);
    out
}

/// Streams every valid level with D·N ≤ `max_product` in canonical (D·N, D) order.
pub fn enumerate_levels(max_product: u64) -> Levels {
    Levels { sieve: PrimeSieve::new(max_product.max(1)), next: 1, buffer: VecDeque::new() }
}

pub struct Levels {
    sieve: PrimeSieve,
    next: u64,
    buffer: VecDeque<ShimuraLevel>,
}

impl Iterator for Levels {
    type Item = ShimuraLevel;

    fn next(&mut self) -> Option<ShimuraLevel> {
        while self.buffer.is_empty() {
            if self.next > self.sieve.limit() {
                return None;
            }
            if let Some(n) = self.sieve.squarefree(self.next) {
                self.buffer.extend(levels_with_product(&n));
            }
            self.next += 1;
        }
        self.buffer.pop_front()
    }
}
