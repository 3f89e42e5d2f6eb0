//! Reduction types of X^D_0(N) and the resulting local m-invariant bounds.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, ShimuraLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionType {
    Good,
    CerednikDrinfeld,
    DeligneRapoport,
}

/// A place of Q. Serializes as the prime or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl From<Place> for String {
    fn from(p: Place) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Place {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "inf" {
            return Ok(Place::Infinity);
        }
        s.parse().map(Place::Finite).map_err(|_| format!("bad place {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalBound {
    pub place: Place,
    pub reduction: Option<ReductionType>,
    pub m_v_upper: u32,
    pub m_v_exact: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalProfile {
    pub level: ShimuraLevel,
    pub bounds: BTreeMap<Place, LocalBound>,
    /// Bound holding at every place not listed in `bounds`.
    pub other_places: String,
    pub mloc_divides: u32,
    pub mloc_exact: Option<u32>,
}

pub fn reduction_type(level: &ShimuraLevel, p: u64) -> ReductionType {
    if level.d().divides_by(p) {
        ReductionType::CerednikDrinfeld
    } else if level.n().divides_by(p) {
        ReductionType::DeligneRapoport
    } else {
        ReductionType::Good
    }
}

/// Upper bound for m_p(X^D_0(N)).
pub fn mp_upper(level: &ShimuraLevel, p: u64) -> u32 {
    match reduction_type(level, p) {
        ReductionType::Good | ReductionType::CerednikDrinfeld => 2,
        ReductionType::DeligneRapoport => 4,
    }
}

pub fn local_profile_x0(level: &ShimuraLevel) -> LocalProfile {
    let mut bounds = BTreeMap::new();
    // No real points, so m_∞ = 2 exactly.
    bounds.insert(
        Place::Infinity,
        LocalBound { place: Place::Infinity, reduction: None, m_v_upper: 2, m_v_exact: Some(2) },
    );
    for &p in level.d().primes().iter().chain(level.n().primes()) {
        bounds.insert(
            Place::Finite(p),
            LocalBound {
                place: Place::Finite(p),
                reduction: Some(reduction_type(level, p)),
                m_v_upper: mp_upper(level, p),
                m_v_exact: None,
            },
        );
    }
    let trivial_level = level.n().value() == 1;
    LocalProfile {
        level: level.clone(),
        bounds,
        other_places: "good reduction: m_v <= 2, and m_v = 1 for all but finitely many v".into(),
        mloc_divides: if trivial_level { 2 } else { 4 },
        mloc_exact: trivial_level.then_some(2),
    }
}

/// A number that m_loc(X^D_1(N)) divides: 2φ(N).
pub fn mloc_x1_divisor(level: &ShimuraLevel) -> u128 {
    2 * euler_phi(level.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_level;

    fn level(d: u64, n: u64) -> ShimuraLevel {
        make_level(d, n).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduction_type(&level(14, 1), 5), ReductionType::Good);
        assert_eq!(reduction_type(&level(14, 1), 7), ReductionType::CerednikDrinfeld);
        assert_eq!(reduction_type(&level(6, 5), 5), ReductionType::DeligneRapoport);
    }

    #[test]
    fn mp_examples() {
        assert_eq!(mp_upper(&level(14, 1), 3), 2);
        assert_eq!(mp_upper(&level(14, 1), 2), 2);
        assert_eq!(mp_upper(&level(6, 5), 5), 4);
    }

    #[test]
    fn profile_examples() {
        let p = local_profile_x0(&level(14, 1));
        assert_eq!(p.mloc_exact, Some(2));
        assert_eq!(p.bounds.len(), 3);
        assert_eq!(p.bounds[&Place::Infinity].m_v_exact, Some(2));
        let q = local_profile_x0(&level(6, 5));
        assert_eq!((q.mloc_divides, q.mloc_exact), (4, None));
        assert_eq!(q.bounds[&Place::Finite(5)].m_v_upper, 4);
        assert_eq!(local_profile_x0(&level(6, 1)).mloc_exact, Some(2));
        let json = serde_json::to_string(&q).unwrap();
        assert!(json.contains(r#""5":{"place":"5","reduction":"DeligneRapoport""#));
        assert_eq!(serde_json::from_str::<LocalProfile>(&json).unwrap(), q);
    }

    #[test]
    fn x1_divisor_examples() {
        assert_eq!(mloc_x1_divisor(&level(6, 5)), 8);
        assert_eq!(mloc_x1_divisor(&level(26, 1)), 2);
        assert_eq!(mloc_x1_divisor(&level(6, 35)), 48);
    }
}
