//! Elliptic-point counts, genus of X^D_0(N), Shimura-covering bounds and the
//! Abramovich gonality bound.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{dedekind_psi, euler_phi, kronecker_minus3, kronecker_minus4, ArithError, ShimuraLevel};
use crate::rational::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    /// The genus expression came out fractional or negative. Never expected for a valid level.
    #[error("genus expression for {level} is not a nonnegative integer (12·g = {twelve_g})")]
    NonIntegralGenus { level: String, twelve_g: i128 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Numerator and denominator of the Abramovich constant 21/200.
pub const ABRAMOVICH: (i128, i128) = (21, 200);

/// e2(D, N) and e3(D, N).
pub fn elliptic_counts(level: &ShimuraLevel) -> (u64, u64) {
    let count = |chi: fn(u64) -> i64| -> u64 {
        let ramified = level.d().primes().iter().map(|&p| 1 - chi(p));
        let level_part = level.n().primes().iter().map(|&q| 1 + chi(q));
        ramified.chain(level_part).map(|f| f as u64).product()
    };
    (count(kronecker_minus4), count(kronecker_minus3))
}

/// Genus of X^D_0(N): 1 + φ(D)ψ(N)/12 − e2/4 − e3/3.
pub fn genus_x0(level: &ShimuraLevel) -> Result<u64, InvariantError> {
    let (e2, e3) = elliptic_counts(level);
    let volume = euler_phi(level.d())
        .checked_mul(dedekind_psi(level.n()))
        .and_then(|v| i128::try_from(v).ok())
        .ok_or(ArithError::Overflow("phi(D)psi(N)"))?;
    let twelve_g = 12 + volume - 3 * i128::from(e2) - 4 * i128::from(e3);
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(InvariantError::NonIntegralGenus { level: level.to_string(), twelve_g });
    }
    u64::try_from(twelve_g / 12).map_err(|_| ArithError::Overflow("genus").into())
}

/// Ling's lower bound φ(N) / (2·6^ω(N)) for the order of the Shimura covering group.
pub fn sigma_lower(level: &ShimuraLevel) -> Result<ExactRational, InvariantError> {
    let phi = i128::try_from(euler_phi(level.n())).map_err(|_| ArithError::Overflow("phi(N)"))?;
    let six_pow = 6i128.checked_pow(level.n().omega() as u32).ok_or(ArithError::Overflow("6^omega(N)"))?;
    Ok(ExactRational::new(phi, 2 * six_pow))
}

/// Lower bound for the genus of X^D_1(N) through the unramified covering X^D_2(N).
///
/// Returns `None` when g(X^D_0(N)) ≤ 1, where the bound says nothing. The covering group
/// bound is clamped below by 1.
pub fn genus_x1_lower(level: &ShimuraLevel) -> Result<Option<u64>, InvariantError> {
    let g0 = genus_x0(level)?;
    if g0 < 2 {
        return Ok(None);
    }
    genus_x1_lower_from(level, g0).map(Some)
}

fn genus_x1_lower_from(level: &ShimuraLevel, g0: u64) -> Result<u64, InvariantError> {
    let sigma = sigma_lower(level)?.max(ExactRational::integer(1));
    let scaled = sigma.checked_mul(&ExactRational::integer(i128::from(g0) - 1))?;
    let bound = scaled.ceil().checked_add(1).ok_or(ArithError::Overflow("genus1 bound"))?;
    u64::try_from(bound).map_err(|_| ArithError::Overflow("genus1 bound").into())
}

/// (21/200)(g − 1), a lower bound for the complex (hence rational) gonality.
pub fn gonality_lower(genus: u64) -> ExactRational {
    ExactRational::new(ABRAMOVICH.0 * (i128::from(genus) - 1), ABRAMOVICH.1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInvariants {
    pub level: ShimuraLevel,
    pub e2: u64,
    pub e3: u64,
    /// Genus of X^D_0(N).
    pub genus0: u64,
    pub sigma_lower: ExactRational,
    pub genus1_lower: Option<u64>,
    /// Lower bound on the gonality of X^D_0(N).
    pub gonality_lower: ExactRational,
}

impl CurveInvariants {
    pub fn compute(level: &ShimuraLevel) -> Result<Self, InvariantError> {
        let (e2, e3) = elliptic_counts(level);
        let genus0 = genus_x0(level)?;
        let genus1_lower = if genus0 >= 2 { Some(genus_x1_lower_from(level, genus0)?) } else { None };
        Ok(CurveInvariants {
            level: level.clone(),
            e2,
            e3,
            genus0,
            sigma_lower: sigma_lower(level)?,
            genus1_lower,
            gonality_lower: gonality_lower(genus0),
        })
    }
}
