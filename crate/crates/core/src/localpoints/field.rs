//! Quadratic extensions of Q_p with exact element arithmetic and square-class tests.
//!
//! Elements are a + bθ with a, b ∈ Q, where θ² = sθ + r is chosen so that Z_p[θ] is the ring
//! of integers: in the unramified case θ reduces to a generator of the residue field, in the
//! ramified case θ is an Eisenstein uniformizer.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::LocalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CompletionKind {
    Split,
    Inert,
    Ramified,
}

/// A class of Q_p^× / (Q_p^×)^2, named by its canonical integer representative.
///
/// For odd p the representatives are {1, n, p, pn} with n the least quadratic nonresidue;
/// for p = 2 they are {1, 3, 5, 7, 2, 6, 10, 14}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareClass {
    pub p: u64,
    pub representative: i64,
}

impl SquareClass {
    pub fn all(p: u64) -> Vec<SquareClass> {
        let reps: Vec<i64> = if p == 2 {
            vec![1, 3, 5, 7, 2, 6, 10, 14]
        } else {
            let n = least_nonresidue(p) as i64;
            let p = p as i64;
            vec![1, n, p, p * n]
        };
        reps.into_iter().map(|representative| SquareClass { p, representative }).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.representative == 1
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod Q_{}^2", self.representative, self.p)
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Least quadratic nonresidue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1).expect("odd prime has a nonresidue")
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn vp_rat(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_int(x.numer(), p) - vp_int(x.denom(), p))
    }
}

/// Square class in Q_p of a nonzero rational.
pub fn square_class(x: &BigRational, p: u64) -> Result<SquareClass, LocalError> {
    let v = vp_rat(x, p).ok_or(LocalError::ZeroElement)?;
    let pb = BigInt::from(p);
    let unit = x / BigRational::from_integer(pb.pow(v.unsigned_abs() as u32)).pow(v.signum() as i32);
    let unit_class = if p == 2 {
        residue_mod(&unit, 8) as i64
    } else {
        let r = residue_mod(&unit, p);
        if pow_mod(r, (p - 1) / 2, p) == 1 {
            1
        } else {
            least_nonresidue(p) as i64
        }
    };
    let representative = if v % 2 != 0 { unit_class * p as i64 } else { unit_class };
    Ok(SquareClass { p, representative })
}

pub fn square_class_of_int(m: i64, p: u64) -> SquareClass {
    square_class(&BigRational::from_integer(m.into()), p).expect("nonzero")
}

/// Residue of a p-integral rational modulo `modulus` (a power of p).
fn residue_mod(x: &BigRational, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let den_inv = x.denom().modinv(&m).expect("p-integral rational");
    (x.numer() * den_inv).mod_floor(&m).to_u64().expect("fits")
}

/// Completion of Q(√m) at a place above p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalFieldDesc {
    pub p: u64,
    pub kind: CompletionKind,
    pub ramification_index: u32,
    pub residue_degree: u32,
    /// Square class of m in Q_p; identifies the extension among those of its kind.
    pub class: SquareClass,
}

impl LocalFieldDesc {
    /// The p-adic base field Q_p itself.
    pub fn base(p: u64) -> Self {
        Self::from_class(SquareClass { p, representative: 1 })
    }

    /// Q_p(√d) for the square class of d.
    pub fn from_class(class: SquareClass) -> Self {
        let (p, d) = (class.p, class.representative);
        let kind = if d == 1 {
            CompletionKind::Split
        } else if d % p as i64 == 0 || (p == 2 && d % 4 == 3) {
            CompletionKind::Ramified
        } else {
            CompletionKind::Inert
        };
        let (ramification_index, residue_degree) = match kind {
            CompletionKind::Split => (1, 1),
            CompletionKind::Inert => (1, 2),
            CompletionKind::Ramified => (2, 1),
        };
        LocalFieldDesc { p, kind, ramification_index, residue_degree, class }
    }
}

impl fmt::Display for LocalFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CompletionKind::Split => write!(f, "Q_{}", self.p),
            _ => write!(f, "Q_{}(sqrt {})", self.p, self.class.representative),
        }
    }
}

/// An element a + bθ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Elt {
    pub a: BigRational,
    pub b: BigRational,
}

impl Elt {
    pub fn from_int(n: i64) -> Self {
        Elt { a: BigRational::from_integer(n.into()), b: BigRational::zero() }
    }

    pub fn from_rational(a: BigRational) -> Self {
        Elt { a, b: BigRational::zero() }
    }

    pub fn pair(a: i64, b: i64) -> Self {
        Elt { a: BigRational::from_integer(a.into()), b: BigRational::from_integer(b.into()) }
    }

    pub fn zero() -> Self {
        Elt::from_int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Elt) -> Elt {
        Elt { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Elt) -> Elt {
        Elt { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn scale(&self, k: &BigRational) -> Elt {
        Elt { a: &self.a * k, b: &self.b * k }
    }
}

/// Q_p or a quadratic extension of it, ready for arithmetic.
#[derive(Debug, Clone)]
pub struct LocalField {
    desc: LocalFieldDesc,
    /// θ² = sθ + r.
    s: BigRational,
    r: BigRational,
    uniformizer: Elt,
    /// Valuation of 2 in the normalized valuation (v(π) = 1).
    v2: i64,
    residue_reps: Vec<Elt>,
    /// w² for w running over O / π^(2·v2 + 1).
    unit_squares: Vec<Elt>,
}

impl LocalField {
    pub fn new(desc: LocalFieldDesc) -> Self {
        let p = desc.p as i64;
        let d = desc.class.representative;
        let (s, r) = match desc.kind {
            CompletionKind::Split => (0, 0),
            CompletionKind::Inert if p == 2 => (-1, -1),
            CompletionKind::Inert => (0, d),
            CompletionKind::Ramified if p == 2 && d % 2 != 0 => (2, d - 1),
            CompletionKind::Ramified => (0, d),
        };
        let uniformizer = match desc.kind {
            CompletionKind::Ramified => Elt::pair(0, 1),
            _ => Elt::from_int(p),
        };
        let e = i64::from(desc.ramification_index);
        let v2 = if desc.p == 2 { e } else { 0 };
        let mut field = LocalField {
            desc,
            s: BigRational::from_integer(s.into()),
            r: BigRational::from_integer(r.into()),
            uniformizer,
            v2,
            residue_reps: Vec::new(),
            unit_squares: Vec::new(),
        };
        field.residue_reps = field.reps_mod_pi_power(1);
        let depth = field.square_depth() as u32;
        field.unit_squares = field.reps_mod_pi_power(depth).iter().map(|w| field.mul(w, w)).collect();
        field
    }

    pub fn desc(&self) -> &LocalFieldDesc {
        &self.desc
    }

    pub fn p(&self) -> u64 {
        self.desc.p
    }

    pub fn uniformizer(&self) -> &Elt {
        &self.uniformizer
    }

    pub fn residue_reps(&self) -> &[Elt] {
        &self.residue_reps
    }

    /// A unit u is a square iff it is congruent to a square modulo π^(square_depth).
    pub fn square_depth(&self) -> i64 {
        2 * self.v2 + 1
    }

    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let bd = &x.b * &y.b;
        Elt { a: &x.a * &y.a + &bd * &self.r, b: &x.a * &y.b + &x.b * &y.a + &bd * &self.s }
    }

    pub fn pow(&self, x: &Elt, k: u32) -> Elt {
        (0..k).fold(Elt::from_int(1), |acc, _| self.mul(&acc, x))
    }

    /// Normalized valuation (v(π) = 1); `None` for zero.
    pub fn valuation(&self, x: &Elt) -> Option<i64> {
        let p = self.desc.p;
        let va = vp_rat(&x.a, p);
        let vb = vp_rat(&x.b, p);
        match self.desc.kind {
            CompletionKind::Split => va,
            CompletionKind::Inert => min_opt(va, vb),
            CompletionKind::Ramified => min_opt(va.map(|v| 2 * v), vb.map(|v| 2 * v + 1)),
        }
    }

    /// x / π.
    pub fn div_uniformizer(&self, x: &Elt) -> Elt {
        match self.desc.kind {
            CompletionKind::Ramified => {
                // θ(θ − s) = r.
                let theta_minus_s = Elt { a: -self.s.clone(), b: BigRational::one() };
                self.mul(x, &theta_minus_s).scale(&self.r.recip())
            }
            _ => x.scale(&BigRational::new(BigInt::one(), BigInt::from(self.desc.p))),
        }
    }

    /// Representatives of O / π^j.
    pub fn reps_mod_pi_power(&self, j: u32) -> Vec<Elt> {
        let p = self.desc.p as i64;
        let (na, nb) = match self.desc.kind {
            CompletionKind::Split => (p.pow(j), 1),
            CompletionKind::Inert => (p.pow(j), p.pow(j)),
            CompletionKind::Ramified => (p.pow(j.div_ceil(2)), p.pow(j / 2)),
        };
        let mut out = Vec::with_capacity((na * nb) as usize);
        for b in 0..nb {
            for a in 0..na {
                out.push(Elt::pair(a, b));
            }
        }
        out
    }

    pub fn is_square(&self, x: &Elt) -> Result<bool, LocalError> {
        let v = self.valuation(x).ok_or(LocalError::ZeroElement)?;
        if v % 2 != 0 {
            return Ok(false);
        }
        let mut unit = x.clone();
        if v >= 0 {
            for _ in 0..v {
                unit = self.div_uniformizer(&unit);
            }
        } else {
            let pi = self.uniformizer.clone();
            for _ in 0..-v {
                unit = self.mul(&unit, &pi);
            }
        }
        debug_assert_eq!(self.valuation(&unit), Some(0));
        let depth = self.square_depth();
        Ok(self.unit_squares.iter().any(|w2| self.valuation(&unit.sub(w2)).is_none_or(|vv| vv >= depth)))
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// The completion of Q(√m) at the places above p.
pub fn completion_kind(m: i64, p: u64) -> LocalFieldDesc {
    LocalFieldDesc::from_class(square_class_of_int(m, p))
}

/// Whether the nonzero rational `a` is a square in the field described by `desc`.
pub fn is_square_local(a: &BigRational, desc: &LocalFieldDesc) -> Result<bool, LocalError> {
    if a.is_zero() {
        return Err(LocalError::ZeroElement);
    }
    LocalField::new(*desc).is_square(&Elt::from_rational(a.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Exhaustive: is n a square modulo p^k (n a unit)?
    fn brute_square_mod(n: i64, p: i64, k: u32) -> bool {
        let m = p.pow(k);
        (0..m).any(|y| (y * y - n).rem_euclid(m) == 0)
    }

    #[test]
    fn base_field_examples() {
        assert!(is_square_local(&q(2), &LocalFieldDesc::base(7)).unwrap());
        assert!(!is_square_local(&q(7), &LocalFieldDesc::base(7)).unwrap());
        assert!(is_square_local(&q(17), &LocalFieldDesc::base(2)).unwrap());
        assert!(brute_square_mod(17, 2, 10));
        assert!(!is_square_local(&q(3), &LocalFieldDesc::base(2)).unwrap());
        assert!(is_square_local(&BigRational::new(9.into(), 49.into()), &LocalFieldDesc::base(7)).unwrap());
        assert!(is_square_local(&q(0), &LocalFieldDesc::base(7)).is_err());
    }

    #[test]
    fn two_adic_units_match_brute_force() {
        let base = LocalFieldDesc::base(2);
        for n in (1..200).step_by(2) {
            assert_eq!(is_square_local(&q(n), &base).unwrap(), brute_square_mod(n, 2, 8), "n = {n}");
        }
    }

    #[test]
    fn completion_examples() {
        assert_eq!(completion_kind(-3, 7).kind, CompletionKind::Split);
        assert_eq!(completion_kind(-1, 7).kind, CompletionKind::Inert);
        assert_eq!(completion_kind(-7, 7).kind, CompletionKind::Ramified);
        assert_eq!(completion_kind(-7, 2).kind, CompletionKind::Split);
        assert_eq!(completion_kind(5, 2).kind, CompletionKind::Inert);
        assert_eq!(completion_kind(-1, 2).kind, CompletionKind::Ramified);
        assert_eq!(completion_kind(3, 2).kind, CompletionKind::Ramified);
        assert_eq!(completion_kind(6, 2).kind, CompletionKind::Ramified);
        let d = completion_kind(-7, 7);
        assert_eq!((d.ramification_index, d.residue_degree), (2, 1));
    }

    #[test]
    fn square_class_counts() {
        assert_eq!(SquareClass::all(7).len(), 4);
        assert_eq!(SquareClass::all(2).len(), 8);
        assert_eq!(square_class_of_int(-1, 7).representative, 3);
        assert_eq!(square_class_of_int(-14, 7).representative, 21);
    }

    #[test]
    fn extension_adjoins_its_root() {
        // In Q_p(√d), d becomes a square; every class becomes a square in some extension.
        for p in [2u64, 3, 7] {
            for class in SquareClass::all(p) {
                let field = LocalField::new(LocalFieldDesc::from_class(class));
                assert!(field.is_square(&Elt::from_int(class.representative)).unwrap(), "{class}");
            }
        }
    }

    #[test]
    fn unramified_extension_squares_all_base_units() {
        for p in [3u64, 7] {
            let field = LocalField::new(completion_kind(least_nonresidue(p) as i64, p));
            for a in 1..p as i64 {
                assert!(field.is_square(&Elt::from_int(a)).unwrap());
            }
            assert!(!field.is_square(&Elt::from_int(p as i64)).unwrap());
        }
    }

    #[test]
    fn index_of_squares_in_extensions() {
        // |K^×/K^×2| = 4 for odd residue characteristic, and 4·2^[K:Q_2] for p = 2.
        // Count classes among a + bθ small via pairwise "ratio is square" equivalence.
        for (desc, expected) in [
            (completion_kind(-1, 7), 4),
            (completion_kind(7, 7), 4),
            (completion_kind(5, 2), 16),
            (completion_kind(-1, 2), 16),
            (completion_kind(2, 2), 16),
        ] {
            let field = LocalField::new(desc);
            let pi = field.uniformizer().clone();
            let mut reps: Vec<Elt> = Vec::new();
            let units: Vec<Elt> = field
                .reps_mod_pi_power(field.square_depth() as u32)
                .into_iter()
                .filter(|u| field.valuation(u) == Some(0))
                .collect();
            for u in units.iter().flat_map(|u| [u.clone(), field.mul(u, &pi)]) {
                let fresh = reps.iter().all(|r| {
                    // u / r is a square iff u·r is a square.
                    !field.is_square(&field.mul(&u, r)).unwrap()
                });
                if fresh {
                    reps.push(u);
                }
            }
            assert_eq!(reps.len(), expected, "{desc}");
        }
    }

    proptest! {
        #[test]
        fn square_multiplicativity(a in 1i64..500, u in 1i64..500, pi in 0usize..3) {
            let p = [2u64, 3, 7][pi];
            let desc = LocalFieldDesc::base(p);
            let a2u = q(a * a * u);
            prop_assert_eq!(is_square_local(&a2u, &desc).unwrap(), is_square_local(&q(u), &desc).unwrap());
        }

        #[test]
        fn nonsquare_unit_flips(u in 1i64..2_000, pi in 0usize..2) {
            let p = [3u64, 7][pi];
            prop_assume!(u % p as i64 != 0);
            let n = least_nonresidue(p) as i64;
            let desc = LocalFieldDesc::base(p);
            let s1 = is_square_local(&q(u), &desc).unwrap();
            let s2 = is_square_local(&q(u * n), &desc).unwrap();
            prop_assert!(s1 ^ s2);
        }

        #[test]
        fn class_matches_squareness(m in -3_000i64..3_000, pi in 0usize..3) {
            prop_assume!(m != 0);
            let p = [2u64, 3, 7][pi];
            let class = square_class_of_int(m, p);
            let ratio = BigRational::new(m.into(), class.representative.into());
            prop_assert!(is_square_local(&ratio, &LocalFieldDesc::base(p)).unwrap());
        }
    }
}
