use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::field::{completion_kind, square_class_of_int, Elt, LocalField, LocalFieldDesc, SquareClass};
use super::real::count_real_roots;
use super::{x14_model, LocalError, QuadraticFieldSpec, QuarticModel};
use crate::arith::PrimeSieve;
use crate::exec::{ordered_map, Exec};
use crate::rational::ExactRational;

pub const DENSITY_SCHEMA_VERSION: u32 = 1;

/// A completion of a number field, up to isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Completion {
    Real,
    Complex,
    PAdic(LocalFieldDesc),
}

/// Whether Y² = f(X) has a point (affine or at infinity) over the given completion.
pub fn locally_solvable(model: &QuarticModel, completion: &Completion) -> Result<bool, LocalError> {
    match completion {
        Completion::Complex => Ok(true),
        Completion::Real => Ok(model.coefficients[0] > 0 || count_real_roots(&model.ascending()) > 0),
        Completion::PAdic(desc) => DiscSearch::new(model, *desc).run(),
    }
}

/// Exhaustive search over residue discs with Hensel certification.
///
/// A disc x0 + π^k O is settled when the Taylor expansion of f at x0 shows that f has constant
/// square class on it, or when Newton's method from x0 converges to a root of f (which is a
/// point with Y = 0). Otherwise it is split into its residue subdiscs.
struct DiscSearch {
    field: LocalField,
    affine: Vec<Elt>,
    reversed: Vec<Elt>,
    max_depth: i64,
}

impl DiscSearch {
    fn new(model: &QuarticModel, desc: LocalFieldDesc) -> Self {
        let field = LocalField::new(desc);
        let ascending: Vec<Elt> = model.ascending().into_iter().map(Elt::from_int).collect();
        let reversed = ascending.iter().rev().cloned().collect();
        let disc = model.discriminant_value();
        let e = i64::from(desc.ramification_index);
        let v_disc = e * super::field::vp_int(&disc, desc.p);
        DiscSearch { field, affine: ascending, reversed, max_depth: v_disc + 4 * e + 2 }
    }

    fn run(&self) -> Result<bool, LocalError> {
        // |X| ≤ 1, then X = 1/T with T ∈ πO (T = 0 being the points at infinity).
        Ok(self.search(&self.affine, &Elt::zero(), 0)? || self.search(&self.reversed, &Elt::zero(), 1)?)
    }

    /// Coefficients of f(x0 + Z) in ascending powers of Z.
    fn taylor(&self, poly: &[Elt], x0: &Elt) -> Vec<Elt> {
        let n = poly.len();
        let mut powers = vec![Elt::from_int(1)];
        for _ in 1..n {
            powers.push(self.field.mul(powers.last().unwrap(), x0));
        }
        (0..n)
            .map(|i| {
                (i..n).fold(Elt::zero(), |acc, j| {
                    let term = self.field.mul(&poly[j], &powers[j - i]);
                    acc.add(&term.scale(&BigRational::from_integer(BigInt::from(binomial(j, i)))))
                })
            })
            .collect()
    }

    fn search(&self, poly: &[Elt], x0: &Elt, k: i64) -> Result<bool, LocalError> {
        let f = &self.field;
        let c = self.taylor(poly, x0);
        let Some(v) = f.valuation(&c[0]) else {
            return Ok(true);
        };
        let spread = c
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(i, ci)| f.valuation(ci).map(|vi| vi + i as i64 * k))
            .min();
        if let Some(w) = spread {
            if w > v {
                // Every value on the disc has valuation v.
                if v % 2 != 0 {
                    return Ok(false);
                }
                if w - v >= f.square_depth() {
                    return f.is_square(&c[0]);
                }
            }
        }
        if let Some(v1) = f.valuation(&c[1]) {
            if v > 2 * v1 {
                return Ok(true);
            }
        }
        if k >= self.max_depth {
            return Err(LocalError::PrecisionExhausted { field: f.desc().to_string(), depth: k });
        }
        let step = f.pow(f.uniformizer(), k as u32);
        for t in f.residue_reps() {
            let x = x0.add(&f.mul(&step, t));
            if self.search(poly, &x, k + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceVerdict {
    /// "inf" or the rational prime below the place.
    pub below: String,
    pub completion: Completion,
    /// Number of places of Q(√m) above `below` sharing this completion.
    pub places: u32,
    pub solvable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalVerdict {
    pub m: i64,
    pub solvable: bool,
    pub places: Vec<PlaceVerdict>,
    pub other_places: String,
}

fn breakdown_with(
    model: &QuarticModel,
    k: QuadraticFieldSpec,
    mut solve: impl FnMut(&Completion) -> Result<bool, LocalError>,
) -> Result<LocalVerdict, LocalError> {
    let mut places = Vec::new();
    let archimedean = if k.is_imaginary() { (Completion::Complex, 1) } else { (Completion::Real, 2) };
    places.push(PlaceVerdict {
        below: "inf".into(),
        completion: archimedean.0,
        places: archimedean.1,
        solvable: solve(&archimedean.0)?,
    });
    for &p in &model.bad_primes {
        let desc = completion_kind(k.m(), p);
        let completion = Completion::PAdic(desc);
        places.push(PlaceVerdict {
            below: p.to_string(),
            completion,
            places: if desc.kind == super::CompletionKind::Split { 2 } else { 1 },
            solvable: solve(&completion)?,
        });
    }
    Ok(LocalVerdict {
        m: k.m(),
        solvable: places.iter().all(|pv| pv.solvable),
        places,
        other_places: "good reduction: points over every completion".into(),
    })
}

/// Per-place local solvability of `model` over Q(√m).
pub fn local_breakdown(model: &QuarticModel, k: QuadraticFieldSpec) -> Result<LocalVerdict, LocalError> {
    breakdown_with(model, k, |c| locally_solvable(model, c))
}

/// Whether X^14 has points over every completion of Q(√m).
pub fn everywhere_locally(k: QuadraticFieldSpec) -> Result<bool, LocalError> {
    Ok(local_breakdown(&x14_model(), k)?.solvable)
}

/// Local solvability of a model over every completion that can occur at its bad places,
/// computed once so that verdicts for many m are table lookups.
#[derive(Debug, Clone)]
pub struct LocalOracle {
    model: QuarticModel,
    table: HashMap<Completion, bool>,
}

impl LocalOracle {
    pub fn new(model: QuarticModel) -> Result<Self, LocalError> {
        let mut table = HashMap::new();
        for c in [Completion::Real, Completion::Complex] {
            table.insert(c, locally_solvable(&model, &c)?);
        }
        for &p in &model.bad_primes {
            for class in SquareClass::all(p) {
                let c = Completion::PAdic(LocalFieldDesc::from_class(class));
                table.insert(c, locally_solvable(&model, &c)?);
            }
        }
        Ok(LocalOracle { model, table })
    }

    pub fn x14() -> Result<Self, LocalError> {
        Self::new(x14_model())
    }

    pub fn model(&self) -> &QuarticModel {
        &self.model
    }

    pub fn breakdown(&self, k: QuadraticFieldSpec) -> LocalVerdict {
        breakdown_with(&self.model, k, |c| Ok(self.table[c])).expect("table lookups cannot fail")
    }

    pub fn solvable(&self, k: QuadraticFieldSpec) -> bool {
        self.breakdown(k).solvable
    }

    /// The table itself, sorted for stable output.
    pub fn entries(&self) -> Vec<(Completion, bool)> {
        let mut v: Vec<_> = self.table.iter().map(|(c, s)| (*c, *s)).collect();
        v.sort_by_key(|(c, _)| format!("{c:?}"));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub m: i64,
    pub oracle: bool,
    pub predicate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub negative: bool,
    /// Square-class representatives of m at each bad prime, in `bad_primes` order.
    pub classes: Vec<i64>,
    pub count: u64,
    pub solvable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceDensity {
    pub label: String,
    pub value: ExactRational,
    pub predicate_distance: ExactRational,
    pub oracle_distance: ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub schema_version: u32,
    pub bound: u64,
    pub count_squarefree: u64,
    pub count_solvable: u64,
    /// Oracle ratio count_solvable / count_squarefree.
    pub ratio: ExactRational,
    pub predicate_count: u64,
    /// Ratio for the predicate m < 0 and 7 ∤ m.
    pub predicate_ratio: ExactRational,
    pub references: Vec<ReferenceDensity>,
    pub class_table: Vec<ClassRow>,
    /// True when the oracle is constant on each (sign, square classes at bad primes) cell.
    pub class_function_holds: bool,
    pub mismatches: Vec<Mismatch>,
}

/// The predicate m < 0 and 7 ∤ m.
pub fn negative_prime_to_seven(m: i64) -> bool {
    m < 0 && m % 7 != 0
}

/// Scans squarefree m with 0 < |m| ≤ bound, m ≠ 1, comparing the oracle with the predicate.
pub fn density_scan(bound: u64, exec: Exec) -> Result<DensityReport, LocalError> {
    let oracle = LocalOracle::x14()?;
    let sieve = PrimeSieve::new(bound.max(1));
    let mut fields = Vec::new();
    for k in (1..=bound).rev() {
        if sieve.squarefree(k).is_some() {
            fields.push(QuadraticFieldSpec::new(-(k as i64))?);
        }
    }
    for k in 2..=bound {
        if sieve.squarefree(k).is_some() {
            fields.push(QuadraticFieldSpec::new(k as i64)?);
        }
    }
    let bad = oracle.model().bad_primes.clone();
    let rows = ordered_map(&fields, exec, |k| {
        let classes: Vec<i64> = bad.iter().map(|&p| square_class_of_int(k.m(), p).representative).collect();
        (k.m(), oracle.solvable(*k), negative_prime_to_seven(k.m()), classes)
    });

    let total = rows.len() as u64;
    let solvable = rows.iter().filter(|r| r.1).count() as u64;
    let predicate = rows.iter().filter(|r| r.2).count() as u64;
    let mismatches: Vec<Mismatch> = rows
        .iter()
        .filter(|r| r.1 != r.2)
        .map(|r| Mismatch { m: r.0, oracle: r.1, predicate: r.2 })
        .collect();

    let mut cells: BTreeMap<(bool, Vec<i64>), (u64, bool, bool)> = BTreeMap::new();
    for (m, s, _, classes) in &rows {
        let cell = cells.entry((*m < 0, classes.clone())).or_insert((0, *s, true));
        cell.0 += 1;
        cell.2 &= cell.1 == *s;
    }
    let class_function_holds = cells.values().all(|c| c.2);
    let class_table = cells
        .into_iter()
        .map(|((negative, classes), (count, solvable, _))| ClassRow { negative, classes, count, solvable })
        .collect();

    let ratio = ExactRational::new(solvable as i128, total.max(1) as i128);
    let predicate_ratio = ExactRational::new(predicate as i128, total.max(1) as i128);
    let distance = |a: ExactRational, b: ExactRational| {
        let d = a.checked_sub(&b).expect("small rationals");
        if d.numer() < 0 {
            ExactRational::new(-d.numer(), d.denom())
        } else {
            d
        }
    };
    let references = [
        ("naive residue count (1/2)(6/7)", ExactRational::new(3, 7)),
        ("squarefree-conditioned (1/2)(7/8)", ExactRational::new(7, 16)),
        ("alternative squarefree estimate", ExactRational::new(41, 96)),
    ]
    .into_iter()
    .map(|(label, value)| ReferenceDensity {
        label: label.into(),
        value,
        predicate_distance: distance(predicate_ratio, value),
        oracle_distance: distance(ratio, value),
    })
    .collect();

    Ok(DensityReport {
        schema_version: DENSITY_SCHEMA_VERSION,
        bound,
        count_squarefree: total,
        count_solvable: solvable,
        ratio,
        predicate_count: predicate,
        predicate_ratio,
        references,
        class_table,
        class_function_holds,
        mismatches,
    })
}
