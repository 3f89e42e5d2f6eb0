//! Independent checks used by the integration suites.

#![allow(dead_code)]

/// Presentation of Q_p(θ) with θ² = sθ + r, written out by hand for each square class.
#[derive(Debug, Clone, Copy)]
pub struct Presentation {
    pub p: i64,
    pub class: i64,
    pub degree: u32,
    pub ramified: bool,
    pub s: i64,
    pub r: i64,
}

/// Every completion that can occur above 2 and 7.
pub fn presentations() -> Vec<Presentation> {
    let mk = |p, class, degree, ramified, s, r| Presentation { p, class, degree, ramified, s, r };
    vec![
        mk(7, 1, 1, false, 0, 0),
        mk(7, 3, 2, false, 0, 3),
        mk(7, 7, 2, true, 0, 7),
        mk(7, 21, 2, true, 0, 21),
        mk(2, 1, 1, false, 0, 0),
        mk(2, 5, 2, false, -1, -1),
        mk(2, 3, 2, true, 2, 2),
        mk(2, 7, 2, true, 2, 6),
        mk(2, 2, 2, true, 0, 2),
        mk(2, 6, 2, true, 0, 6),
        mk(2, 10, 2, true, 0, 10),
        mk(2, 14, 2, true, 0, 14),
    ]
}

fn vp(mut n: i128, p: i128, cap: i64) -> i64 {
    if n == 0 {
        return cap;
    }
    let mut v = 0;
    while n % p == 0 && v < cap {
        n /= p;
        v += 1;
    }
    v
}

/// Arithmetic in O_K / p^prec.
struct Ring {
    pr: Presentation,
    modulus: i128,
    prec: i64,
}

impl Ring {
    fn red(&self, x: (i128, i128)) -> (i128, i128) {
        (x.0.rem_euclid(self.modulus), x.1.rem_euclid(self.modulus))
    }
    fn mul(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        let (s, r) = (self.pr.s as i128, self.pr.r as i128);
        let bd = x.1 * y.1 % self.modulus;
        self.red((x.0 * y.0 + bd * r, x.0 * y.1 + x.1 * y.0 + bd * s))
    }
    fn add(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        self.red((x.0 + y.0, x.1 + y.1))
    }
    /// Normalized valuation, capped at the working precision.
    fn val(&self, x: (i128, i128)) -> i64 {
        let p = self.pr.p as i128;
        let (va, vb) = (vp(x.0, p, self.prec), vp(x.1, p, self.prec));
        match (self.pr.degree, self.pr.ramified) {
            (1, _) => va,
            (_, false) => va.min(vb),
            (_, true) => (2 * va).min(2 * vb + 1),
        }
    }
    fn eval(&self, poly_desc: &[i64], x: (i128, i128)) -> (i128, i128) {
        poly_desc.iter().fold((0, 0), |acc, &c| self.add(self.mul(acc, x), (c as i128, 0)))
    }
}

/// Decides local solvability of Y² = f(X) by searching all (X, Y) modulo π^k, k up to
/// `max_k`. Returns `None` if no depth settles the question.
///
/// Some(true): a solution mod π^k with k > 2·min(v(2Y), v(f'(X))) lifts by Hensel.
/// Some(false): no solution mod π^k in either affine chart.
pub fn brute_force_solvable(f_desc: &[i64], pr: Presentation, max_k: i64) -> Option<bool> {
    let e = if pr.ramified { 2 } else { 1 };
    let rev: Vec<i64> = f_desc.iter().rev().copied().collect();
    let deriv = |poly: &[i64]| -> Vec<i64> {
        let n = poly.len() - 1;
        poly[..n].iter().enumerate().map(|(i, c)| c * (n - i) as i64).collect()
    };
    let (df, dg) = (deriv(f_desc), deriv(&rev));
    for k in 1..=max_k {
        let prec = (k + e - 1) / e + 1;
        let ring = Ring { pr, modulus: (pr.p as i128).pow(prec as u32), prec: prec * e };
        let p = pr.p as i128;
        let (na, nb) = match (pr.degree, pr.ramified) {
            (1, _) => (p.pow(k as u32), 1),
            (_, false) => (p.pow(k as u32), p.pow(k as u32)),
            (_, true) => (p.pow(((k + 1) / 2) as u32), p.pow((k / 2) as u32)),
        };
        let canon = |x: (i128, i128)| (x.0.rem_euclid(na), x.1.rem_euclid(nb));
        let reps: Vec<(i128, i128)> = (0..nb).flat_map(|b| (0..na).map(move |a| (a, b))).collect();
        let mut squares: std::collections::HashMap<(i128, i128), i64> = Default::default();
        for &y in &reps {
            let key = canon(ring.mul(y, y));
            let v2y = ring.val(ring.mul((2, 0), y)).min(k);
            let slot = squares.entry(key).or_insert(v2y);
            *slot = (*slot).min(v2y);
        }
        let mut any = false;
        for (poly, dpoly, need_pi) in [(f_desc, &df, false), (&rev[..], &dg, true)] {
            for &x in &reps {
                if need_pi && ring.val(x) < 1 {
                    continue;
                }
                let key = canon(ring.eval(poly, x));
                if let Some(&v2y) = squares.get(&key) {
                    any = true;
                    let vd = ring.val(ring.eval(dpoly, x)).min(k);
                    if k > 2 * v2y.min(vd) {
                        return Some(true);
                    }
                }
            }
        }
        if !any {
            return Some(false);
        }
    }
    None
}

/// Search depth in powers of π: everything modulo p^12. Points over Q_2 on X^14 first
/// certify modulo 2^11, so p^6 is not deep enough there.
pub fn max_depth(pr: Presentation) -> i64 {
    12 * if pr.ramified { 2 } else { 1 }
}
