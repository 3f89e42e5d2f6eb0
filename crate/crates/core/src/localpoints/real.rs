//! Real roots via Sturm sequences, exact over Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn derivative(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

fn rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let lead = b.last().expect("nonzero divisor");
    while r.len() >= b.len() && !r.is_empty() {
        let q = r.last().unwrap() / lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &q * c;
        }
        r = trim(r);
    }
    r
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let nonzero: Vec<i32> = signs.filter(|s| *s != 0).collect();
    nonzero.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of a polynomial given in ascending coefficients.
pub fn count_real_roots(ascending: &[i64]) -> usize {
    let p0 = trim(ascending.iter().map(|&c| BigRational::from_integer(c.into())).collect());
    if p0.len() <= 1 {
        return 0;
    }
    let mut seq = vec![p0.clone(), derivative(&p0)];
    loop {
        let n = seq.len();
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let sign = |c: &BigRational| {
        if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        }
    };
    let at_pos_inf = seq.iter().map(|p| sign(p.last().unwrap()));
    let at_neg_inf = seq.iter().map(|p| {
        let s = sign(p.last().unwrap());
        if (p.len() - 1) % 2 == 1 {
            -s
        } else {
            s
        }
    });
    sign_changes(at_neg_inf) - sign_changes(at_pos_inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts() {
        // (x−1)(x−2)(x+3)(x²+1) style checks on small quartics.
        assert_eq!(count_real_roots(&[-1024, 0, 52, 0, -2]), 0);
        assert_eq!(count_real_roots(&[4, 0, -5, 0, 1]), 4); // (x²−1)(x²−4)
        assert_eq!(count_real_roots(&[-1, 0, 0, 0, 1]), 2); // x⁴ − 1
        assert_eq!(count_real_roots(&[1, 0, 0, 0, 1]), 0);
        assert_eq!(count_real_roots(&[-6, 11, -6, 1]), 3); // (x−1)(x−2)(x−3)
    }
}
