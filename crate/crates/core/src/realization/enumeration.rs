//! An enumeration `r_0 = 0, r_1, r_2, ...` of the rationals: `0`, then the
//! Calkin–Wilf sequence with each term followed by its negative.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::pl::SupportInterval;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalEnumeration;

/// `m`-th Calkin–Wilf term, `m >= 1`: 1, 1/2, 2, 1/3, 3/2, 2/3, 3, ...
fn calkin_wilf(m: &BigUint) -> BigRational {
    let bits = m.bits();
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for i in (0..bits - 1).rev() {
        if m.bit(i) {
            a = &a + &b;
        } else {
            b = &a + &b;
        }
    }
    BigRational::new(a, b)
}

/// Position of a positive rational in the Calkin–Wilf sequence.
fn calkin_wilf_index(q: &BigRational) -> BigUint {
    let (mut a, mut b) = (q.numer().clone(), q.denom().clone());
    let mut path: Vec<bool> = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if a < b {
            b -= &a;
            path.push(false);
        } else {
            a -= &b;
            path.push(true);
        }
    }
    let mut m = BigUint::one();
    for &bit in path.iter().rev() {
        m <<= 1u32;
        if bit {
            m += 1u32;
        }
    }
    m
}

/// The rational of least denominator (then least numerator) strictly
/// between `lo >= 0` and `hi`; `None` is `+∞`.
pub fn simplest_between(lo: &BigRational, hi: Option<&BigRational>) -> BigRational {
    let n = lo.floor();
    let next = &n + BigRational::one();
    if hi.map_or(true, |h| next < *h) {
        return next;
    }
    let hi = hi.expect("bounded above here");
    // lo, hi in [n, n + 1]
    let lo_frac = lo - &n;
    let hi_frac = hi - &n;
    let inner_lo = hi_frac.recip();
    let inner_hi = if lo_frac.is_zero() { None } else { Some(lo_frac.recip()) };
    n + simplest_between(&inner_lo, inner_hi.as_ref()).recip()
}

impl RationalEnumeration {
    pub fn nth(&self, i: &BigUint) -> BigRational {
        if i.is_zero() {
            return BigRational::zero();
        }
        let (m, odd) = ((i + 1u32) >> 1u32, i.is_odd());
        let r = calkin_wilf(&m);
        if odd {
            r
        } else {
            -r
        }
    }

    pub fn index_of(&self, q: &BigRational) -> BigUint {
        if q.is_zero() {
            return BigUint::zero();
        }
        let m = calkin_wilf_index(&q.abs());
        if q.is_positive() {
            (m << 1u32) - 1u32
        } else {
            m << 1u32
        }
    }

    pub fn first(&self, count: usize) -> Vec<BigRational> {
        (0..count as u64).map(|i| self.nth(&BigUint::from(i))).collect()
    }

    /// The earliest enumerated rational inside one of the intervals, with
    /// its index and the interval holding it.
    pub fn first_in<'a>(&self, intervals: &'a [SupportInterval]) -> Option<(BigUint, BigRational, &'a SupportInterval)> {
        let zero = BigRational::zero();
        let mut best: Option<(BigUint, BigRational, &SupportInterval)> = None;
        for iv in intervals {
            let candidate = if iv.contains(&zero) {
                zero.clone()
            } else if iv.lo.as_ref().map_or(false, |l| *l >= zero) {
                simplest_between(iv.lo.as_ref().unwrap(), iv.hi.as_ref())
            } else {
                // entirely negative
                let lo = -iv.hi.clone().expect("negative side is bounded above");
                let hi = iv.lo.as_ref().map(|l| -l);
                -simplest_between(&lo, hi.as_ref())
            };
            let idx = self.index_of(&candidate);
            if best.as_ref().map_or(true, |b| idx < b.0) {
                best = Some((idx, candidate, iv));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn opening_terms() {
        let e = RationalEnumeration;
        let got = e.first(9);
        let want = vec![r(0, 1), r(1, 1), r(-1, 1), r(1, 2), r(-1, 2), r(2, 1), r(-2, 1), r(1, 3), r(-1, 3)];
        assert_eq!(got, want);
    }

    #[test]
    fn index_round_trip() {
        let e = RationalEnumeration;
        for i in 0u32..2000 {
            let i = BigUint::from(i);
            assert_eq!(e.index_of(&e.nth(&i)), i);
        }
    }

    #[test]
    fn no_repeats_in_prefix() {
        let mut seen = std::collections::HashSet::new();
        for q in RationalEnumeration.first(3000) {
            assert!(seen.insert(q));
        }
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&r(0, 1), None), r(1, 1));
        assert_eq!(simplest_between(&r(5, 2), Some(&r(3, 1))), r(8, 3));
        assert_eq!(simplest_between(&r(1, 3), Some(&r(1, 2))), r(2, 5));
        assert_eq!(simplest_between(&r(7, 1), Some(&r(8, 1))), r(15, 2));
        assert_eq!(simplest_between(&r(0, 1), Some(&r(1, 100))), r(1, 101));
    }

    // scan the enumeration directly and compare with the closed form
    #[test]
    fn first_in_matches_scan() {
        let e = RationalEnumeration;
        let cases = vec![
            vec![SupportInterval { lo: Some(r(1, 3)), hi: Some(r(1, 2)), sign: 1 }],
            vec![
                SupportInterval { lo: Some(r(-3, 1)), hi: Some(r(-5, 2)), sign: -1 },
                SupportInterval { lo: Some(r(3, 1)), hi: Some(r(7, 2)), sign: 1 },
            ],
            vec![SupportInterval { lo: None, hi: Some(r(-4, 1)), sign: 1 }],
        ];
        let prefix = e.first(4000);
        for ivs in cases {
            let (idx, q, _) = e.first_in(&ivs).unwrap();
            let scan = prefix.iter().position(|x| ivs.iter().any(|iv| iv.contains(x))).unwrap();
            assert_eq!(idx, BigUint::from(scan));
            assert_eq!(q, prefix[scan]);
        }
    }
}
