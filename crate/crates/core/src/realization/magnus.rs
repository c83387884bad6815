//! The Magnus bi-ordering of free groups.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cones::{Cone, ConeDescriptor, ConeOracle, OrderType, Sign};
use crate::elements::{default_budget, Element, Family, FreeRank, FreeWord};
use crate::error::{Error, Result};

pub const DEFAULT_MAGNUS_DEGREE: u32 = 4;

/// A truncated noncommutative power series in `X_1, X_2, ...`, the image
/// of a free group element under `x_i ↦ 1 + X_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusSeries {
    degree: u32,
    coeffs: HashMap<Vec<u32>, BigInt>,
}

impl MagnusSeries {
    pub fn one(degree: u32) -> MagnusSeries {
        let mut coeffs = HashMap::new();
        coeffs.insert(Vec::new(), BigInt::one());
        MagnusSeries { degree, coeffs }
    }

    /// Expansion of `w` truncated above `degree`.
    pub fn expand(w: &FreeWord, degree: u32, budget: usize) -> Result<MagnusSeries> {
        let mut s = MagnusSeries::one(degree);
        for &l in w.letters() {
            s.mul_letter(l);
            if s.coeffs.len() > budget {
                return Err(Error::budget(format!("Magnus expansion to degree {}", degree), budget));
            }
        }
        Ok(s)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficient(&self, monomial: &[u32]) -> BigInt {
        self.coeffs.get(monomial).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Right multiplication by `1 + X_i` or by `(1 + X_i)^-1 = Σ (-X_i)^p`.
    fn mul_letter(&mut self, letter: i32) {
        let x = letter.unsigned_abs();
        let d = self.degree as usize;
        let mut next: HashMap<Vec<u32>, BigInt> = HashMap::with_capacity(self.coeffs.len() * 2);
        for (m, c) in &self.coeffs {
            *next.entry(m.clone()).or_insert_with(BigInt::zero) += c;
            let mut mono = m.clone();
            let mut sign = true;
            while mono.len() < d {
                mono.push(x);
                if letter < 0 {
                    sign = !sign;
                }
                let e = next.entry(mono.clone()).or_insert_with(BigInt::zero);
                if sign {
                    *e += c;
                } else {
                    *e -= c;
                }
                if letter > 0 {
                    break;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        self.coeffs = next;
    }

    /// The first nonzero coefficient of `self - 1` in degree-then-lex order.
    pub fn leading_term(&self) -> Option<(Vec<u32>, BigInt)> {
        self.coeffs
            .iter()
            .filter(|(m, _)| !m.is_empty())
            .min_by(|a, b| monomial_order(a.0, b.0))
            .map(|(m, c)| (m.clone(), c.clone()))
    }
}

pub fn monomial_order(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Leading monomial and coefficient of `w`, doubling the truncation degree
/// from `start` until one appears.
pub fn magnus_leading_term(w: &FreeWord, start: u32) -> Result<Option<(Vec<u32>, BigInt)>> {
    if w.is_empty() {
        return Ok(None);
    }
    let budget = default_budget();
    let mut d = start.max(1);
    loop {
        let s = MagnusSeries::expand(w, d, budget)?;
        if let Some(t) = s.leading_term() {
            return Ok(Some(t));
        }
        // a nontrivial word of length L has a nonzero term of degree <= L
        if d as usize >= w.len() {
            return Err(Error::Degenerate(format!("no Magnus term up to degree {} for a reduced word", d)));
        }
        d = d.saturating_mul(2);
    }
}

#[derive(Debug)]
pub struct MagnusCone {
    family: Family,
    degree: u32,
}

pub fn magnus_cone(n: u32) -> Result<Cone> {
    magnus_cone_on(Family::free(n), DEFAULT_MAGNUS_DEGREE)
}

pub fn magnus_cone_on(family: Family, degree: u32) -> Result<Cone> {
    match family {
        Family::Free(FreeRank::Finite(n)) if n >= 1 => {}
        Family::Free(FreeRank::Countable) => {}
        other => return Err(Error::mismatch("a free group", other)),
    }
    Ok(Arc::new(MagnusCone { family, degree: degree.max(1) }))
}

impl MagnusCone {
    fn rank(&self) -> Option<u32> {
        match self.family {
            Family::Free(FreeRank::Finite(n)) => Some(n),
            _ => None,
        }
    }
}

impl ConeOracle for MagnusCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        self.family.check(g)?;
        Ok(match magnus_leading_term(g.as_free().unwrap(), self.degree)? {
            None => Sign::Identity,
            Some((_, c)) if c.is_positive() => Sign::Positive,
            Some(_) => Sign::Negative,
        })
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::Magnus { family: self.family.clone(), degree: self.degree })
    }

    fn order_type(&self) -> OrderType {
        match self.rank() {
            Some(1) => OrderType::Discrete { least: Element::free(&[1]), reason: "the order on Z = F_1".into() },
            _ => OrderType::Dense {
                reason: "commutators with a generator have higher Magnus degree and lie below".into(),
            },
        }
    }

    /// `[g, x_j]^{±1}` for the first generator not commuting with `g`.
    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        let w = g.as_free()?;
        let top = match self.rank() {
            Some(1) => return None,
            Some(n) => n,
            None => w.max_index() + 1,
        };
        for j in 1..=top {
            let x = Element::free(&[j as i32]);
            let c = self.family.commutator(g, &x).ok()?;
            if c.is_trivial_form() {
                continue;
            }
            return match self.classify(&c).ok()? {
                Sign::Positive => Some(c),
                Sign::Negative => self.family.invert(&c).ok(),
                Sign::Identity => None,
            };
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent oracle: multiply full factor series, no in-place update
    fn naive_expand(letters: &[i32], d: usize) -> HashMap<Vec<u32>, i64> {
        let mut acc: HashMap<Vec<u32>, i64> = HashMap::from([(vec![], 1)]);
        for &l in letters {
            let x = l.unsigned_abs();
            let mut factor: Vec<(Vec<u32>, i64)> = vec![(vec![], 1)];
            for p in 1..=d {
                let c = if l > 0 {
                    if p == 1 {
                        1
                    } else {
                        0
                    }
                } else if p % 2 == 0 {
                    1
                } else {
                    -1
                };
                if c != 0 {
                    factor.push((vec![x; p], c));
                }
            }
            let mut next = HashMap::new();
            for (m, c) in &acc {
                for (f, e) in &factor {
                    if m.len() + f.len() <= d {
                        let mut k = m.clone();
                        k.extend(f);
                        *next.entry(k).or_insert(0) += c * e;
                    }
                }
            }
            next.retain(|_, c| *c != 0);
            acc = next;
        }
        acc
    }

    #[test]
    fn expansion_matches_naive_product() {
        let words: &[&[i32]] = &[&[1], &[-1, -2, 1, 2], &[1, 1, -2, 3, -1], &[-2, -2, -2, 1]];
        for w in words {
            let fw = FreeWord::new(w.iter().copied());
            let s = MagnusSeries::expand(&fw, 5, 1 << 20).unwrap();
            let naive = naive_expand(fw.letters(), 5);
            assert_eq!(s.coeffs.len(), naive.len());
            for (m, c) in naive {
                assert_eq!(s.coefficient(&m), BigInt::from(c), "word {:?} monomial {:?}", w, m);
            }
        }
    }

    #[test]
    fn generator_and_commutator_signs() {
        let m = magnus_cone(2).unwrap();
        assert_eq!(m.classify(&Element::free(&[1])).unwrap(), Sign::Positive);
        assert_eq!(m.classify(&Element::free(&[-1])).unwrap(), Sign::Negative);
        let c = Element::free(&[-1, -2, 1, 2]);
        assert_eq!(m.classify(&c).unwrap(), Sign::Positive);
        let (mono, coeff) = magnus_leading_term(c.as_free().unwrap(), 1).unwrap().unwrap();
        assert_eq!((mono, coeff), (vec![1, 2], BigInt::one()));
        assert_eq!(m.classify(&Element::free(&[])).unwrap(), Sign::Identity);
    }

    #[test]
    fn commutator_lies_below_generator() {
        let m = magnus_cone(2).unwrap();
        let x1 = Element::free(&[1]);
        let h = m.analytic_witness(&x1).unwrap();
        assert_eq!(h, Element::free(&[-1, -2, 1, 2]));
        assert!(crate::cones::compare(m.as_ref(), &h, &x1).unwrap().is_lt());
    }

    #[test]
    fn deep_commutators_need_higher_degree() {
        // [[x1, x2], x1] starts in degree 3, beyond a degree-1 start
        let f = Family::free(2);
        let c = f.commutator(&Element::free(&[1]), &Element::free(&[2])).unwrap();
        let cc = f.commutator(&c, &Element::free(&[1])).unwrap();
        let (mono, _) = magnus_leading_term(cc.as_free().unwrap(), 1).unwrap().unwrap();
        assert_eq!(mono.len(), 3);
    }

    #[test]
    fn countable_rank() {
        let m = magnus_cone_on(Family::free_countable(), 3).unwrap();
        assert_eq!(m.classify(&Element::free(&[40])).unwrap(), Sign::Positive);
        let g = Element::free(&[3, 7]);
        let h = m.analytic_witness(&g).unwrap();
        assert!(crate::cones::compare(m.as_ref(), &h, &g).unwrap().is_lt());
    }
}
