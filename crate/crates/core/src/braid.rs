//! Handle reduction, the Dehornoy ordering of `B_n`, its parabolic convex
//! subgroups, and surgery on the top `B_3` copy.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cones::{
    surgery, Cone, ConeDescriptor, ConeOracle, OrderType, Sign, Subgroup, SubgroupDescriptor, SubgroupOracle,
};
use crate::elements::{BraidWord, Element, Family};
use crate::error::{Error, Result};

/// Step budget multiplier: at most `HANDLE_BUDGET_FACTOR * |w|^2` reductions.
pub const HANDLE_BUDGET_FACTOR: usize = 10_000;

/// Classification of a handle-free braid word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaClass {
    Positive(u32),
    Negative(u32),
    Trivial,
}

impl SigmaClass {
    pub fn sign(&self) -> Sign {
        match self {
            SigmaClass::Positive(_) => Sign::Positive,
            SigmaClass::Negative(_) => Sign::Negative,
            SigmaClass::Trivial => Sign::Identity,
        }
    }
}

/// Reduces `w` to an equivalent word without handles, leftmost handle first.
///
/// A `σ_i`-handle is `σ_i^e v σ_i^-e` with `v` free of `σ_j` for `j <= i`.
/// The handle whose right end is leftmost never contains another handle,
/// so each step reduces a permitted handle.
pub fn handle_reduce(w: &BraidWord) -> Result<BraidWord> {
    let n = w.len().max(1);
    handle_reduce_with_budget(w, HANDLE_BUDGET_FACTOR.saturating_mul(n * n))
}

pub fn handle_reduce_with_budget(w: &BraidWord, budget: usize) -> Result<BraidWord> {
    let mut word: Vec<i32> = w.letters().to_vec();
    let mut steps = 0usize;
    let mut q = 0usize;
    while q < word.len() {
        let i = word[q].abs();
        // look left for the first letter of index <= i
        let mut p = q;
        let mut start = None;
        while p > 0 {
            p -= 1;
            let j = word[p].abs();
            if j < i {
                break;
            }
            if j == i {
                if word[p] == -word[q] {
                    start = Some(p);
                }
                break;
            }
        }
        let Some(p) = start else {
            q += 1;
            continue;
        };
        steps += 1;
        if steps > budget {
            return Err(Error::budget(format!("handle reduction of {}", Element::Braid(w.clone())), budget));
        }
        let e = word[p].signum();
        let mut middle = Vec::with_capacity(3 * (q - p));
        for &l in &word[p + 1..q] {
            if l.abs() == i + 1 {
                middle.push(-e * (i + 1));
                middle.push(l.signum() * i);
                middle.push(e * (i + 1));
            } else {
                middle.push(l);
            }
        }
        let mut next = Vec::with_capacity(word.len() + middle.len());
        next.extend_from_slice(&word[..p]);
        next.extend(middle);
        next.extend_from_slice(&word[q + 1..]);
        word = next;
        // nothing left of p changed, so no handle ends before p
        q = p;
    }
    Ok(BraidWord::new(w.strands(), word))
}

/// Class of a handle-free word: decided by its lowest generator.
pub fn sigma_class(reduced: &BraidWord) -> SigmaClass {
    match reduced.min_index() {
        None => SigmaClass::Trivial,
        Some(i) => {
            let positive = reduced.letters().iter().find(|l| l.unsigned_abs() == i).map(|l| *l > 0).unwrap();
            if positive {
                SigmaClass::Positive(i)
            } else {
                SigmaClass::Negative(i)
            }
        }
    }
}

pub fn classify_braid(w: &BraidWord) -> Result<SigmaClass> {
    Ok(sigma_class(&handle_reduce(w)?))
}

/// `u == v` in `B_n`, decided by reducing `u v^-1`.
pub fn braid_equal(u: &BraidWord, v: &BraidWord) -> Result<bool> {
    if u.strands() != v.strands() {
        return Err(Error::mismatch(Family::Braid(u.strands()), Family::Braid(v.strands())));
    }
    if u == v {
        return Ok(true);
    }
    Ok(handle_reduce(&u.mul(&v.inverse()))?.is_empty())
}

/// True when the literal word is `i`-positive for some `i`.
pub fn is_sigma_positive_word(w: &BraidWord) -> bool {
    matches!(sigma_class(w), SigmaClass::Positive(_))
        && w
            .min_index()
            .map(|i| w.letters().iter().filter(|l| l.unsigned_abs() == i).all(|l| *l > 0))
            .unwrap_or(false)
}

#[derive(Debug)]
pub struct DehornoyCone {
    family: Family,
    strands: usize,
}

pub fn dehornoy_cone(strands: usize) -> Result<Cone> {
    if strands < 2 {
        return Err(Error::Precondition("braid groups need at least 2 strands".into()));
    }
    Ok(Arc::new(DehornoyCone { family: Family::Braid(strands), strands }))
}

impl ConeOracle for DehornoyCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        self.family.check(g)?;
        Ok(classify_braid(g.as_braid().unwrap())?.sign())
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::Dehornoy { strands: self.strands })
    }

    // The least positive braid is σ_{n-1}.
    fn order_type(&self) -> OrderType {
        OrderType::Discrete {
            least: Element::braid(self.strands, &[self.strands as i32 - 1]),
            reason: "the Dehornoy ordering is discrete with least element the last generator".into(),
        }
    }

    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        let least = Element::braid(self.strands, &[self.strands as i32 - 1]);
        (!self.family.equal(g, &least).unwrap_or(true)).then_some(least)
    }
}

/// `<σ_r, ..., σ_{n-1}>`, decided on the handle-reduced word.
#[derive(Debug)]
pub struct ParabolicSubgroup {
    family: Family,
    strands: usize,
    from: u32,
}

pub fn parabolic_subgroup(strands: usize, from: u32) -> Result<Subgroup> {
    if from < 1 || from as usize >= strands {
        return Err(Error::Precondition(format!("parabolic index {} out of range for B_{}", from, strands)));
    }
    Ok(Arc::new(ParabolicSubgroup { family: Family::Braid(strands), strands, from }))
}

impl SubgroupOracle for ParabolicSubgroup {
    fn family(&self) -> &Family {
        &self.family
    }

    fn contains(&self, g: &Element) -> Result<bool> {
        self.family.check(g)?;
        let reduced = handle_reduce(g.as_braid().unwrap())?;
        Ok(reduced.min_index().map_or(true, |i| i >= self.from))
    }

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        Some(SubgroupDescriptor::Parabolic { strands: self.strands, from: self.from })
    }

    fn known_members(&self) -> Vec<Element> {
        (self.from as i32..self.strands as i32).map(|i| Element::braid(self.strands, &[i])).collect()
    }
}

/// A cone on `B_m` read on the copy `<σ_{offset+1}, ..., σ_{offset+m-1}>` of
/// `B_n`. Only consulted on members of that copy.
#[derive(Debug)]
pub struct ShiftedBraidCone {
    family: Family,
    offset: u32,
    inner: Cone,
}

pub fn shifted_braid_cone(strands: usize, offset: u32, inner: Cone) -> Result<Cone> {
    let Family::Braid(m) = *inner.family() else {
        return Err(Error::mismatch("braid family", inner.family()));
    };
    if m + offset as usize > strands {
        return Err(Error::Precondition(format!("B_{} does not fit in B_{} at offset {}", m, strands, offset)));
    }
    Ok(Arc::new(ShiftedBraidCone { family: Family::Braid(strands), offset, inner }))
}

impl ShiftedBraidCone {
    fn pull_back(&self, g: &Element) -> Result<Element> {
        self.family.check(g)?;
        let reduced = handle_reduce(g.as_braid().unwrap())?;
        let Family::Braid(m) = *self.inner.family() else { unreachable!() };
        if reduced.min_index().map_or(false, |i| i <= self.offset) {
            return Err(Error::Precondition(format!("{} lies outside the shifted copy", g)));
        }
        Ok(Element::Braid(reduced.shifted(m, -(self.offset as i32))))
    }
}

impl ConeOracle for ShiftedBraidCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        self.inner.classify(&self.pull_back(g)?)
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        let Family::Braid(strands) = self.family else { unreachable!() };
        Some(ConeDescriptor::BraidShift {
            strands,
            offset: self.offset,
            inner: Box::new(self.inner.descriptor()?),
        })
    }
}

/// Replaces the Dehornoy ordering on `<σ_{n-2}, σ_{n-1}> ≅ B_3` by `inner`.
pub fn example_braid_surgery(strands: usize, inner: Cone) -> Result<Cone> {
    if strands < 4 {
        return Err(Error::Precondition("the B_3 surgery needs at least 4 strands".into()));
    }
    if *inner.family() != Family::Braid(3) {
        return Err(Error::mismatch(Family::Braid(3), inner.family()));
    }
    let offset = strands as u32 - 3;
    let base = dehornoy_cone(strands)?;
    let convex = parabolic_subgroup(strands, strands as u32 - 2)?;
    let replacement = shifted_braid_cone(strands, offset, inner)?;
    surgery(base, convex, replacement)
}

/// A cone on `B_3`: lex over the exponent sum, then the Magnus order on the
/// commutator subgroup read as `F_2`.
pub fn b3_lex_magnus_cone() -> Result<Cone> {
    crate::cones::lex_extension(
        crate::realization::magnus_cone(2)?,
        crate::abelian::flag_cone(crate::abelian::FlagOrder::lex(1)),
        crate::cones::SesMap::BraidExponentSum,
    )
}

/// Generator `c_k = σ_1^k σ_2 σ_1^{-k-1}` of `[B_3, B_3]` written in the free
/// basis `c_0 = x1`, `c_1 = x2`, via `c_{k+2} = c_k^-1 c_{k+1}`.
fn commutator_generator(k: i64, cache: &mut std::collections::HashMap<i64, crate::elements::FreeWord>) -> crate::elements::FreeWord {
    use crate::elements::FreeWord;
    if let Some(w) = cache.get(&k) {
        return w.clone();
    }
    let w = match k {
        0 => FreeWord::generator(1),
        1 => FreeWord::generator(2),
        k if k >= 2 => {
            let a = commutator_generator(k - 2, cache).inverse();
            let b = commutator_generator(k - 1, cache);
            a.mul(&b)
        }
        // c_k = c_{k+1} c_{k+2}^-1
        k => {
            let a = commutator_generator(k + 1, cache);
            let b = commutator_generator(k + 2, cache).inverse();
            a.mul(&b)
        }
    };
    cache.insert(k, w.clone());
    w
}

/// Rewrites an element of `[B_3, B_3]` (exponent sum zero) as a word in the
/// free group `F_2` via the Schreier transversal `{σ_1^k}`.
pub fn commutator_subgroup_word(w: &BraidWord) -> Result<crate::elements::FreeWord> {
    use crate::elements::FreeWord;
    if w.strands() != 3 {
        return Err(Error::mismatch(Family::Braid(3), Family::Braid(w.strands())));
    }
    if w.exponent_sum() != 0 {
        return Err(Error::Precondition(format!("{} is not in the commutator subgroup", Element::Braid(w.clone()))));
    }
    let mut cache = std::collections::HashMap::new();
    let mut level = 0i64;
    let mut out = FreeWord::identity();
    for &l in w.letters() {
        match l {
            1 => level += 1,
            -1 => level -= 1,
            2 => {
                out = out.mul(&commutator_generator(level, &mut cache));
                level += 1;
            }
            -2 => {
                out = out.mul(&commutator_generator(level - 1, &mut cache).inverse());
                level -= 1;
            }
            _ => unreachable!("B_3 letters"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Ball;

    fn bw(n: usize, l: &[i32]) -> BraidWord {
        BraidWord::new(n, l.iter().copied())
    }

    #[test]
    fn single_handle_step() {
        let r = handle_reduce(&bw(3, &[1, 2, -1])).unwrap();
        assert_eq!(r.letters(), &[-2, 1, 2]);
        assert!(braid_equal(&r, &bw(3, &[1, 2, -1])).unwrap());
        assert!(handle_reduce(&bw(3, &[1, -1])).unwrap().is_empty());
        assert_eq!(classify_braid(&bw(3, &[-2, 1])).unwrap(), SigmaClass::Positive(1));
    }

    #[test]
    fn braid_relations() {
        assert!(braid_equal(&bw(3, &[1, 2, 1]), &bw(3, &[2, 1, 2])).unwrap());
        assert!(!braid_equal(&bw(3, &[1]), &bw(3, &[2])).unwrap());
        assert!(braid_equal(&bw(4, &[1, 3]), &bw(4, &[3, 1])).unwrap());
        assert!(!braid_equal(&bw(4, &[1, 2]), &bw(4, &[2, 1])).unwrap());
    }

    #[test]
    fn dehornoy_examples() {
        let d = dehornoy_cone(3).unwrap();
        assert_eq!(d.classify(&Element::braid(3, &[1])).unwrap(), Sign::Positive);
        assert_eq!(d.classify(&Element::braid(3, &[-1, 2])).unwrap(), Sign::Negative);
        assert_eq!(d.classify(&Element::braid(3, &[1, 2, 1])).unwrap(), Sign::Positive);
        assert_eq!(d.classify(&Element::braid(3, &[])).unwrap(), Sign::Identity);
    }

    #[test]
    fn parabolic_membership() {
        let c = parabolic_subgroup(4, 2).unwrap();
        assert!(c.contains(&Element::braid(4, &[3])).unwrap());
        assert!(!c.contains(&Element::braid(4, &[1, 2, -1, -2])).unwrap());
        assert!(c.contains(&Element::braid(4, &[])).unwrap());
        // conjugating σ2 by σ1σ2σ1... stays outside
        assert!(!c.contains(&Element::braid(4, &[1])).unwrap());
        assert!(c.contains(&Element::braid(4, &[1, 3, -1])).unwrap());
    }

    #[test]
    fn reduction_preserves_the_element() {
        let b3 = Family::Braid(3);
        let ball = Ball::enumerate(&b3, 3).unwrap();
        for g in ball.iter() {
            for h in ball.iter() {
                let w = g.as_braid().unwrap().mul(h.as_braid().unwrap());
                let r = handle_reduce(&w).unwrap();
                assert!(braid_equal(&r, &w).unwrap());
                assert!(sigma_class(&r) != SigmaClass::Trivial || r.is_empty());
            }
        }
    }

    #[test]
    fn budget_is_loud() {
        let err = handle_reduce_with_budget(&bw(3, &[1, 2, -1]), 0).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn commutator_rewriting_is_a_homomorphism() {
        // [σ1, σ2] = σ1^-1 σ2^-1 σ1 σ2
        let w = bw(3, &[-1, -2, 1, 2]);
        let f = commutator_subgroup_word(&w).unwrap();
        assert!(!f.is_empty());
        // equal braids give equal free words
        let u = bw(3, &[1, 2, 1, -2, -1, -2]);
        assert!(commutator_subgroup_word(&u).unwrap().is_empty());
        assert!(commutator_subgroup_word(&bw(3, &[1])).is_err());
    }
}
