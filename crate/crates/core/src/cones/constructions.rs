//! Surgery on a convex subgroup and lexicographic extension over a short
//! exact sequence, plus the small subgroup oracles they are used with.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{same_family, Cone, ConeDescriptor, ConeOracle, OrderType, Sign, Subgroup, SubgroupDescriptor, SubgroupOracle};
use crate::elements::{Element, Family, FreeRank, FreeWord};
use crate::error::{Error, Result};

/// The whole group as a (trivially convex) subgroup.
#[derive(Debug)]
pub struct WholeGroup {
    family: Family,
}

impl WholeGroup {
    pub fn new(family: Family) -> Subgroup {
        Arc::new(WholeGroup { family })
    }
}

impl SubgroupOracle for WholeGroup {
    fn family(&self) -> &Family {
        &self.family
    }

    fn contains(&self, g: &Element) -> Result<bool> {
        self.family.check(g)?;
        Ok(true)
    }

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        Some(SubgroupDescriptor::Whole { family: self.family.clone() })
    }

    fn known_members(&self) -> Vec<Element> {
        match self.family {
            Family::Free(FreeRank::Countable) => self.family.generators_window(2),
            _ => self.family.generators().unwrap_or_default(),
        }
    }
}

/// `<x_1, ..., x_keep>` inside the tower group `T_n`.
#[derive(Debug)]
pub struct TowerPrefixSubgroup {
    family: Family,
    keep: usize,
}

impl TowerPrefixSubgroup {
    pub fn new(rank: usize, keep: usize) -> Result<Subgroup> {
        if keep > rank {
            return Err(Error::Precondition(format!("prefix {} longer than tower rank {}", keep, rank)));
        }
        Ok(Arc::new(TowerPrefixSubgroup { family: Family::Tower(rank), keep }))
    }
}

impl SubgroupOracle for TowerPrefixSubgroup {
    fn family(&self) -> &Family {
        &self.family
    }

    fn contains(&self, g: &Element) -> Result<bool> {
        self.family.check(g)?;
        Ok(g.as_tower().unwrap().exponents[self.keep..].iter().all(|&a| a == 0))
    }

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        let Family::Tower(rank) = self.family else { unreachable!() };
        Some(SubgroupDescriptor::TowerPrefix { rank, keep: self.keep })
    }

    fn known_members(&self) -> Vec<Element> {
        self.family.generators().unwrap_or_default().into_iter().take(self.keep).collect()
    }
}

/// Kernel of the retraction that deletes every `x_i` with `i >= split`,
/// i.e. the normal closure of those generators.
#[derive(Debug)]
pub struct FreeKernelSubgroup {
    family: Family,
    split: u32,
}

impl FreeKernelSubgroup {
    pub fn new(family: Family, split: u32) -> Result<Subgroup> {
        if !matches!(family, Family::Free(_)) || split < 1 {
            return Err(Error::Precondition(format!("no retraction kernel at {} in {}", split, family)));
        }
        Ok(Arc::new(FreeKernelSubgroup { family, split }))
    }
}

impl SubgroupOracle for FreeKernelSubgroup {
    fn family(&self) -> &Family {
        &self.family
    }

    fn contains(&self, g: &Element) -> Result<bool> {
        self.family.check(g)?;
        Ok(retract(g.as_free().unwrap(), self.split).is_empty())
    }

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        Some(SubgroupDescriptor::FreeKernel { family: self.family.clone(), split: self.split })
    }

    fn known_members(&self) -> Vec<Element> {
        let k = self.split as i32;
        let mut out = vec![Element::free(&[k])];
        if self.family == Family::Free(FreeRank::Countable) || matches!(self.family, Family::Free(FreeRank::Finite(n)) if n as i32 > k) {
            out.push(Element::free(&[k + 1]));
        }
        if k > 1 {
            out.push(Element::free(&[1, k, -1]));
        }
        out.retain(|g| self.family.check(g).is_ok());
        out
    }
}

fn retract(w: &FreeWord, split: u32) -> FreeWord {
    FreeWord::new(w.letters().iter().copied().filter(|l| l.unsigned_abs() < split))
}

/// Quotient map of a split short exact sequence, together with the
/// identification of its kernel with the family the kernel cone lives on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SesMap {
    /// `Z^k -> Z^m`, one integer row per output coordinate. The kernel cone
    /// is a cone on `Z^k`, consulted only on the kernel.
    ZkCoords { dim: usize, rows: Vec<Vec<i64>> },
    /// `T_n -> T_{n-keep}` forgetting the bottom `keep` exponents.
    TowerQuotient { rank: usize, keep: usize },
    /// `F -> <x_1..x_{split-1}>` deleting the generators `x_i`, `i >= split`.
    FreeRetraction { family: Family, split: u32 },
    /// `B_3 -> Z` by exponent sum; the kernel `[B_3, B_3]` is read as `F_2`.
    BraidExponentSum,
}

impl SesMap {
    pub fn source_family(&self) -> Family {
        match self {
            SesMap::ZkCoords { dim, .. } => Family::Abelian(*dim),
            SesMap::TowerQuotient { rank, .. } => Family::Tower(*rank),
            SesMap::FreeRetraction { family, .. } => family.clone(),
            SesMap::BraidExponentSum => Family::Braid(3),
        }
    }

    pub fn quotient_family(&self) -> Family {
        match self {
            SesMap::ZkCoords { rows, .. } => Family::Abelian(rows.len()),
            SesMap::TowerQuotient { rank, keep } => Family::Tower(rank - keep),
            SesMap::FreeRetraction { family, .. } => family.clone(),
            SesMap::BraidExponentSum => Family::Abelian(1),
        }
    }

    pub fn kernel_family(&self) -> Family {
        match self {
            SesMap::BraidExponentSum => Family::free(2),
            other => other.source_family(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SesMap::ZkCoords { dim, rows } => {
                if rows.is_empty() || rows.iter().any(|r| r.len() != *dim) {
                    return Err(Error::Precondition("projection rows must be nonempty and match the dimension".into()));
                }
            }
            SesMap::TowerQuotient { rank, keep } => {
                if *keep == 0 || keep >= rank {
                    return Err(Error::Precondition(format!("cannot split T_{} at {}", rank, keep)));
                }
            }
            SesMap::FreeRetraction { family, split } => {
                if !matches!(family, Family::Free(_)) || *split < 1 {
                    return Err(Error::Precondition(format!("no retraction at {} on {}", split, family)));
                }
            }
            SesMap::BraidExponentSum => {}
        }
        Ok(())
    }

    pub fn project(&self, g: &Element) -> Result<Element> {
        self.source_family().check(g)?;
        Ok(match (self, g) {
            (SesMap::ZkCoords { rows, .. }, Element::Abelian(v)) => {
                let mut out = Vec::with_capacity(rows.len());
                for r in rows {
                    let mut acc: i64 = 0;
                    for (a, b) in r.iter().zip(&v.coords) {
                        acc = a
                            .checked_mul(*b)
                            .and_then(|p| acc.checked_add(p))
                            .ok_or(Error::Overflow("projection"))?;
                    }
                    out.push(acc);
                }
                Element::vector(&out)
            }
            (SesMap::TowerQuotient { keep, .. }, Element::Tower(t)) => Element::tower(&t.exponents[*keep..]),
            (SesMap::FreeRetraction { split, .. }, Element::Free(w)) => Element::Free(retract(w, *split)),
            (SesMap::BraidExponentSum, Element::Braid(b)) => Element::vector(&[b.exponent_sum()]),
            _ => unreachable!("checked above"),
        })
    }

    /// The kernel element `g` as seen by the kernel cone.
    pub fn into_kernel(&self, g: &Element) -> Result<Element> {
        match (self, g) {
            (SesMap::BraidExponentSum, Element::Braid(b)) => {
                Ok(Element::Free(crate::braid::commutator_subgroup_word(b)?))
            }
            _ => Ok(g.clone()),
        }
    }

    /// Inverse of [`SesMap::into_kernel`].
    pub fn lift_kernel(&self, k: &Element) -> Result<Element> {
        match (self, k) {
            (SesMap::BraidExponentSum, Element::Free(w)) => {
                // c_0 = σ2 σ1^-1, c_1 = σ1 σ2 σ1^-2
                let c = [vec![2, -1], vec![1, 2, -1, -1]];
                let mut letters = Vec::new();
                for &l in w.letters() {
                    let img = &c[l.unsigned_abs() as usize - 1];
                    if l > 0 {
                        letters.extend_from_slice(img);
                    } else {
                        letters.extend(img.iter().rev().map(|x| -x));
                    }
                }
                Ok(Element::braid(3, &letters))
            }
            _ => Ok(k.clone()),
        }
    }

    /// Some nontrivial kernel elements, in the source family.
    pub fn kernel_members(&self) -> Vec<Element> {
        match self {
            SesMap::ZkCoords { dim, rows } => crate::abelian::integer_kernel(rows, *dim)
                .map(|l| l.basis().iter().map(|r| Element::vector(r)).collect())
                .unwrap_or_default(),
            SesMap::TowerQuotient { rank, keep } => {
                Family::Tower(*rank).generators().unwrap_or_default().into_iter().take(*keep).collect()
            }
            SesMap::FreeRetraction { family, split } => FreeKernelSubgroup::new(family.clone(), *split)
                .map(|s| s.known_members())
                .unwrap_or_default(),
            SesMap::BraidExponentSum => vec![Element::braid(3, &[2, -1]), Element::braid(3, &[1, 2, -1, -1])],
        }
    }
}

/// `P' = (P \ (P ∩ C)) ∪ Q`.
#[derive(Debug)]
pub struct SurgeryCone {
    base: Cone,
    convex: Subgroup,
    replacement: Cone,
}

/// Replaces the restriction of `base` to the convex subgroup `convex` by
/// `replacement`. Convexity is the caller's claim; see
/// [`super::check_convex_on_ball`].
pub fn surgery(base: Cone, convex: Subgroup, replacement: Cone) -> Result<Cone> {
    same_family(base.family(), convex.family())?;
    same_family(base.family(), replacement.family())?;
    Ok(Arc::new(SurgeryCone { base, convex, replacement }))
}

impl SurgeryCone {
    pub fn base(&self) -> &Cone {
        &self.base
    }

    pub fn convex(&self) -> &Subgroup {
        &self.convex
    }

    pub fn replacement(&self) -> &Cone {
        &self.replacement
    }
}

impl ConeOracle for SurgeryCone {
    fn family(&self) -> &Family {
        self.base.family()
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        if self.convex.contains(g)? {
            self.replacement.classify(g)
        } else {
            self.base.classify(g)
        }
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::Surgery {
            base: Box::new(self.base.descriptor()?),
            convex: self.convex.descriptor()?,
            replacement: Box::new(self.replacement.descriptor()?),
        })
    }

    // Inside C: a commutator with another member of C, or whatever the
    // replacement offers. Outside C: any positive member of C.
    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        let fam = self.family();
        let members = self.convex.known_members();
        if self.convex.contains(g).ok()? {
            let mut candidates = Vec::new();
            if let Some(h) = self.replacement.analytic_witness(g) {
                candidates.push(h);
            }
            for d in &members {
                let c = fam.commutator(g, d).ok()?;
                candidates.push(c.clone());
                candidates.push(fam.invert(&c).ok()?);
            }
            candidates.into_iter().find(|h| {
                self.convex.contains(h).unwrap_or(false) && is_between(self, h, g).unwrap_or(false)
            })
        } else {
            members.into_iter().find_map(|m| {
                let m = match self.replacement.classify(&m).ok()? {
                    Sign::Positive => m,
                    Sign::Negative => fam.invert(&m).ok()?,
                    Sign::Identity => return None,
                };
                is_between(self, &m, g).ok()?.then_some(m)
            })
        }
    }
}

/// `1 < h < g` for `cone`.
pub(crate) fn is_between(cone: &dyn ConeOracle, h: &Element, g: &Element) -> Result<bool> {
    let fam = cone.family();
    if cone.classify(h)? != Sign::Positive {
        return Ok(false);
    }
    let d = fam.multiply(&fam.invert(h)?, g)?;
    Ok(cone.classify(&d)? == Sign::Positive)
}

/// `P' = i(Q) ∪ q^-1(R)`: the quotient decides first, the kernel breaks ties.
#[derive(Debug)]
pub struct LexCone {
    family: Family,
    kernel: Cone,
    quotient: Cone,
    map: SesMap,
}

pub fn lex_extension(kernel: Cone, quotient: Cone, map: SesMap) -> Result<Cone> {
    map.validate()?;
    same_family(&map.kernel_family(), kernel.family())?;
    same_family(&map.quotient_family(), quotient.family())?;
    Ok(Arc::new(LexCone { family: map.source_family(), kernel, quotient, map }))
}

impl LexCone {
    pub fn kernel(&self) -> &Cone {
        &self.kernel
    }

    pub fn map(&self) -> &SesMap {
        &self.map
    }

    fn in_kernel(&self, g: &Element) -> Result<bool> {
        let q = self.map.project(g)?;
        self.quotient.family().is_identity(&q)
    }
}

impl ConeOracle for LexCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        let q = self.map.project(g)?;
        match self.quotient.classify(&q)? {
            Sign::Identity => self.kernel.classify(&self.map.into_kernel(g)?),
            s => Ok(s),
        }
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        let kernel = Box::new(self.kernel.descriptor()?);
        let quotient = Box::new(self.quotient.descriptor()?);
        if let SesMap::FreeRetraction { split, .. } = self.map {
            return Some(ConeDescriptor::Finfty { split, inner: kernel, outer: quotient });
        }
        Some(ConeDescriptor::LexSes { kernel, quotient, map: self.map.clone() })
    }

    // Positive kernel elements sit below everything positive outside the
    // kernel, so the kernel decides discreteness.
    fn order_type(&self) -> OrderType {
        match self.kernel.order_type() {
            OrderType::Discrete { least, reason } => match self.map.lift_kernel(&least) {
                Ok(l) if self.in_kernel(&l).unwrap_or(false) => {
                    OrderType::Discrete { least: l, reason: format!("least positive of the kernel: {}", reason) }
                }
                _ => OrderType::Unknown,
            },
            OrderType::Dense { reason } => OrderType::Dense { reason: format!("kernel order is dense: {}", reason) },
            OrderType::Unknown => OrderType::Unknown,
        }
    }

    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        if self.in_kernel(g).ok()? {
            let k = self.map.into_kernel(g).ok()?;
            let h = self.kernel.analytic_witness(&k)?;
            return self.map.lift_kernel(&h).ok();
        }
        let fam = &self.family;
        self.map.kernel_members().into_iter().find_map(|m| match self.classify(&m).ok()? {
            Sign::Positive => Some(m),
            Sign::Negative => fam.invert(&m).ok(),
            Sign::Identity => None,
        })
    }
}
