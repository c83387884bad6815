//! Cones built from a perturbed representation, and the dense
//! approximation pipelines for `F_n` and `F_∞`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use super::dynamic::{perturb, Perturbation, PerturbationReport};
use super::enumeration::RationalEnumeration;
use super::magnus::{magnus_cone, magnus_cone_on, DEFAULT_MAGNUS_DEGREE};
use crate::cones::{
    density_witness, lex_extension, surgery, Cone, ConeDescriptor, ConeOracle, DensityWitness, OrderType, SesMap,
    Sign, Subgroup, SubgroupDescriptor, SubgroupOracle,
};
use crate::elements::{Ball, Element, Family, FreeRank, FreeWord};
use crate::error::{Error, Result};

/// Where a homeomorphism-lex comparison was decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexDecision {
    /// At `r_index` in the rational enumeration.
    Moved { r_index: BigUint, at: BigRational, sign: Sign },
    /// `ρ_k(w)` is the identity map; the kernel cone decides.
    Kernel(Sign),
}

/// `w > 1` iff `ρ_k(w)(r_i) > r_i` at the first enumerated rational moved
/// by `ρ_k(w)`, with the kernel cone on `ker ρ_k`.
#[derive(Debug)]
pub struct HomeoLexCone {
    family: Family,
    perturbation: Arc<Perturbation>,
    kernel: Cone,
}

pub fn homeo_lex_cone(perturbation: Arc<Perturbation>, kernel: Cone) -> Result<Cone> {
    let family = perturbation.realization.family();
    crate::cones::same_family(&family, kernel.family())?;
    Ok(Arc::new(HomeoLexCone { family, perturbation, kernel }))
}

impl HomeoLexCone {
    pub fn decide(&self, g: &Element) -> Result<LexDecision> {
        self.family.check(g)?;
        homeo_lex_decision(&self.perturbation, self.kernel.as_ref(), g)
    }
}

/// How the homeomorphism-lex cone of `perturbation` over `kernel` decides `g`.
pub fn homeo_lex_decision(perturbation: &Perturbation, kernel: &dyn ConeOracle, g: &Element) -> Result<LexDecision> {
    let w = g.as_free().ok_or_else(|| Error::mismatch("a free group", g.family_tag()))?;
    let rep = &perturbation.rep;
    let v0 = rep.eval_at_zero(w);
    if !v0.is_zero() {
        return Ok(LexDecision::Moved {
            r_index: BigUint::zero(),
            at: BigRational::zero(),
            sign: Sign::from_ordering(v0.cmp(&BigRational::zero())),
        });
    }
    let support = rep.homeo(w).support();
    match RationalEnumeration.first_in(&support) {
        None => Ok(LexDecision::Kernel(kernel.classify(g)?)),
        Some((r_index, at, iv)) => Ok(LexDecision::Moved {
            r_index,
            at,
            sign: if iv.sign > 0 { Sign::Positive } else { Sign::Negative },
        }),
    }
}

impl ConeOracle for HomeoLexCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        Ok(match self.decide(g)? {
            LexDecision::Moved { sign, .. } => sign,
            LexDecision::Kernel(s) => s,
        })
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::Realization {
            base: Box::new(self.perturbation.realization.base().descriptor()?),
            k: self.perturbation.radius(),
            kernel: Box::new(self.kernel.descriptor()?),
        })
    }

    fn order_type(&self) -> OrderType {
        OrderType::Unknown
    }
}

/// `ρ_k^-1(Stab(0))`.
#[derive(Debug)]
pub struct Stab0Subgroup {
    family: Family,
    perturbation: Arc<Perturbation>,
}

pub fn stab0_subgroup(perturbation: Arc<Perturbation>) -> Subgroup {
    Arc::new(Stab0Subgroup { family: perturbation.realization.family(), perturbation })
}

impl SubgroupOracle for Stab0Subgroup {
    fn family(&self) -> &Family {
        &self.family
    }

    fn contains(&self, g: &Element) -> Result<bool> {
        self.family.check(g)?;
        Ok(self.perturbation.rep.eval_at_zero(g.as_free().unwrap()).is_zero())
    }

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        Some(SubgroupDescriptor::Stab0 {
            base: Box::new(self.perturbation.realization.base().descriptor()?),
            k: self.perturbation.radius(),
        })
    }

    fn known_members(&self) -> Vec<Element> {
        vec![self.perturbation.h1.clone(), self.perturbation.h2.clone()]
    }
}

/// The homeomorphism-lex cone of the perturbation of `base` at radius `k`,
/// with `kernel` on `ker ρ_k`.
pub fn realization_cone(base: Cone, k: usize, kernel: Cone) -> Result<Cone> {
    homeo_lex_cone(Arc::new(perturb(base, k)?), kernel)
}

pub fn stab0_from_base(base: Cone, k: usize) -> Result<Subgroup> {
    Ok(stab0_subgroup(Arc::new(perturb(base, k)?)))
}

/// `Q' = Q \ (Q ∩ C) ∪ R` with `R` the Magnus cone restricted to `C`.
pub fn soul_surgery(q: Cone, c: Subgroup, n: u32) -> Result<Cone> {
    surgery(q, c, magnus_cone(n)?)
}

#[derive(Debug, Clone)]
pub struct FreeApproximation {
    pub cone: Cone,
    pub homeo_cone: Cone,
    pub stab0: Subgroup,
    pub perturbation: Arc<Perturbation>,
    pub report: PerturbationReport,
    pub required: Vec<Element>,
}

fn check_required(p: &dyn ConeOracle, required: &[Element], k: usize) -> Result<()> {
    for g in required {
        p.family().check(g)?;
        if p.classify(g)? != Sign::Positive {
            return Err(Error::Precondition(format!("{} is not positive for the input cone", g)));
        }
        if g.length() > k {
            return Err(Error::Precondition(format!("{} is longer than k = {}", g, k)));
        }
    }
    Ok(())
}

/// A dense cone containing every element of `required`, obtained from `p`
/// by perturbing its realization at radius `k` and doing surgery on
/// `ρ_k^-1(Stab(0))`.
pub fn dense_approximation_free(p: Cone, required: &[Element], k: usize) -> Result<FreeApproximation> {
    let n = match p.family() {
        Family::Free(FreeRank::Finite(n)) if *n >= 2 => *n,
        other => return Err(Error::mismatch("a free group of rank at least 2", other)),
    };
    if k < 1 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    check_required(p.as_ref(), required, k)?;
    let perturbation = Arc::new(perturb(p.clone(), k)?);
    let report = perturbation.report()?;
    if !report.holds() {
        return Err(Error::Degenerate(format!("perturbation conditions failed: {:?}", report)));
    }
    let homeo_cone = homeo_lex_cone(perturbation.clone(), p)?;
    let stab0 = stab0_subgroup(perturbation.clone());
    for g in required {
        if stab0.contains(g)? {
            return Err(Error::Degenerate(format!("{} lies in the stabilizer of 0", g)));
        }
    }
    let cone = soul_surgery(homeo_cone.clone(), stab0.clone(), n)?;
    Ok(FreeApproximation { cone, homeo_cone, stab0, perturbation, report, required: required.to_vec() })
}

impl FreeApproximation {
    /// The first element of `ball(radius)` where the new cone and `p` differ.
    pub fn disagreement_with(&self, p: &dyn ConeOracle, radius: usize) -> Result<Option<Element>> {
        let ball = Ball::enumerate(self.cone.family(), radius)?;
        for g in ball.iter() {
            if self.cone.classify(g)? != p.classify(g)? {
                return Ok(Some(g.clone()));
            }
        }
        Ok(None)
    }

    /// A density witness for every positive element of `C ∩ ball(radius)`
    /// and for the positive one of `h^±1` for each known member `h` of `C`.
    pub fn stab0_density(&self, radius: usize, search: usize) -> Result<Vec<(Element, Option<DensityWitness>)>> {
        let fam = self.cone.family();
        let ball = Ball::enumerate(fam, radius)?;
        let mut targets = Vec::new();
        for g in ball.iter() {
            if self.stab0.contains(g)? && self.cone.classify(g)? == Sign::Positive {
                targets.push(g.clone());
            }
        }
        for h in self.stab0.known_members() {
            let g = match self.cone.classify(&h)? {
                Sign::Positive => h,
                Sign::Negative => fam.invert(&h)?,
                Sign::Identity => continue,
            };
            if !targets.contains(&g) {
                targets.push(g);
            }
        }
        targets
            .into_iter()
            .map(|g| {
                let w = density_witness(self.cone.as_ref(), &g, search)?;
                Ok((g, w))
            })
            .collect()
    }
}

/// Pullback of a free-group cone along `x_k ↦ x_k^-1`.
#[derive(Debug)]
pub struct FlipCone {
    base: Cone,
    generator: u32,
}

pub fn flip_cone(base: Cone, generator: u32) -> Result<Cone> {
    match base.family() {
        Family::Free(r) if r.admits(generator) => Ok(Arc::new(FlipCone { base, generator })),
        other => Err(Error::Precondition(format!("cannot flip x{} in {}", generator, other))),
    }
}

impl FlipCone {
    fn phi(&self, g: &Element) -> Element {
        let k = self.generator as i32;
        let w = g.as_free().unwrap();
        Element::Free(FreeWord::new(w.letters().iter().map(|&l| if l.abs() == k { -l } else { l })))
    }
}

impl ConeOracle for FlipCone {
    fn family(&self) -> &Family {
        self.base.family()
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        self.family().check(g)?;
        self.base.classify(&self.phi(g))
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::Flip { generator: self.generator, base: Box::new(self.base.descriptor()?) })
    }

    fn order_type(&self) -> OrderType {
        match self.base.order_type() {
            OrderType::Discrete { least, reason } => OrderType::Discrete { least: self.phi(&least), reason },
            other => other,
        }
    }

    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        self.base.analytic_witness(&self.phi(g)).map(|h| self.phi(&h))
    }
}

#[derive(Debug, Clone)]
pub struct FinftyApproximation {
    /// First generator index not occurring in the required elements.
    pub split: u32,
    pub flip: Cone,
    pub dense: Cone,
}

/// For a cone `p` on `F_∞`: the flip at `x_K` and the lex cone over the
/// retraction deleting `x_K, x_{K+1}, ...`, with the Magnus cone on its
/// kernel.
pub fn finfty_approximation(p: Cone, required: &[Element]) -> Result<FinftyApproximation> {
    if *p.family() != Family::Free(FreeRank::Countable) {
        return Err(Error::mismatch(Family::Free(FreeRank::Countable), p.family()));
    }
    for g in required {
        p.family().check(g)?;
    }
    let split = required.iter().map(|g| g.as_free().unwrap().max_index()).max().unwrap_or(0) + 1;
    let flip = flip_cone(p.clone(), split)?;
    let kernel = magnus_cone_on(Family::Free(FreeRank::Countable), DEFAULT_MAGNUS_DEGREE)?;
    let map = SesMap::FreeRetraction { family: Family::Free(FreeRank::Countable), split };
    let dense = lex_extension(kernel, p, map)?;
    Ok(FinftyApproximation { split, flip, dense })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{check_axioms_on_ball, check_convex_on_ball};

    #[test]
    fn homeo_lex_basics() {
        let p = magnus_cone(2).unwrap();
        let pert = Arc::new(perturb(p.clone(), 2).unwrap());
        let q = homeo_lex_cone(pert.clone(), p.clone()).unwrap();
        let c = stab0_subgroup(pert.clone());
        assert!(c.contains(&pert.h1).unwrap());
        assert!(c.contains(&pert.h2).unwrap());
        assert!(c.contains(&Element::free(&[])).unwrap());
        assert!(!c.contains(&pert.choice.g_plus).unwrap());
        assert_eq!(q.classify(&pert.choice.g_plus).unwrap(), Sign::Positive);
        assert!(check_axioms_on_ball(q.as_ref(), 2).unwrap().is_verified());
        assert!(check_convex_on_ball(q.as_ref(), c.as_ref(), 2).unwrap().is_verified());
    }

    #[test]
    fn pipeline_keeps_required_elements() {
        let p = magnus_cone(2).unwrap();
        let req = vec![Element::free(&[1]), Element::free(&[1, 2])];
        let out = dense_approximation_free(p.clone(), &req, 2).unwrap();
        for g in &req {
            assert_eq!(out.cone.classify(g).unwrap(), Sign::Positive);
        }
        let h1 = &out.perturbation.h1;
        assert_eq!(out.cone.classify(h1).unwrap(), p.classify(h1).unwrap());
        assert!(check_axioms_on_ball(out.cone.as_ref(), 2).unwrap().is_verified());
        for (g, w) in out.stab0_density(3, 1).unwrap() {
            assert!(w.is_some(), "no witness below {}", g);
        }
    }

    #[test]
    fn empty_requirement_still_works() {
        let p = magnus_cone(2).unwrap();
        assert!(dense_approximation_free(p, &[], 1).is_ok());
    }

    #[test]
    fn flip_disagrees_only_where_it_should() {
        let p = magnus_cone_on(Family::free_countable(), 3).unwrap();
        let req = vec![Element::free(&[1, -2]), Element::free(&[3])];
        let req: Vec<Element> = req
            .into_iter()
            .map(|g| if p.classify(&g).unwrap() == Sign::Positive { g } else { Family::free_countable().invert(&g).unwrap() })
            .collect();
        let out = finfty_approximation(p.clone(), &req).unwrap();
        assert_eq!(out.split, 4);
        let xk = Element::free(&[4]);
        assert_eq!(out.flip.classify(&xk).unwrap(), p.classify(&xk).unwrap().flip());
        for g in &req {
            assert_eq!(out.flip.classify(g).unwrap(), p.classify(g).unwrap());
            assert_eq!(out.dense.classify(g).unwrap(), Sign::Positive);
        }
    }
}
