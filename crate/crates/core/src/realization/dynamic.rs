//! Finite stand-ins for the dynamic realization of a free-group ordering
//! and its perturbation `ρ_k`.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::pl::{q, PLHomeo};
use crate::cones::{sort_by_cone, Cone, Sign};
use crate::elements::{Ball, Element, Family, FreeRank, FreeWord};
use crate::error::{Error, Result};

/// `t : ball(F_n, k+1) -> Z` sorted by the cone with `t(1) = 0`, and the
/// generator maps interpolating `t(w) ↦ t(x_i w)`.
#[derive(Debug, Clone)]
pub struct Realization {
    base: Cone,
    rank: u32,
    k: usize,
    sorted: Vec<Element>,
    t: HashMap<Element, i64>,
    generators: Vec<PLHomeo>,
}

fn free_rank(family: &Family) -> Result<u32> {
    match family {
        Family::Free(FreeRank::Finite(n)) => Ok(*n),
        other => Err(Error::mismatch("a free group of finite rank", other)),
    }
}

pub fn dynamic_realization(base: Cone, k: usize) -> Result<Realization> {
    let fam = base.family().clone();
    let n = free_rank(&fam)?;
    let ball = Ball::enumerate(&fam, k + 1)?;
    let mut sorted = ball.members().to_vec();
    sort_by_cone(base.as_ref(), &mut sorted)?;
    let zero = sorted.iter().position(|g| g.is_trivial_form()).expect("the ball contains 1") as i64;
    let t: HashMap<Element, i64> = sorted.iter().enumerate().map(|(i, g)| (g.clone(), i as i64 - zero)).collect();
    let mut generators = Vec::with_capacity(n as usize);
    for i in 1..=n as i32 {
        let x = Element::free(&[i]);
        let mut pts = Vec::new();
        for w in &sorted {
            let xw = fam.multiply(&x, w)?;
            if let Some(&y) = t.get(&xw) {
                pts.push((t[w], y));
            }
        }
        generators.push(PLHomeo::from_integer_points(&pts)?);
    }
    Ok(Realization { base, rank: n, k, sorted, t, generators })
}

impl Realization {
    pub fn base(&self) -> &Cone {
        &self.base
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn radius(&self) -> usize {
        self.k
    }

    pub fn family(&self) -> Family {
        Family::free(self.rank)
    }

    /// `ball(k+1)` in increasing order.
    pub fn sorted(&self) -> &[Element] {
        &self.sorted
    }

    pub fn t(&self, g: &Element) -> Option<i64> {
        self.t.get(g).copied()
    }

    pub fn t_domain(&self) -> &HashMap<Element, i64> {
        &self.t
    }

    /// `ρ(x_i)` for `i = 1..n`.
    pub fn generator_maps(&self) -> &[PLHomeo] {
        &self.generators
    }

    fn letter_map(&self, letter: i32) -> PLHomeo {
        let f = &self.generators[letter.unsigned_abs() as usize - 1];
        if letter > 0 {
            f.clone()
        } else {
            f.inverse()
        }
    }

    /// `ρ(w)(x)` for the unperturbed generator maps.
    pub fn eval(&self, w: &FreeWord, x: &BigRational) -> BigRational {
        eval_word(w, x, |l| self.letter_map(l))
    }
}

fn eval_word(w: &FreeWord, x: &BigRational, map: impl Fn(i32) -> PLHomeo) -> BigRational {
    let mut y = x.clone();
    for &l in w.letters().iter().rev() {
        y = map(l).eval(&y);
    }
    y
}

/// `(g^-, g^+)`: the least and greatest elements of `ball(k)`.
pub fn ball_extrema(r: &Realization) -> (Element, Element) {
    let inside: Vec<&Element> = r.sorted.iter().filter(|g| g.length() <= r.k).collect();
    (inside[0].clone(), inside[inside.len() - 1].clone())
}

/// The generator choices made before building `f_1`, `f_2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbChoice {
    pub g_plus: Element,
    pub g_minus: Element,
    /// `ε_j` for each generator, with `x_j^{ε_j} g^+ > g^+`.
    pub epsilons: Vec<i32>,
    pub j0: u32,
    pub ell: u32,
    pub a: Element,
    pub b: Element,
}

pub fn choose_ab(r: &Realization) -> Result<AbChoice> {
    if r.rank < 2 {
        return Err(Error::Precondition("the perturbation needs at least two generators".into()));
    }
    if r.k < 1 {
        return Err(Error::Precondition("the perturbation needs k >= 1".into()));
    }
    let fam = r.family();
    let (g_minus, g_plus) = ball_extrema(r);
    let tp = r.t[&g_plus];
    let mut epsilons = Vec::with_capacity(r.rank as usize);
    let mut best: Option<(i64, u32)> = None;
    for j in 1..=r.rank as i32 {
        let mut chosen = None;
        for e in [1, -1] {
            let y = fam.multiply(&Element::free(&[e * j]), &g_plus)?;
            let ty = r.t.get(&y).copied().ok_or_else(|| Error::Degenerate(format!("{} is outside the sampled ball", y)))?;
            if ty > tp {
                chosen = Some((e, ty));
            }
        }
        let (e, ty) = chosen.ok_or_else(|| Error::Degenerate(format!("neither x{}^±1 g+ exceeds g+", j)))?;
        epsilons.push(e);
        if best.map_or(true, |(b, _)| ty < b) {
            best = Some((ty, j as u32));
        }
    }
    let j0 = best.unwrap().1;
    let ell = (1..=r.rank).find(|&l| l != j0).unwrap();
    let a = Element::free(&[epsilons[j0 as usize - 1] * j0 as i32]);
    let b = Element::free(&[epsilons[ell as usize - 1] * ell as i32]);
    Ok(AbChoice { g_plus, g_minus, epsilons, j0, ell, a, b })
}

/// `f_1`, `f_2` and the three marked values `g^+(0) < a g^+(0) < b g^+(0)`.
#[derive(Debug, Clone)]
pub struct BentMaps {
    pub f1: PLHomeo,
    pub f2: PLHomeo,
    pub p: BigRational,
    pub ap: BigRational,
    pub bp: BigRational,
}

/// `h` on `(-∞, p]`, then affine with the given slope.
fn bend_after(h: &PLHomeo, p: &BigRational, slope: BigRational) -> Result<PLHomeo> {
    let mut pts: Vec<(BigRational, BigRational)> =
        h.breakpoints().iter().filter(|(x, _)| x < p).cloned().collect();
    pts.push((p.clone(), h.eval(p)));
    PLHomeo::new(pts, h.left_slope().clone(), slope)
}

pub fn build_f1_f2(r: &Realization, choice: &AbChoice) -> Result<BentMaps> {
    let fam = r.family();
    let t_of = |g: &Element| -> Result<BigRational> {
        r.t.get(g).map(|&v| q(v)).ok_or_else(|| Error::Degenerate(format!("{} is outside the sampled ball", g)))
    };
    let p = t_of(&choice.g_plus)?;
    let ap = t_of(&fam.multiply(&choice.a, &choice.g_plus)?)?;
    let bp = t_of(&fam.multiply(&choice.b, &choice.g_plus)?)?;
    if !(p < ap && ap < bp) {
        return Err(Error::Degenerate(format!("marked values out of order: {} {} {}", p, ap, bp)));
    }
    let rho_a = r.letter_map(choice.a.as_free().unwrap().letters()[0]);
    let rho_b = r.letter_map(choice.b.as_free().unwrap().letters()[0]);
    let s1 = (&bp - &ap) / (&ap - &p);
    let f1 = bend_after(&rho_a, &p, s1)?;
    let f1_bp = f1.eval(&bp);
    let s2 = (&f1_bp - &bp) / (&bp - &p);
    let f2 = bend_after(&rho_b, &p, s2)?;
    Ok(BentMaps { f1, f2, p, ap, bp })
}

/// `ρ_k`: the generator maps with `a ↦ f_1` and `b ↦ f_2`.
#[derive(Debug, Clone)]
pub struct PerturbedRep {
    maps: Vec<PLHomeo>,
    inverses: Vec<PLHomeo>,
}

pub fn perturbed_representation(r: &Realization, choice: &AbChoice, bent: &BentMaps) -> PerturbedRep {
    let mut maps = r.generators.clone();
    let assign = |maps: &mut Vec<PLHomeo>, gen: &Element, f: &PLHomeo| {
        let l = gen.as_free().unwrap().letters()[0];
        maps[l.unsigned_abs() as usize - 1] = if l > 0 { f.clone() } else { f.inverse() };
    };
    assign(&mut maps, &choice.a, &bent.f1);
    assign(&mut maps, &choice.b, &bent.f2);
    let inverses = maps.iter().map(|m| m.inverse()).collect();
    PerturbedRep { maps, inverses }
}

impl PerturbedRep {
    pub fn rank(&self) -> u32 {
        self.maps.len() as u32
    }

    pub fn generator_maps(&self) -> &[PLHomeo] {
        &self.maps
    }

    fn letter(&self, l: i32) -> &PLHomeo {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.maps[i]
        } else {
            &self.inverses[i]
        }
    }

    pub fn eval(&self, w: &FreeWord, x: &BigRational) -> BigRational {
        let mut y = x.clone();
        for &l in w.letters().iter().rev() {
            y = self.letter(l).eval(&y);
        }
        y
    }

    pub fn eval_at_zero(&self, w: &FreeWord) -> BigRational {
        self.eval(w, &BigRational::zero())
    }

    pub fn homeo(&self, w: &FreeWord) -> PLHomeo {
        let mut f = PLHomeo::identity();
        for &l in w.letters() {
            f = f.compose(self.letter(l));
        }
        f
    }
}

/// `h_1 = (b g^+)^-1 a^2 g^+` and `h_2 = (a b g^+)^-1 b^2 g^+`.
pub fn h1h2(a: &Element, b: &Element, g_plus: &Element) -> Result<(Element, Element)> {
    let fam = Family::Free(FreeRank::Countable);
    let bg = fam.multiply(b, g_plus)?;
    let abg = fam.multiply(a, &bg)?;
    let h1 = fam.product([&fam.invert(&bg)?, a, a, g_plus])?;
    let h2 = fam.product([&fam.invert(&abg)?, b, b, g_plus])?;
    if h1.is_trivial_form() || h2.is_trivial_form() {
        return Err(Error::Degenerate("h1 or h2 is trivial".into()));
    }
    if fam.commutator(&h1, &h2)?.is_trivial_form() {
        return Err(Error::Degenerate("h1 and h2 commute".into()));
    }
    Ok((h1, h2))
}

/// Every stage of the perturbation for one cone and radius, with the
/// exact checks of conditions (1) and (2).
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub realization: Realization,
    pub choice: AbChoice,
    pub bent: BentMaps,
    pub rep: PerturbedRep,
    pub h1: Element,
    pub h2: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationReport {
    /// `ρ_k(w)(0) = t(w)` for every `w` in `ball(k)`.
    pub agrees_on_ball: bool,
    pub h1_fixes_zero: bool,
    pub h2_fixes_zero: bool,
    pub commutator_nontrivial: bool,
    /// Some `w` in `ball(k+2)` with `ρ_k(w)(0) != ρ(w)(0)`.
    pub moved_witness: Option<Element>,
}

impl PerturbationReport {
    pub fn holds(&self) -> bool {
        self.agrees_on_ball && self.h1_fixes_zero && self.h2_fixes_zero && self.commutator_nontrivial
    }
}

pub fn perturb(base: Cone, k: usize) -> Result<Perturbation> {
    let realization = dynamic_realization(base, k)?;
    let choice = choose_ab(&realization)?;
    let bent = build_f1_f2(&realization, &choice)?;
    let rep = perturbed_representation(&realization, &choice, &bent);
    let (h1, h2) = h1h2(&choice.a, &choice.b, &choice.g_plus)?;
    Ok(Perturbation { realization, choice, bent, rep, h1, h2 })
}

impl Perturbation {
    pub fn radius(&self) -> usize {
        self.realization.k
    }

    pub fn report(&self) -> Result<PerturbationReport> {
        let r = &self.realization;
        let zero = BigRational::zero();
        let agrees_on_ball = r
            .sorted
            .iter()
            .filter(|w| w.length() <= r.k)
            .all(|w| self.rep.eval_at_zero(w.as_free().unwrap()) == q(r.t[w]));
        let h1_fixes_zero = self.rep.eval_at_zero(self.h1.as_free().unwrap()) == zero;
        let h2_fixes_zero = self.rep.eval_at_zero(self.h2.as_free().unwrap()) == zero;
        let fam = r.family();
        let commutator_nontrivial = !fam.commutator(&self.h1, &self.h2)?.is_trivial_form();
        let big = Ball::enumerate(&fam, r.k + 2)?;
        let moved_witness = big
            .iter()
            .find(|w| {
                let w = w.as_free().unwrap();
                self.rep.eval_at_zero(w) != r.eval(w, &zero)
            })
            .cloned();
        Ok(PerturbationReport { agrees_on_ball, h1_fixes_zero, h2_fixes_zero, commutator_nontrivial, moved_witness })
    }

    pub fn sign_at_zero(&self, w: &Element) -> Sign {
        let v = self.rep.eval_at_zero(w.as_free().unwrap());
        Sign::from_ordering(v.cmp(&BigRational::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::compare;
    use crate::realization::magnus_cone;

    #[test]
    fn realization_is_order_embedding() {
        let m = magnus_cone(2).unwrap();
        let r = dynamic_realization(m.clone(), 2).unwrap();
        assert_eq!(r.t(&Element::free(&[])), Some(0));
        for w in r.sorted().windows(2) {
            assert!(r.t(&w[0]).unwrap() < r.t(&w[1]).unwrap());
            assert!(compare(m.as_ref(), &w[0], &w[1]).unwrap().is_lt());
        }
        // ρ(x_i)(t(w)) = t(x_i w) wherever defined
        let fam = Family::free(2);
        for (w, &tw) in r.t_domain() {
            for i in 1..=2 {
                let xw = fam.multiply(&Element::free(&[i]), w).unwrap();
                if let Some(t) = r.t(&xw) {
                    assert_eq!(r.generator_maps()[i as usize - 1].eval_int(tw), q(t));
                }
            }
        }
        for w in r.sorted().iter().filter(|w| w.length() <= 2) {
            let v = r.eval(w.as_free().unwrap(), &BigRational::zero());
            assert_eq!(Sign::from_ordering(v.cmp(&BigRational::zero())), m.classify(w).unwrap());
        }
    }

    #[test]
    fn extrema_at_radius_one() {
        let m = magnus_cone(2).unwrap();
        let r = dynamic_realization(m.clone(), 1).unwrap();
        let (lo, hi) = ball_extrema(&r);
        // x1^-1 x2 = 1 - X1 + X2 + ..., so x2 < x1
        assert_eq!(hi, Element::free(&[1]));
        assert_eq!(lo, Family::free(2).invert(&hi).unwrap());
        let r0 = dynamic_realization(m, 0).unwrap();
        assert_eq!(ball_extrema(&r0), (Element::free(&[]), Element::free(&[])));
    }

    #[test]
    fn bent_maps_hit_marked_points() {
        let p = perturb(magnus_cone(2).unwrap(), 2).unwrap();
        let b = &p.bent;
        assert!(b.p < b.ap && b.ap < b.bp);
        assert_eq!(b.f1.eval(&b.p), b.ap);
        assert_eq!(b.f1.eval(&b.ap), b.bp);
        assert_eq!(b.f2.eval(&b.bp), b.f1.eval(&b.bp));
        assert!(b.f1.eval(&b.bp) > b.bp);
        let rep = p.report().unwrap();
        assert!(rep.holds(), "{:?}", rep);
        assert!(rep.moved_witness.is_some());
    }

    #[test]
    fn choice_is_stable() {
        let a = perturb(magnus_cone(2).unwrap(), 2).unwrap().choice;
        let b = perturb(magnus_cone(2).unwrap(), 2).unwrap().choice;
        assert_eq!(a, b);
        assert_ne!(a.a.as_free().unwrap().letters()[0].abs(), a.b.as_free().unwrap().letters()[0].abs());
    }
}
