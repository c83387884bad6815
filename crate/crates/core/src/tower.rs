//! Cones on the tower groups `T_n` (the Klein bottle group is `T_2`) and a
//! brute-force census of partial cones on balls.
//!
//! In the tower model each `<x_1, ..., x_i>` is normal and every ordering
//! makes it convex, so a cone is fixed by the signs `ε_i` of the generators:
//! `(a_1, ..., a_n)` is positive iff `ε_i a_i > 0` at the highest index `i`
//! with `a_i ≠ 0`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cones::{least_positive_on_ball, BallCertificate, Certification, Cone, ConeDescriptor, ConeOracle, OrderType, Sign};
use crate::elements::{Ball, Element, Family};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector {
    signs: Vec<bool>,
}

impl SignVector {
    pub fn new(signs: Vec<bool>) -> Self {
        SignVector { signs }
    }

    /// `+` and `-` characters, one per generator.
    pub fn parse(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '+' => Ok(true),
                '-' => Ok(false),
                _ => Err(Error::parse(i, format!("expected + or -, found `{}`", c))),
            })
            .collect::<Result<Vec<bool>>>()?;
        if signs.is_empty() {
            return Err(Error::parse(0, "empty sign vector"));
        }
        Ok(SignVector { signs })
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// All `2^n` sign vectors, `+...+` first.
    pub fn all(n: usize) -> Vec<SignVector> {
        (0..1usize << n)
            .map(|m| SignVector { signs: (0..n).map(|i| m >> (n - 1 - i) & 1 == 0).collect() })
            .collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s { "+" } else { "-" })?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct TowerCone {
    family: Family,
    signs: SignVector,
}

pub fn tower_cone(signs: &SignVector) -> Result<Cone> {
    if signs.rank() == 0 {
        return Err(Error::Precondition("tower rank must be at least 1".into()));
    }
    Ok(Arc::new(TowerCone { family: Family::Tower(signs.rank()), signs: signs.clone() }))
}

impl TowerCone {
    fn least(&self) -> Element {
        let n = self.signs.rank();
        let mut e = vec![0; n];
        e[0] = if self.signs.signs[0] { 1 } else { -1 };
        Element::tower(&e)
    }
}

impl ConeOracle for TowerCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        self.family.check(g)?;
        let a = &g.as_tower().unwrap().exponents;
        Ok(match a.iter().rposition(|&x| x != 0) {
            None => Sign::Identity,
            Some(i) if (a[i] > 0) == self.signs.signs[i] => Sign::Positive,
            Some(_) => Sign::Negative,
        })
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::TowerSigns { signs: self.signs.to_string() })
    }

    fn order_type(&self) -> OrderType {
        OrderType::Discrete {
            least: self.least(),
            reason: "<x_1> is the bottom convex subgroup and is cyclic".into(),
        }
    }

    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        let least = self.least();
        (*g != least).then_some(least)
    }
}

pub fn enumerate_tower_cones(n: usize) -> Result<Vec<(SignVector, Cone)>> {
    SignVector::all(n).into_iter().map(|s| tower_cone(&s).map(|c| (s, c))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusSurvivor {
    /// Sign of each generator `x_i` under the partial cone.
    pub generator_signs: Vec<Sign>,
    /// The tower cone agreeing with the partial cone on the whole ball.
    pub matches: Option<SignVector>,
}

#[derive(Debug, Clone)]
pub struct Census {
    pub rank: usize,
    pub radius: usize,
    pub ball_size: usize,
    /// Partial cones on the ball before the extension filter.
    pub raw_count: usize,
    pub survivors: Vec<CensusSurvivor>,
}

impl Census {
    pub fn count(&self) -> usize {
        self.survivors.len()
    }
}

/// A variable per pair `{g, g^-1}`; `g ∈ P` is a literal on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit {
    var: usize,
    positive: bool,
}

struct Problem {
    vars: usize,
    lits: Vec<Option<Lit>>,
    /// `¬a ∨ ¬b ∨ c` for `a, b ∈ P ⇒ ab ∈ P`.
    clauses: Vec<[Lit; 3]>,
    watch: Vec<Vec<usize>>,
}

impl Problem {
    fn build(ball: &Ball) -> Result<Problem> {
        let fam = ball.family();
        let members = ball.members();
        let index: HashMap<&Element, usize> = members.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut lits: Vec<Option<Lit>> = vec![None; members.len()];
        let mut vars = 0;
        for i in 1..members.len() {
            if lits[i].is_some() {
                continue;
            }
            let inv = index[&fam.invert(&members[i])?];
            lits[i] = Some(Lit { var: vars, positive: true });
            lits[inv] = Some(Lit { var: vars, positive: false });
            vars += 1;
        }
        let mut clauses = Vec::new();
        for a in 1..members.len() {
            for b in 1..members.len() {
                let p = fam.multiply(&members[a], &members[b])?;
                if let Some(&c) = index.get(&p) {
                    if let (Some(la), Some(lb), Some(lc)) = (lits[a], lits[b], lits[c]) {
                        clauses.push([la, lb, lc]);
                    }
                }
            }
        }
        let mut watch = vec![Vec::new(); vars];
        for (ci, cl) in clauses.iter().enumerate() {
            for l in cl {
                if !watch[l.var].contains(&ci) {
                    watch[l.var].push(ci);
                }
            }
        }
        Ok(Problem { vars, lits, clauses, watch })
    }

    fn holds(l: Lit, assign: &[Option<bool>]) -> Option<bool> {
        assign[l.var].map(|v| v == l.positive)
    }

    fn violated(&self, ci: usize, assign: &[Option<bool>]) -> bool {
        let [a, b, c] = self.clauses[ci];
        Problem::holds(a, assign) == Some(true)
            && Problem::holds(b, assign) == Some(true)
            && Problem::holds(c, assign) == Some(false)
    }

    fn consistent_at(&self, var: usize, assign: &[Option<bool>]) -> bool {
        self.watch[var].iter().all(|&ci| !self.violated(ci, assign))
    }

    /// Every satisfying assignment of the variables `0..upto`, with later
    /// variables left open.
    fn enumerate(&self, upto: usize) -> Vec<Vec<Option<bool>>> {
        let mut out = Vec::new();
        let mut assign = vec![None; self.vars];
        self.enumerate_rec(0, upto, &mut assign, &mut out);
        out
    }

    fn enumerate_rec(&self, var: usize, upto: usize, assign: &mut Vec<Option<bool>>, out: &mut Vec<Vec<Option<bool>>>) {
        if var == upto {
            out.push(assign.clone());
            return;
        }
        for v in [true, false] {
            assign[var] = Some(v);
            if self.consistent_at(var, assign) {
                self.enumerate_rec(var + 1, upto, assign, out);
            }
        }
        assign[var] = None;
    }

    fn extendable(&self, assign: &mut Vec<Option<bool>>, var: usize) -> bool {
        if var == self.vars {
            return true;
        }
        if assign[var].is_some() {
            return self.extendable(assign, var + 1);
        }
        for v in [true, false] {
            assign[var] = Some(v);
            if self.consistent_at(var, assign) && self.extendable(assign, var + 1) {
                assign[var] = None;
                return true;
            }
        }
        assign[var] = None;
        false
    }
}

/// All subsets of `ball(T_n, k)` satisfying trichotomy and closure on the
/// ball that extend to such a subset of `ball(T_n, k+1)`.
pub fn ball_cone_census(n: usize, k: usize) -> Result<Census> {
    let fam = Family::Tower(n);
    let small = Ball::enumerate(&fam, k)?;
    let big = Ball::enumerate(&fam, k + 1)?;
    let p_small = Problem::build(&small)?;
    let p_big = Problem::build(&big)?;
    let partial = p_small.enumerate(p_small.vars);
    let raw_count = partial.len();
    // translate small-ball variables to big-ball variables
    let big_index: HashMap<&Element, usize> = big.members().iter().enumerate().map(|(i, g)| (g, i)).collect();
    let cones = enumerate_tower_cones(n)?;
    let survivors: Vec<Option<CensusSurvivor>> = partial
        .par_iter()
        .map(|assign| -> Result<Option<CensusSurvivor>> {
            let mut seed = vec![None; p_big.vars];
            let mut in_p = Vec::with_capacity(small.len());
            for (i, g) in small.members().iter().enumerate() {
                let member = p_small.lits[i].and_then(|l| Problem::holds(l, assign));
                in_p.push(member);
                if let (Some(m), Some(lb)) = (member, p_big.lits[big_index[g]]) {
                    seed[lb.var] = Some(m == lb.positive);
                }
            }
            let seeded_ok = (0..p_big.vars).all(|v| seed[v].is_none() || p_big.consistent_at(v, &seed));
            if !seeded_ok || !p_big.extendable(&mut seed, 0) {
                return Ok(None);
            }
            let sign_of = |i: usize| match in_p[i] {
                None => Sign::Identity,
                Some(true) => Sign::Positive,
                Some(false) => Sign::Negative,
            };
            let gens = fam.generators()?;
            let generator_signs = gens
                .iter()
                .map(|g| small.position(g).map(|p| p.map_or(Sign::Identity, sign_of)))
                .collect::<Result<Vec<Sign>>>()?;
            let mut matches = None;
            for (s, cone) in &cones {
                let mut agree = true;
                for (i, g) in small.members().iter().enumerate() {
                    if cone.classify(g)? != sign_of(i) {
                        agree = false;
                        break;
                    }
                }
                if agree {
                    matches = Some(s.clone());
                    break;
                }
            }
            Ok(Some(CensusSurvivor { generator_signs, matches }))
        })
        .collect::<Result<_>>()?;
    Ok(Census {
        rank: n,
        radius: k,
        ball_size: small.len(),
        raw_count,
        survivors: survivors.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone)]
pub struct DiscreteReport {
    pub signs: SignVector,
    pub least: Element,
    pub certified: bool,
    pub certificate: BallCertificate,
}

/// For every tower cone, the least positive element on the ball of radius
/// `radius`, certified global by the normal-form argument.
pub fn check_all_discrete_at(n: usize, radius: usize) -> Result<Vec<DiscreteReport>> {
    enumerate_tower_cones(n)?
        .into_iter()
        .map(|(signs, cone)| {
            let lp = least_positive_on_ball(cone.as_ref(), radius)?;
            let least = lp.element.ok_or_else(|| Error::Degenerate("no positive element on the ball".into()))?;
            Ok(DiscreteReport {
                signs,
                least,
                certified: matches!(lp.certification, Certification::Global { .. }),
                certificate: lp.certificate,
            })
        })
        .collect()
}

pub fn check_all_discrete(n: usize) -> Result<Vec<DiscreteReport>> {
    check_all_discrete_at(n, 6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::check_axioms_on_ball;

    #[test]
    fn klein_cone_signs() {
        let c = tower_cone(&SignVector::parse("++").unwrap()).unwrap();
        let y = Element::tower(&[1, 0]);
        let x = Element::tower(&[0, 1]);
        assert_eq!(c.classify(&x).unwrap(), Sign::Positive);
        assert_eq!(c.classify(&y).unwrap(), Sign::Positive);
        assert_eq!(c.classify(&Element::tower(&[-5, 1])).unwrap(), Sign::Positive);
        let d = tower_cone(&SignVector::parse("-+").unwrap()).unwrap();
        assert_eq!(d.classify(&y).unwrap(), Sign::Negative);
    }

    #[test]
    fn cone_counts() {
        for n in 1..=3 {
            let cones = enumerate_tower_cones(n).unwrap();
            assert_eq!(cones.len(), 1 << n);
            // pairwise different on some generator
            let gens = Family::Tower(n).generators().unwrap();
            for i in 0..cones.len() {
                for j in i + 1..cones.len() {
                    assert!(gens.iter().any(|g| cones[i].1.classify(g).unwrap() != cones[j].1.classify(g).unwrap()));
                }
            }
        }
    }

    #[test]
    fn tower_cones_are_cones() {
        for n in 1..=3 {
            for (_, c) in enumerate_tower_cones(n).unwrap() {
                assert!(check_axioms_on_ball(c.as_ref(), 3).unwrap().is_verified());
            }
        }
    }

    #[test]
    fn small_census() {
        let c = ball_cone_census(1, 3).unwrap();
        assert_eq!(c.count(), 2);
        let c = ball_cone_census(2, 2).unwrap();
        assert_eq!(c.count(), 4);
        assert!(c.survivors.iter().all(|s| s.matches.is_some()));
    }

    #[test]
    fn sign_vector_text() {
        assert_eq!(SignVector::parse("+-+").unwrap().to_string(), "+-+");
        assert!(SignVector::parse("+x").is_err());
        assert_eq!(SignVector::all(2).iter().map(|s| s.to_string()).collect::<Vec<_>>(), vec!["++", "+-", "-+", "--"]);
    }
}
