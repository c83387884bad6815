//! Orderings of `Z^k` given by a flag of `Q(√2)` functionals.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::lattice::Lattice;
use super::quad::{dot, QuadField};
use crate::cones::{Cone, ConeDescriptor, ConeOracle, OrderType, Sign, Subgroup, SubgroupDescriptor, SubgroupOracle};
use crate::elements::{Element, Family};
use crate::error::{Error, Result};

/// `g` is positive iff the first functional not vanishing on `g` is
/// positive on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagOrder {
    dim: usize,
    functionals: Vec<Vec<QuadField>>,
}

impl FlagOrder {
    /// Validates dimensions and totality: the kernels of the functionals
    /// must cut `Z^k` down to zero.
    pub fn new(functionals: Vec<Vec<QuadField>>) -> Result<FlagOrder> {
        let dim = functionals.first().map(Vec::len).ok_or_else(|| Error::InvalidFlag("no functionals".into()))?;
        if dim == 0 {
            return Err(Error::InvalidFlag("dimension zero".into()));
        }
        if let Some(v) = functionals.iter().find(|v| v.len() != dim) {
            return Err(Error::InvalidFlag(format!("functional of length {} in dimension {}", v.len(), dim)));
        }
        let f = FlagOrder { dim, functionals };
        let chain = f.kernel_chain()?;
        let last = chain.last().unwrap();
        if last.rank() != 0 {
            return Err(Error::InvalidFlag(format!(
                "not total: every functional vanishes on {:?}",
                last.basis()[0]
            )));
        }
        Ok(f)
    }

    pub fn lex(dim: usize) -> FlagOrder {
        let rows: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| (i == j) as i64).collect()).collect();
        FlagOrder::from_integer_rows(&rows).expect("standard basis is total")
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<FlagOrder> {
        FlagOrder::new(rows.iter().map(|r| r.iter().map(|&x| QuadField::from_int(x)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn functionals(&self) -> &[Vec<QuadField>] {
        &self.functionals
    }

    pub fn classify(&self, g: &[i64]) -> Result<Sign> {
        if g.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: g.len() });
        }
        for v in &self.functionals {
            match dot(v, g).signum() {
                Ordering::Greater => return Ok(Sign::Positive),
                Ordering::Less => return Ok(Sign::Negative),
                Ordering::Equal => {}
            }
        }
        Ok(Sign::Identity)
    }

    /// `Z^k = L_0 ⊇ L_1 ⊇ ... ⊇ L_m` with `L_i = L_{i-1} ∩ ker v_i`.
    pub fn kernel_chain(&self) -> Result<Vec<Lattice>> {
        let mut chain = vec![Lattice::full(self.dim)];
        for v in &self.functionals {
            let next = chain.last().unwrap().meet_kernel(v)?;
            chain.push(next);
        }
        Ok(chain)
    }

    /// The distinct lattices of the kernel chain: the convex subgroups.
    pub fn convex_chain(&self) -> Result<Vec<Lattice>> {
        let mut out: Vec<Lattice> = Vec::new();
        for l in self.kernel_chain()? {
            if out.last() != Some(&l) {
                out.push(l);
            }
        }
        Ok(out)
    }

    /// Drops functionals that vanish on the lattice they are applied to.
    pub fn normalized(&self) -> FlagOrder {
        let chain = self.kernel_chain().expect("validated flag");
        let functionals = self
            .functionals
            .iter()
            .zip(&chain)
            .filter(|(v, l)| !l.kills(v))
            .map(|(v, _)| v.clone())
            .collect();
        FlagOrder { dim: self.dim, functionals }
    }
}

impl fmt::Display for FlagOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.functionals.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, c) in v.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", c)?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

pub fn classify_flag(f: &FlagOrder, g: &Element) -> Result<Sign> {
    let v = g.as_vector().ok_or_else(|| Error::mismatch(Family::Abelian(f.dim), g.family_tag()))?;
    f.classify(&v.coords)
}

/// The smallest nontrivial convex subgroup: the last nonzero lattice of the
/// kernel chain.
pub fn min_convex_subgroup(f: &FlagOrder) -> Lattice {
    let chain = f.kernel_chain().expect("validated flag");
    chain.into_iter().rev().find(|l| l.rank() > 0).expect("Z^k itself is nonzero")
}

/// The least positive element, when the bottom convex subgroup is cyclic.
pub fn is_discrete(f: &FlagOrder) -> Option<Vec<i64>> {
    let bottom = min_convex_subgroup(f);
    if bottom.rank() != 1 {
        return None;
    }
    let c = bottom.basis()[0].clone();
    match f.classify(&c).expect("dimension matches") {
        Sign::Positive => Some(c),
        _ => Some(c.iter().map(|x| -x).collect()),
    }
}

#[derive(Debug)]
pub struct FlagCone {
    family: Family,
    flag: FlagOrder,
}

pub fn flag_cone(flag: FlagOrder) -> Cone {
    Arc::new(FlagCone { family: Family::Abelian(flag.dim), flag })
}

impl FlagCone {
    pub fn flag(&self) -> &FlagOrder {
        &self.flag
    }

    /// Subtractive Euclid on two independent members of the bottom lattice,
    /// producing positive values of the bottom functional below `target`.
    fn euclid_below(&self, target: &QuadField) -> Option<Vec<i64>> {
        let f = self.flag.normalized();
        let chain = f.kernel_chain().ok()?;
        let level = chain.iter().rposition(|l| l.rank() > 0)?;
        let bottom = &chain[level];
        if bottom.rank() < 2 {
            return None;
        }
        let phi = &f.functionals()[level];
        let mut a = bottom.basis()[0].clone();
        let mut b = bottom.basis()[1].clone();
        let orient = |x: Vec<i64>| if dot(phi, &x).is_negative() { x.iter().map(|c| -c).collect() } else { x };
        a = orient(a);
        b = orient(b);
        for _ in 0..256 {
            let (va, vb) = (dot(phi, &a), dot(phi, &b));
            let (big, small, vbig, vsmall) = if va > vb { (a, b, va, vb) } else { (b, a, vb, va) };
            if vsmall < *target && vsmall.is_positive() {
                return Some(small);
            }
            let q = vbig.div(&vsmall).ok()?.floor();
            let q: i64 = num_traits::ToPrimitive::to_i64(&q)?;
            let next: Option<Vec<i64>> =
                big.iter().zip(&small).map(|(x, y)| q.checked_mul(*y).and_then(|p| x.checked_sub(p))).collect();
            a = small;
            b = next?;
        }
        None
    }
}

impl ConeOracle for FlagCone {
    fn family(&self) -> &Family {
        &self.family
    }

    fn classify(&self, g: &Element) -> Result<Sign> {
        self.family.check(g)?;
        classify_flag(&self.flag, g)
    }

    fn descriptor(&self) -> Option<ConeDescriptor> {
        Some(ConeDescriptor::ZkFlag { functionals: self.flag.functionals.clone() })
    }

    fn order_type(&self) -> OrderType {
        match is_discrete(&self.flag) {
            Some(c) => OrderType::Discrete {
                least: Element::vector(&c),
                reason: "the bottom convex subgroup is cyclic".into(),
            },
            None => OrderType::Dense {
                reason: "the bottom convex subgroup has rank at least 2 and embeds in the line".into(),
            },
        }
    }

    fn analytic_witness(&self, g: &Element) -> Option<Element> {
        let v = &g.as_vector()?.coords;
        let bottom = min_convex_subgroup(&self.flag);
        if !bottom.contains(v) {
            // anything positive in the convex bottom lies below g
            let c = bottom.basis()[0].clone();
            let c = match self.flag.classify(&c).ok()? {
                Sign::Positive => c,
                _ => c.iter().map(|x| -x).collect(),
            };
            return Some(Element::vector(&c));
        }
        let f = self.flag.normalized();
        let chain = f.kernel_chain().ok()?;
        let level = chain.iter().rposition(|l| l.rank() > 0)?;
        let target = dot(&f.functionals()[level], v);
        self.euclid_below(&target).map(|h| Element::vector(&h))
    }
}

/// A sublattice as a subgroup oracle on `Z^k`.
#[derive(Debug)]
pub struct LatticeSubgroup {
    family: Family,
    lattice: Lattice,
}

pub fn lattice_subgroup(lattice: Lattice) -> Subgroup {
    Arc::new(LatticeSubgroup { family: Family::Abelian(lattice.dim()), lattice })
}

impl SubgroupOracle for LatticeSubgroup {
    fn family(&self) -> &Family {
        &self.family
    }

    fn contains(&self, g: &Element) -> Result<bool> {
        self.family.check(g)?;
        Ok(self.lattice.contains(&g.as_vector().unwrap().coords))
    }

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        Some(SubgroupDescriptor::Lattice { dim: self.lattice.dim(), basis: self.lattice.basis().to_vec() })
    }

    fn known_members(&self) -> Vec<Element> {
        self.lattice.basis().iter().map(|r| Element::vector(r)).collect()
    }
}

/// The rational vector `a + r b` for `v = a + b√2`.
pub(crate) fn substitute_sqrt2(v: &[QuadField], r: &BigRational) -> Vec<BigRational> {
    v.iter().map(|c| c.rational_part() + c.irrational_part() * r).collect()
}

pub(crate) fn rational_functional(w: &[BigRational]) -> Vec<QuadField> {
    w.iter().map(|x| QuadField::from_rational(x.clone())).collect()
}

pub(crate) fn unit_functional(dim: usize, i: usize) -> Vec<QuadField> {
    (0..dim)
        .map(|j| if i == j { QuadField::from_rational(BigRational::one()) } else { QuadField::from_rational(BigRational::zero()) })
        .collect()
}
