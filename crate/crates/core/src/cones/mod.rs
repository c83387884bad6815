//! Positive cones as total decidable oracles.
//!
//! A cone `P` on a group `G` splits `G` into `P`, `P^-1` and `{1}` and is
//! closed under products; it induces the left-invariant order `g < h` iff
//! `g^-1 h ∈ P`. Global facts are only ever checked on finite balls, see
//! [`checks`].

pub mod checks;
mod constructions;
mod density;
mod descriptor;

pub use checks::{
    check_axioms, check_axioms_on_ball, check_biinvariance, check_biinvariance_on_ball, check_conradian,
    check_conradian_on_ball, check_convex, check_convex_on_ball, BallCertificate, Property, Verdict, WitnessEntry,
};
pub use constructions::{
    lex_extension, surgery, FreeKernelSubgroup, LexCone, SesMap, SurgeryCone, TowerPrefixSubgroup, WholeGroup,
};
pub use density::{density_witness, least_positive_on_ball, least_positive_on_ball_in, Certification, DensityWitness, LeastPositive, WitnessSource};
pub use descriptor::{ConeDescriptor, ConeDocument, SubgroupDescriptor};

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elements::{Element, Family};
use crate::error::{Error, Result};

/// Three-way classification of a group element by a cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Identity,
    Positive,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Identity => Sign::Identity,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn from_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Identity,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "negative",
            Sign::Identity => "identity",
            Sign::Positive => "positive",
        })
    }
}

/// What is known analytically about the existence of a least positive element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderType {
    Discrete { least: Element, reason: String },
    Dense { reason: String },
    Unknown,
}

pub trait ConeOracle: Send + Sync + fmt::Debug {
    fn family(&self) -> &Family;

    fn classify(&self, g: &Element) -> Result<Sign>;

    /// Serializable description, when the cone is built from shipped pieces.
    fn descriptor(&self) -> Option<ConeDescriptor> {
        None
    }

    fn order_type(&self) -> OrderType {
        OrderType::Unknown
    }

    /// A candidate `h` with `1 < h < g` for positive `g`, derived from the
    /// structure of the cone rather than by search. Callers verify it.
    fn analytic_witness(&self, _g: &Element) -> Option<Element> {
        None
    }
}

pub type Cone = Arc<dyn ConeOracle>;

pub trait SubgroupOracle: Send + Sync + fmt::Debug {
    fn family(&self) -> &Family;

    fn contains(&self, g: &Element) -> Result<bool>;

    fn descriptor(&self) -> Option<SubgroupDescriptor> {
        None
    }

    /// Some nontrivial members, used to build witnesses inside the subgroup.
    fn known_members(&self) -> Vec<Element> {
        Vec::new()
    }
}

pub type Subgroup = Arc<dyn SubgroupOracle>;

/// `g < h` iff `g^-1 h` is positive.
pub fn compare(cone: &dyn ConeOracle, g: &Element, h: &Element) -> Result<Ordering> {
    let fam = cone.family();
    let d = fam.multiply(&fam.invert(g)?, h)?;
    Ok(match cone.classify(&d)? {
        Sign::Positive => Ordering::Less,
        Sign::Negative => Ordering::Greater,
        Sign::Identity => Ordering::Equal,
    })
}

pub(crate) fn same_family(expected: &Family, found: &Family) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::mismatch(expected, found))
    }
}

/// Sorts elements increasingly with respect to `cone`. Errors from the
/// oracle abort the sort.
pub fn sort_by_cone(cone: &dyn ConeOracle, items: &mut [Element]) -> Result<()> {
    let mut err = None;
    items.sort_by(|a, b| match compare(cone, a, b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{flag_cone, FlagOrder};

    #[test]
    fn compare_examples() {
        let lex = flag_cone(FlagOrder::lex(2));
        let g = Element::vector(&[0, 5]);
        assert_eq!(compare(lex.as_ref(), &g, &g).unwrap(), Ordering::Equal);
        assert_eq!(
            compare(lex.as_ref(), &Element::vector(&[0, 5]), &Element::vector(&[1, -100])).unwrap(),
            Ordering::Less
        );
        let d = crate::braid::dehornoy_cone(3).unwrap();
        assert_eq!(
            compare(d.as_ref(), &Element::braid(3, &[]), &Element::braid(3, &[1])).unwrap(),
            Ordering::Less
        );
        assert!(compare(lex.as_ref(), &g, &Element::free(&[1])).is_err());
    }
}
