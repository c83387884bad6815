//! Serializable cone and subgroup terms.
//!
//! A document is `{"family": "f:2", "cone": <term>}`; terms are tagged by
//! `"type"`. Printing uses a fixed field order, so `print(parse(s)) == s`
//! for canonically printed `s`.

use serde::{Deserialize, Serialize};

use super::{
    lex_extension, surgery, Cone, FreeKernelSubgroup, SesMap, Subgroup, TowerPrefixSubgroup, WholeGroup,
};
use crate::abelian::{flag_cone, lattice_subgroup, FlagOrder, Lattice, QuadField};
use crate::elements::Family;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConeDescriptor {
    ZkFlag {
        functionals: Vec<Vec<QuadField>>,
    },
    Magnus {
        family: Family,
        degree: u32,
    },
    Dehornoy {
        strands: usize,
    },
    TowerSigns {
        signs: String,
    },
    Surgery {
        base: Box<ConeDescriptor>,
        convex: SubgroupDescriptor,
        replacement: Box<ConeDescriptor>,
    },
    LexSes {
        kernel: Box<ConeDescriptor>,
        quotient: Box<ConeDescriptor>,
        map: SesMap,
    },
    Realization {
        base: Box<ConeDescriptor>,
        k: usize,
        kernel: Box<ConeDescriptor>,
    },
    Finfty {
        split: u32,
        inner: Box<ConeDescriptor>,
        outer: Box<ConeDescriptor>,
    },
    /// Pullback along the automorphism inverting one free generator.
    Flip {
        generator: u32,
        base: Box<ConeDescriptor>,
    },
    /// A cone on `B_m` read on a shifted copy inside `B_strands`.
    BraidShift {
        strands: usize,
        offset: u32,
        inner: Box<ConeDescriptor>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SubgroupDescriptor {
    Whole { family: Family },
    Lattice { dim: usize, basis: Vec<Vec<i64>> },
    Parabolic { strands: usize, from: u32 },
    Stab0 { base: Box<ConeDescriptor>, k: usize },
    FreeKernel { family: Family, split: u32 },
    TowerPrefix { rank: usize, keep: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDocument {
    pub family: Family,
    pub cone: ConeDescriptor,
}

impl ConeDescriptor {
    pub fn build(&self) -> Result<Cone> {
        match self {
            ConeDescriptor::ZkFlag { functionals } => Ok(flag_cone(FlagOrder::new(functionals.clone())?)),
            ConeDescriptor::Magnus { family, degree } => crate::realization::magnus_cone_on(family.clone(), *degree),
            ConeDescriptor::Dehornoy { strands } => crate::braid::dehornoy_cone(*strands),
            ConeDescriptor::TowerSigns { signs } => crate::tower::tower_cone(&crate::tower::SignVector::parse(signs)?),
            ConeDescriptor::Surgery { base, convex, replacement } => {
                surgery(base.build()?, convex.build()?, replacement.build()?)
            }
            ConeDescriptor::LexSes { kernel, quotient, map } => lex_extension(kernel.build()?, quotient.build()?, map.clone()),
            ConeDescriptor::Realization { base, k, kernel } => {
                crate::realization::realization_cone(base.build()?, *k, kernel.build()?)
            }
            ConeDescriptor::Finfty { split, inner, outer } => {
                let outer = outer.build()?;
                let map = SesMap::FreeRetraction { family: outer.family().clone(), split: *split };
                lex_extension(inner.build()?, outer, map)
            }
            ConeDescriptor::Flip { generator, base } => crate::realization::flip_cone(base.build()?, *generator),
            ConeDescriptor::BraidShift { strands, offset, inner } => {
                crate::braid::shifted_braid_cone(*strands, *offset, inner.build()?)
            }
        }
    }
}

impl SubgroupDescriptor {
    pub fn build(&self) -> Result<Subgroup> {
        match self {
            SubgroupDescriptor::Whole { family } => Ok(WholeGroup::new(family.clone())),
            SubgroupDescriptor::Lattice { dim, basis } => Ok(lattice_subgroup(Lattice::from_rows(*dim, basis.clone())?)),
            SubgroupDescriptor::Parabolic { strands, from } => crate::braid::parabolic_subgroup(*strands, *from),
            SubgroupDescriptor::Stab0 { base, k } => crate::realization::stab0_from_base(base.build()?, *k),
            SubgroupDescriptor::FreeKernel { family, split } => FreeKernelSubgroup::new(family.clone(), *split),
            SubgroupDescriptor::TowerPrefix { rank, keep } => TowerPrefixSubgroup::new(*rank, *keep),
        }
    }
}

impl ConeDocument {
    pub fn of(cone: &Cone) -> Result<ConeDocument> {
        let d = cone
            .descriptor()
            .ok_or_else(|| Error::Precondition("this cone has no serializable descriptor".into()))?;
        Ok(ConeDocument { family: cone.family().clone(), cone: d })
    }

    pub fn build(&self) -> Result<Cone> {
        let cone = self.cone.build()?;
        super::same_family(&self.family, cone.family())?;
        Ok(cone)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptors always serialize")
    }

    pub fn from_json(s: &str) -> Result<ConeDocument> {
        serde_json::from_str(s).map_err(|e| {
            let pos = line_col_offset(s, e.line(), e.column());
            Error::parse(pos, e.to_string())
        })
    }
}

fn line_col_offset(s: &str, line: usize, col: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let before: usize = s.split_inclusive('\n').take(line - 1).map(str::len).sum();
    before + col.saturating_sub(1)
}
