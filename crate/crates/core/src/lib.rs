//! Exact computation with left-invariant orderings of finitely generated
//! groups.
//!
//! Orderings are given by positive-cone oracles ([`cones::ConeOracle`])
//! on free groups, free abelian groups, the tower groups `T_n` and braid
//! groups. Global properties are checked on finite balls and come back as
//! serializable certificates; families with an analytic description
//! (flag orders, tower cones, Magnus, Dehornoy) also report their order
//! type exactly.

pub mod abelian;
pub mod braid;
pub mod cones;
pub mod elements;
pub mod error;
pub mod realization;
pub mod tower;

pub use cones::{compare, Cone, ConeOracle, Sign, Subgroup, SubgroupOracle};
pub use elements::{Ball, Element, Family, FreeRank};
pub use error::{Error, Result};
