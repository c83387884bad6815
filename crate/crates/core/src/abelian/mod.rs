//! Orderings of free abelian groups `Z^k`.
//!
//! An ordering is a flag of functionals with entries in `Q(√2)`; its convex
//! subgroups are the lattices cut out by successive kernels. The order is
//! discrete exactly when the bottom one is cyclic.

mod approx;
mod flag;
mod lattice;
mod quad;

pub use approx::{
    dense_approximation, discrete_approximation, hyperplane_point, rank_one_convex_construction,
    rational_hyperplane_approx, HyperplaneApprox,
};
pub use flag::{
    classify_flag, flag_cone, is_discrete, lattice_subgroup, min_convex_subgroup, FlagCone, FlagOrder, LatticeSubgroup,
};
pub use lattice::{integer_kernel, Lattice};
pub use quad::{dot, rat, sqrt2_convergent, QuadField};
