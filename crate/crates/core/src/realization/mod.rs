//! Free groups acting on the line: the Magnus bi-ordering, finite
//! dynamic realizations, the perturbation `ρ_k` and the cones built from
//! it.

mod dynamic;
mod enumeration;
mod magnus;
mod pipeline;
mod pl;

pub use dynamic::{
    ball_extrema, build_f1_f2, choose_ab, dynamic_realization, h1h2, perturb, perturbed_representation, AbChoice,
    BentMaps, Perturbation, PerturbationReport, PerturbedRep, Realization,
};
pub use enumeration::{simplest_between, RationalEnumeration};
pub use magnus::{magnus_cone, magnus_cone_on, magnus_leading_term, monomial_order, MagnusCone, MagnusSeries, DEFAULT_MAGNUS_DEGREE};
pub use pipeline::{
    dense_approximation_free, finfty_approximation, flip_cone, homeo_lex_cone, homeo_lex_decision, realization_cone, soul_surgery,
    stab0_from_base, stab0_subgroup, FinftyApproximation, FlipCone, FreeApproximation, HomeoLexCone, LexDecision,
    Stab0Subgroup,
};
pub use pl::{PLHomeo, SupportInterval};
