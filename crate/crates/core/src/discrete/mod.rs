//! Exact singularity confinement for rational maps.
//!
//! The perturbed coordinate becomes a rational function of a small
//! parameter, the orbit is iterated in the field of such functions, and
//! limits at the origin are read off exactly. No numeric thresholds are
//! involved anywhere: a limit is infinite exactly when the reduced
//! denominator vanishes at the origin, and information loss is equality of
//! exact limit tuples across samples.
//!
//! Invariants:
//! - Rational functions stay in lowest terms with monic denominators, so
//!   orders and limits at the origin are well defined.
//! - Division by a function that is identically zero is reported as an
//!   indeterminate orbit, never silently treated as infinity.

pub mod confine;
pub mod poly;
pub mod ratfn;

pub use confine::{
    run_discrete_confinement, DiscreteError, DiscreteReport, DiscreteSetup, DiscreteStep,
    DiscreteVerdict, PerturbBase, Perturbation,
};
pub use poly::Poly;
pub use ratfn::{ProjLimit, RatFn, RatFnError, RatFns};
