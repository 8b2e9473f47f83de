//! Singularity confinement for piecewise-linear (max-plus) maps.
//!
//! Where a rational map meets a singularity at isolated points, its
//! max-plus image loses smoothness on whole regions. This module provides
//! three exact calculi for detecting and tracking that behaviour:
//!
//! - one-sided first-order jets, giving directional derivatives of the
//!   orbit in a perturbation and a differentiability-recovery verdict;
//! - large-parameter jets `c*L + b`, exact for all sufficiently large `L`,
//!   for initial values pushed towards bottom;
//! - symbolic piecewise-linear orbits in one free coordinate, with exact
//!   kink sets (non-differentiability points) per step.
//!
//! Invariants:
//! - Jet maxima agree with scalar maxima on bases; slopes obey one-sided
//!   dominance, so a jet is the exact orbit germ on its side.
//! - Large-jet comparisons are lexicographic, hence valid uniformly in the
//!   tail of the parameter.
//! - Piecewise-linear values stay canonical: every stored breakpoint is a
//!   genuine kink, and evaluation and one-sided slopes are exact.

pub mod jet;
pub mod large;
pub mod orbit;
pub mod pl;

pub use jet::{jet_add, jet_max, jet_scale, jet_sub, Jets, Sign, SignedJet};
pub use large::{large_add, large_max, large_scale, large_sub, LargeJet, LargeJets};
pub use orbit::{
    run_jet_confinement, run_large_orbit, run_pl_orbit, scalar_track, JetPair, JetReport,
    JetSetup, JetStep, LargeOrbit, LargeSetup, PlOrbit, PlSetup, UltraError, UltraVerdict,
};
pub use pl::{NdPoints, PiecewiseLinearFn, PlFunctions, PlValue};
