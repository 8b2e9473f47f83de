//! The bridge between the series world and the tropical world: root
//! valuations of polynomials over series via the Newton polygon, symbolic
//! orbit fractions in one free coordinate, orbit-by-orbit comparison of
//! valuations against tropical values, and the correspondence between
//! non-differentiability points and root/pole valuations.
//!
//! Invariants: valuations are largest exponents, so the relevant polygon is
//! the upper concave hull; root multisets always carry multiplicities that
//! sum to the degree; indeterminate coefficient valuations are surfaced as
//! errors or explicit window-exhausted entries, never silently compared.

pub mod compare;
pub mod ndcheck;
pub mod poly;
pub mod symfrac;

pub use compare::{
    orbit_compare, CompareError, CompareReport, HaltReason, OrbitHalt, TrackEntry, TrackStatus,
};
pub use ndcheck::{nd_check, nd_correspondence, CorrEntry, CorrError, CorrReport, CorrSetup, NdCheck};
pub use poly::{newton_valuations, trop_roots, PolyError, PuiseuxPoly, TropicalPoly};
pub use symfrac::{SymFrac, SymFracs};
