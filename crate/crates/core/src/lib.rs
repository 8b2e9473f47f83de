//! Exact arithmetic for tropical (max-plus) dynamics.
//!
//! The crate provides the pieces needed to study how subtraction-free
//! rational maps degenerate into piecewise-linear ones, and how singular
//! behaviour of the former is reflected in non-differentiability of the
//! latter:
//!
//! * [`maxplus`]: the max-plus semiring over exact rationals and a small
//!   expression language evaluated over it.
//! * [`mapdsl`]: a text format for rational maps, the operator-replacement
//!   transform to piecewise-linear maps, and lifts to Puiseux series.
//! * [`puiseux`]: truncated Puiseux series in a single parameter with a
//!   non-archimedean valuation.
//! * [`discrete`]: exact iteration of rational maps through a singular
//!   initial condition, via rational functions of a perturbation.
//! * [`ultra`]: one-sided jets, large-parameter jets, and piecewise-linear
//!   orbit calculus for the piecewise-linear side of the story.
//! * [`tropcorr`]: the bridge between the two worlds: Newton-polygon root
//!   valuations, tropical roots, and orbit comparison.
//!
//! All arithmetic is exact (arbitrary-precision rationals); the only
//! floating-point computation in the crate is the numeric limit check in
//! [`mapdsl::numeric_ud_check`].

pub mod discrete;
pub mod mapdsl;
pub mod maxplus;
pub mod puiseux;
pub mod rat;
pub mod tropcorr;
pub mod ultra;

pub use rat::Rat;
