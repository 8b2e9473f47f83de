//! Correspondence between the non-differentiability points of a
//! piecewise-linear function and the root and pole valuations of a rational
//! function it is the ultradiscretization of: checked for a single fraction,
//! and along a whole symbolic orbit in one free coordinate.
//!
//! Invariants: a constant numerator or denominator factor contributes no
//! valuations; a valuation shared by roots and poles is reported as a
//! warning rather than a failure, since the corresponding non-smooth points
//! may cancel in the difference of the two piecewise-linear images.

use std::collections::BTreeMap;

use crate::mapdsl::eval::ExprError;
use crate::mapdsl::transform::ultradiscretize;
use crate::mapdsl::{MapError, RationalMap};
use crate::maxplus::TropicalValue;
use crate::puiseux::{PuiseuxSeries, SeriesError};
use crate::rat::Rat;
use crate::tropcorr::poly::{newton_valuations, PolyError, PuiseuxPoly};
use crate::tropcorr::symfrac::{SymFrac, SymFracs};
use crate::ultra::orbit::{run_pl_orbit, scalar_track, PlSetup, UltraError};
use crate::ultra::pl::{NdPoints, PiecewiseLinearFn};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Ultra(#[from] UltraError),
    #[error("symbolic orbit failed: {0}")]
    Symbolic(#[from] SeriesError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Result of checking one piecewise-linear function against one fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdCheck {
    /// Root valuations of the numerator, with multiplicity.
    pub roots: Vec<(TropicalValue, usize)>,
    /// Root valuations of the denominator, with multiplicity.
    pub poles: Vec<(TropicalValue, usize)>,
    /// Non-differentiability points of the piecewise-linear function.
    pub nd: NdPoints,
    /// Valuations appearing on both sides of the fraction bar; these may
    /// cancel as non-smooth points, so equality is not demanded for them.
    pub shared: Vec<TropicalValue>,
    /// True when every unshared valuation is a non-differentiability point
    /// and every non-differentiability point is a valuation.
    pub matches: bool,
}

fn dedup_values(pairs: &[(TropicalValue, usize)]) -> Vec<TropicalValue> {
    let mut out: Vec<TropicalValue> = pairs.iter().map(|(v, _)| v.clone()).collect();
    out.sort();
    out.dedup();
    out
}

fn nd_as_values(nd: &NdPoints) -> Vec<TropicalValue> {
    let mut out = Vec::with_capacity(nd.finite.len() + 1);
    if nd.minus_infinity {
        out.push(TropicalValue::NegInf);
    }
    out.extend(nd.finite.iter().cloned().map(TropicalValue::Finite));
    out
}

fn check_from_valuations(
    roots: Vec<(TropicalValue, usize)>,
    poles: Vec<(TropicalValue, usize)>,
    nd: NdPoints,
) -> NdCheck {
    let root_values = dedup_values(&roots);
    let pole_values = dedup_values(&poles);
    let shared: Vec<TropicalValue> = root_values
        .iter()
        .filter(|v| pole_values.contains(v))
        .cloned()
        .collect();
    let mut union = root_values;
    union.extend(pole_values);
    union.sort();
    union.dedup();
    let nd_values = nd_as_values(&nd);
    let matches = union
        .iter()
        .filter(|v| !shared.contains(v))
        .all(|v| nd_values.contains(v))
        && nd_values.iter().all(|v| union.contains(v));
    NdCheck {
        roots,
        poles,
        nd,
        shared,
        matches,
    }
}

/// Checks the non-differentiability points of `f` against the root and pole
/// valuations of `num / den`. Constant polynomials contribute no valuations;
/// a zero numerator or denominator is rejected.
pub fn nd_check(
    num: &PuiseuxPoly,
    den: &PuiseuxPoly,
    f: &PiecewiseLinearFn,
) -> Result<NdCheck, PolyError> {
    let roots = poly_valuations(num)?;
    let poles = poly_valuations(den)?;
    Ok(check_from_valuations(roots, poles, f.nd_points()))
}

fn poly_valuations(p: &PuiseuxPoly) -> Result<Vec<(TropicalValue, usize)>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    newton_valuations(p)
}

/// One orbit coordinate at one step: the symbolic fraction, its rendered
/// form, and the check against the piecewise-linear value.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrEntry {
    pub fraction: SymFrac,
    pub rendered: String,
    pub check: NdCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrReport {
    /// Tropical coordinate names.
    pub coords: Vec<String>,
    /// Source name of the free coordinate (the render variable).
    pub free_var: String,
    /// Per computed state, one entry per coordinate.
    pub states: Vec<Vec<CorrEntry>>,
    /// The scalar sequence when the map is a shift in two coordinates.
    pub scalar: Option<Vec<CorrEntry>>,
}

impl CorrReport {
    pub fn all_match(&self) -> bool {
        self.states
            .iter()
            .flatten()
            .all(|e| e.check.matches)
    }
}

#[derive(Debug, Clone)]
pub struct CorrSetup {
    /// Tropical name of the coordinate left free.
    pub free_coord: String,
    /// Tropical values for the remaining coordinates, by tropical name.
    pub initial: BTreeMap<String, TropicalValue>,
    /// Parameter values by alias.
    pub param_values: BTreeMap<String, Rat>,
    pub steps: usize,
}

/// Iterates the map symbolically in the free coordinate, in parallel as
/// piecewise-linear functions and as fractions of polynomials, and checks
/// the correspondence at every step and coordinate.
pub fn nd_correspondence(
    map: &RationalMap,
    setup: &CorrSetup,
) -> Result<CorrReport, CorrError> {
    let tmap = ultradiscretize(map)?;
    let pl_orbit = run_pl_orbit(
        &tmap,
        &PlSetup {
            free_coord: setup.free_coord.clone(),
            initial: setup.initial.clone(),
            param_values: setup.param_values.clone(),
            steps: setup.steps,
        },
    )?;
    let nd_states = pl_orbit.nd_points();

    let dom = SymFracs;
    let params: BTreeMap<String, SymFrac> = map
        .params
        .iter()
        .map(|(src, alias)| {
            let v = setup
                .param_values
                .get(alias)
                .expect("validated by the piecewise-linear run");
            (
                src.clone(),
                SymFrac::constant(PuiseuxSeries::monomial(
                    Rat::from_integer(1.into()),
                    v.clone(),
                )),
            )
        })
        .collect();
    let free_var = map
        .vars
        .iter()
        .zip(&tmap.vars)
        .find(|(_, t)| **t == setup.free_coord)
        .map(|(s, _)| s.clone())
        .expect("validated by the piecewise-linear run");
    let mut state: Vec<SymFrac> = tmap
        .vars
        .iter()
        .map(|t| {
            if *t == setup.free_coord {
                SymFrac::identity()
            } else {
                match &setup.initial[t] {
                    TropicalValue::NegInf => SymFrac::zero(),
                    TropicalValue::Finite(v) => SymFrac::constant(PuiseuxSeries::monomial(
                        Rat::from_integer(1.into()),
                        v.clone(),
                    )),
                }
            }
        })
        .collect();
    let mut sym_states = vec![state.clone()];
    for _ in 0..setup.steps {
        state = map
            .step_in(&dom, &state, &params)
            .map_err(|e| match e {
                ExprError::Domain(e) => CorrError::Symbolic(e),
                ExprError::Unbound(name) => {
                    unreachable!("all names were bound before iterating: {name}")
                }
            })?;
        sym_states.push(state.clone());
    }

    let mut states: Vec<Vec<CorrEntry>> = Vec::with_capacity(sym_states.len());
    for (frs, nds) in sym_states.iter().zip(&nd_states) {
        let mut row = Vec::with_capacity(frs.len());
        for (fr, nd) in frs.iter().zip(nds) {
            row.push(entry(fr, nd.clone(), &free_var)?);
        }
        states.push(row);
    }
    let scalar = tmap.shift_pair().map(|pair| scalar_track(&states, pair));
    Ok(CorrReport {
        coords: tmap.vars.clone(),
        free_var,
        states,
        scalar,
    })
}

fn entry(fr: &SymFrac, nd: NdPoints, var: &str) -> Result<CorrEntry, CorrError> {
    let (roots, poles) = if fr.is_zero() {
        (Vec::new(), Vec::new())
    } else {
        fr.valuations()?
    };
    Ok(CorrEntry {
        fraction: fr.clone(),
        rendered: fr.render(var),
        check: check_from_valuations(roots, poles, nd),
    })
}
