//! Step-by-step comparison of a lifted series orbit against the tropical
//! orbit of the ultradiscretized map: at every step the valuation of each
//! series coordinate is checked against the tropical value.
//!
//! Invariants: initial tropical data is the valuation of the initial series,
//! so step zero always agrees; an exact zero on the series side with a
//! finite tropical value is a cancellation, not a divergence; a truncation
//! window too narrow to determine a valuation is reported as exhausted, not
//! silently compared.

use std::collections::BTreeMap;

use crate::mapdsl::eval::ExprError;
use crate::mapdsl::lift::LiftedMap;
use crate::mapdsl::transform::ultradiscretize;
use crate::mapdsl::{MapError, RationalMap};
use crate::maxplus::{eval_trop, Env, EvalError, TropicalValue};
use crate::puiseux::{PuiseuxSeries, SeriesError};
use crate::rat::Rat;
use crate::ultra::orbit::scalar_track;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("expected {expected} initial series, got {got}")]
    InitialCount { expected: usize, got: usize },
    #[error("initial series for `{coord}` has an indeterminate valuation")]
    IndeterminateInitial { coord: String },
}

/// How one series value relates to its tropical counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    /// Valuation and tropical value agree.
    Equal,
    /// Both sides are determinate and disagree.
    Diverged,
    /// The series is exactly zero while the tropical value is finite: a
    /// cancellation the tropical side cannot see.
    Vanished,
    /// The truncation window holds no terms, so the valuation is unknown.
    WindowExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackEntry {
    pub tropical: TropicalValue,
    /// `None` exactly when the window is exhausted.
    pub valuation: Option<TropicalValue>,
    pub status: TrackStatus,
}

/// Why the iteration stopped before the requested horizon.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HaltReason {
    #[error(transparent)]
    Series(SeriesError),
    #[error(transparent)]
    Tropical(EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitHalt {
    /// Index of the first state that could not be computed.
    pub missing_state: usize,
    /// The same point in scalar numbering, when the map is a shift.
    pub missing_scalar: Option<usize>,
    pub reason: HaltReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub coords: Vec<String>,
    /// Per computed state, one entry per coordinate.
    pub states: Vec<Vec<TrackEntry>>,
    /// The scalar sequence when the map is a shift in two coordinates.
    pub scalar: Option<Vec<TrackEntry>>,
    /// First scalar index (state index otherwise) with a divergence.
    pub first_divergence: Option<usize>,
    /// First scalar index (state index otherwise) with a cancellation.
    pub first_cancellation: Option<usize>,
    pub terminated: Option<OrbitHalt>,
}

impl CompareReport {
    pub fn all_equal(&self) -> bool {
        self.first_divergence.is_none()
            && self.first_cancellation.is_none()
            && self.terminated.is_none()
            && self
                .states
                .iter()
                .flatten()
                .all(|e| e.status == TrackStatus::Equal)
    }
}

fn classify(series: &PuiseuxSeries, tropical: &TropicalValue) -> TrackEntry {
    match series.valuation() {
        Err(_) => TrackEntry {
            tropical: tropical.clone(),
            valuation: None,
            status: TrackStatus::WindowExhausted,
        },
        Ok(v) => {
            let status = if v == *tropical {
                TrackStatus::Equal
            } else if v == TropicalValue::NegInf {
                TrackStatus::Vanished
            } else {
                TrackStatus::Diverged
            };
            TrackEntry {
                tropical: tropical.clone(),
                valuation: Some(v),
                status,
            }
        }
    }
}

fn first_with(entries: &[TrackEntry], status: TrackStatus) -> Option<usize> {
    entries.iter().position(|e| e.status == status)
}

fn first_state_with(states: &[Vec<TrackEntry>], status: TrackStatus) -> Option<usize> {
    states
        .iter()
        .position(|st| st.iter().any(|e| e.status == status))
}

/// Runs both orbits side by side for up to `steps` applications of the map.
/// Initial coordinates are series; their valuations seed the tropical orbit.
/// Parameter values are tropical, keyed by alias: the series side lifts each
/// to the unit monomial at that exponent.
pub fn orbit_compare(
    map: &RationalMap,
    initial: &[PuiseuxSeries],
    param_values: &BTreeMap<String, Rat>,
    steps: usize,
    depth: Rat,
) -> Result<CompareReport, CompareError> {
    if initial.len() != map.vars.len() {
        return Err(CompareError::InitialCount {
            expected: map.vars.len(),
            got: initial.len(),
        });
    }
    let tmap = ultradiscretize(map)?;
    let lifted = LiftedMap::new(map, param_values, depth)?;
    let trop_params: Env<TropicalValue> = param_values
        .iter()
        .map(|(k, v)| (k.clone(), TropicalValue::finite(v.clone())))
        .collect();

    let mut s_state: Vec<PuiseuxSeries> = initial.to_vec();
    let mut t_state: Vec<TropicalValue> = Vec::with_capacity(initial.len());
    for (coord, s) in map.vars.iter().zip(initial) {
        t_state.push(
            s.valuation()
                .map_err(|_| CompareError::IndeterminateInitial {
                    coord: coord.clone(),
                })?,
        );
    }

    let shift = tmap.shift_pair();
    let mut states: Vec<Vec<TrackEntry>> = Vec::with_capacity(steps + 1);
    states.push(
        s_state
            .iter()
            .zip(&t_state)
            .map(|(s, t)| classify(s, t))
            .collect(),
    );
    let mut terminated = None;

    for step in 1..=steps {
        let halt = |reason: HaltReason| OrbitHalt {
            missing_state: step,
            missing_scalar: shift.map(|_| step + 1),
            reason,
        };
        let t_next = match step_tropical(&tmap, &t_state, &trop_params) {
            Ok(v) => v,
            Err(e) => {
                terminated = Some(halt(HaltReason::Tropical(e)));
                break;
            }
        };
        let s_next = match lifted.step(&s_state) {
            Ok(v) => v,
            Err(ExprError::Domain(e)) => {
                terminated = Some(halt(HaltReason::Series(e)));
                break;
            }
            Err(ExprError::Unbound(name)) => {
                unreachable!("all names were bound before iterating: {name}")
            }
        };
        t_state = t_next;
        s_state = s_next;
        states.push(
            s_state
                .iter()
                .zip(&t_state)
                .map(|(s, t)| classify(s, t))
                .collect(),
        );
    }

    let scalar = shift.map(|pair| scalar_track(&states, pair));
    let (first_divergence, first_cancellation) = match &scalar {
        Some(track) => (
            first_with(track, TrackStatus::Diverged),
            first_with(track, TrackStatus::Vanished),
        ),
        None => (
            first_state_with(&states, TrackStatus::Diverged),
            first_state_with(&states, TrackStatus::Vanished),
        ),
    };
    Ok(CompareReport {
        coords: map.vars.clone(),
        states,
        scalar,
        first_divergence,
        first_cancellation,
        terminated,
    })
}

fn step_tropical(
    tmap: &crate::mapdsl::TropicalMap,
    state: &[TropicalValue],
    params: &Env<TropicalValue>,
) -> Result<Vec<TropicalValue>, EvalError> {
    let mut env = params.clone();
    for (v, s) in tmap.vars.iter().zip(state) {
        env.insert(v.clone(), s.clone());
    }
    tmap.updates.iter().map(|u| eval_trop(u, &env)).collect()
}
