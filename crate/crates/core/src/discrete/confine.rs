//! Singularity confinement detection for rational maps, following the
//! classical recipe: perturb one initial coordinate by a small parameter,
//! iterate with exact rational-function arithmetic, and watch the limits.
//!
//! A step is singular when some coordinate's limit is infinite or when the
//! limit tuple no longer distinguishes distinct initial samples (the step
//! forgot its initial data). The singularity is confined when a later step
//! is clean again: all limits finite and the initial data recovered.

use std::collections::BTreeMap;

use crate::discrete::ratfn::{ProjLimit, RatFn, RatFnError, RatFns};
use crate::mapdsl::{ExprError, RationalMap};
use crate::rat::Rat;
use thiserror::Error;

/// Base point approached by the perturbed coordinate: `value + eps`, or
/// `1/eps` for the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerturbBase {
    Rational(Rat),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub coord: String,
    pub base: PerturbBase,
}

/// One confinement run: which coordinate is perturbed, which coordinate
/// carries the distinguishing samples, fixed values for the rest, and the
/// horizon.
#[derive(Debug, Clone)]
pub struct DiscreteSetup {
    pub perturbation: Perturbation,
    pub free_coord: String,
    /// At least two pairwise distinct values of the free coordinate.
    pub samples: Vec<Rat>,
    pub fixed_coords: BTreeMap<String, Rat>,
    /// Parameter values by source name.
    pub param_values: BTreeMap<String, Rat>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscreteError {
    #[error("`{name}` is not a coordinate of the map")]
    UnknownCoordinate { name: String },
    #[error("perturbed and free coordinates must differ (`{name}`)")]
    OverlappingRoles { name: String },
    #[error("need at least two samples to detect information loss")]
    TooFewSamples,
    #[error("duplicate sample value {value}")]
    DuplicateSample { value: Rat },
    #[error("no value given for `{name}`")]
    MissingValue { name: String },
    #[error("orbit indeterminate at step {step} for sample {sample}: division by a function that is identically zero")]
    IndeterminateOrbit { step: usize, sample: Rat },
}

/// State of the orbit after `index` applications of the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteStep {
    pub index: usize,
    /// Limits per sample, then per coordinate.
    pub limits: Vec<Vec<ProjLimit>>,
    /// Some coordinate limit is the point at infinity.
    pub infinite_coord: bool,
    /// The limit tuple is identical for all samples.
    pub info_lost: bool,
}

impl DiscreteStep {
    pub fn singular(&self) -> bool {
        self.infinite_coord || self.info_lost
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiscreteVerdict {
    /// No step in the horizon was singular.
    NeverSingular,
    /// A singular step appeared and a later step was clean again.
    ConfinedAt { entry: usize, recovered: usize },
    /// Singular entry without recovery inside the horizon.
    NotConfinedWithin { entry: usize, steps: usize },
}

#[derive(Debug, Clone)]
pub struct DiscreteReport {
    pub coords: Vec<String>,
    pub samples: Vec<Rat>,
    pub steps: Vec<DiscreteStep>,
    pub verdict: DiscreteVerdict,
}

fn validate(map: &RationalMap, setup: &DiscreteSetup) -> Result<(), DiscreteError> {
    let has = |n: &str| map.vars.iter().any(|v| v == n);
    if !has(&setup.perturbation.coord) {
        return Err(DiscreteError::UnknownCoordinate {
            name: setup.perturbation.coord.clone(),
        });
    }
    if !has(&setup.free_coord) {
        return Err(DiscreteError::UnknownCoordinate {
            name: setup.free_coord.clone(),
        });
    }
    if setup.perturbation.coord == setup.free_coord {
        return Err(DiscreteError::OverlappingRoles {
            name: setup.free_coord.clone(),
        });
    }
    if setup.samples.len() < 2 {
        return Err(DiscreteError::TooFewSamples);
    }
    for (i, s) in setup.samples.iter().enumerate() {
        if setup.samples[..i].contains(s) {
            return Err(DiscreteError::DuplicateSample { value: s.clone() });
        }
    }
    for v in &map.vars {
        if v != &setup.perturbation.coord
            && v != &setup.free_coord
            && !setup.fixed_coords.contains_key(v)
        {
            return Err(DiscreteError::MissingValue { name: v.clone() });
        }
    }
    for (src, _) in &map.params {
        if !setup.param_values.contains_key(src) {
            return Err(DiscreteError::MissingValue { name: src.clone() });
        }
    }
    Ok(())
}

fn initial_state(map: &RationalMap, setup: &DiscreteSetup, sample: &Rat) -> Vec<RatFn> {
    map.vars
        .iter()
        .map(|v| {
            if *v == setup.perturbation.coord {
                match &setup.perturbation.base {
                    PerturbBase::Rational(r) => RatFn::from_rat(r.clone()).add(&RatFn::epsilon()),
                    PerturbBase::Infinity => RatFn::inv_epsilon(),
                }
            } else if *v == setup.free_coord {
                RatFn::from_rat(sample.clone())
            } else {
                RatFn::from_rat(setup.fixed_coords[v].clone())
            }
        })
        .collect()
}

fn observe(index: usize, states: &[Vec<RatFn>]) -> DiscreteStep {
    let limits: Vec<Vec<ProjLimit>> = states
        .iter()
        .map(|st| st.iter().map(|f| f.limit_at_zero()).collect())
        .collect();
    let infinite_coord = limits
        .iter()
        .flatten()
        .any(|l| *l == ProjLimit::Infinity);
    let info_lost = limits.iter().all(|t| *t == limits[0]);
    DiscreteStep {
        index,
        limits,
        infinite_coord,
        info_lost,
    }
}

/// Iterates the perturbed orbit for every sample and classifies each step.
pub fn run_discrete_confinement(
    map: &RationalMap,
    setup: &DiscreteSetup,
) -> Result<DiscreteReport, DiscreteError> {
    validate(map, setup)?;
    let params: BTreeMap<String, RatFn> = setup
        .param_values
        .iter()
        .map(|(k, v)| (k.clone(), RatFn::from_rat(v.clone())))
        .collect();

    let mut states: Vec<Vec<RatFn>> = setup
        .samples
        .iter()
        .map(|s| initial_state(map, setup, s))
        .collect();

    let mut steps = Vec::with_capacity(setup.steps + 1);
    steps.push(observe(0, &states));
    for index in 1..=setup.steps {
        for (si, st) in states.iter_mut().enumerate() {
            *st = map.step_in(&RatFns, st, &params).map_err(|e| match e {
                ExprError::Unbound(name) => DiscreteError::MissingValue { name },
                ExprError::Domain(RatFnError::DivisionByZeroFunction) => {
                    DiscreteError::IndeterminateOrbit {
                        step: index,
                        sample: setup.samples[si].clone(),
                    }
                }
            })?;
        }
        steps.push(observe(index, &states));
    }

    let entry = steps.iter().position(|s| s.singular());
    let verdict = match entry {
        None => DiscreteVerdict::NeverSingular,
        Some(e) => match steps[e + 1..].iter().find(|s| !s.singular()) {
            Some(s) => DiscreteVerdict::ConfinedAt {
                entry: e,
                recovered: s.index,
            },
            None => DiscreteVerdict::NotConfinedWithin {
                entry: e,
                steps: setup.steps,
            },
        },
    };

    Ok(DiscreteReport {
        coords: map.vars.clone(),
        samples: setup.samples.clone(),
        steps,
        verdict,
    })
}
