//! Orbit calculi for tropical maps: two-sided jet orbits with a
//! differentiability verdict, large-parameter orbits, and symbolic
//! piecewise-linear orbits in one free coordinate.

use std::collections::BTreeMap;

use crate::mapdsl::TropicalMap;
use crate::maxplus::{eval_trop_in, Env, EvalError, TropDomain, TropExpr, TropicalValue};
use crate::rat::Rat;
use crate::ultra::jet::{Jets, Sign, SignedJet};
use crate::ultra::large::{LargeJet, LargeJets};
use crate::ultra::pl::{NdPoints, PlFunctions, PlValue};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UltraError {
    #[error("`{name}` is not a coordinate of the map")]
    UnknownCoordinate { name: String },
    #[error("no value given for `{name}`")]
    MissingValue { name: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn step_state<D: TropDomain>(
    dom: &D,
    map: &TropicalMap,
    state: &[D::Value],
    params: &Env<D::Value>,
) -> Result<Vec<D::Value>, EvalError> {
    let mut env = params.clone();
    for (v, s) in map.vars.iter().zip(state) {
        env.insert(v.clone(), s.clone());
    }
    map.updates
        .iter()
        .map(|u| eval_trop_in(dom, u, &env))
        .collect()
}

fn validate_bindings(
    map: &TropicalMap,
    special: &str,
    initial: &BTreeMap<String, TropicalValue>,
    param_values: &BTreeMap<String, Rat>,
) -> Result<(), UltraError> {
    if !map.vars.iter().any(|v| v == special) {
        return Err(UltraError::UnknownCoordinate {
            name: special.to_string(),
        });
    }
    for v in &map.vars {
        if v != special && !initial.contains_key(v) {
            return Err(UltraError::MissingValue { name: v.clone() });
        }
    }
    for p in &map.params {
        if !param_values.contains_key(p) {
            return Err(UltraError::MissingValue { name: p.clone() });
        }
    }
    Ok(())
}

/// Extracts the scalar sequence from a state orbit when the map carries a
/// shift structure: coordinate `i` is updated to coordinate `j`, so the
/// states are windows of one scalar sequence. Returns scalars
/// `0..=states.len()`.
pub fn scalar_track<T: Clone>(states: &[Vec<T>], pair: (usize, usize)) -> Vec<T> {
    let (i, j) = pair;
    let mut out = Vec::with_capacity(states.len() + 1);
    if let Some(first) = states.first() {
        out.push(first[i].clone());
    }
    for s in states {
        out.push(s[j].clone());
    }
    out
}

impl TropicalMap {
    /// Coordinate pair `(i, j)` with update `vars[i]' = vars[j]`, if any.
    pub fn shift_pair(&self) -> Option<(usize, usize)> {
        for (i, u) in self.updates.iter().enumerate() {
            if let TropExpr::Var(v) = u {
                if let Some(j) = self.vars.iter().position(|w| w == v) {
                    if i != j {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }
}

/// Both one-sided jets of one orbit coordinate at one step. The base value
/// is shared; the sides may disagree only in slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetPair {
    pub base: TropicalValue,
    pub plus_slope: Rat,
    pub minus_slope: Rat,
}

impl JetPair {
    fn from_sides(plus: &SignedJet, minus: &SignedJet) -> JetPair {
        debug_assert_eq!(plus.base(), minus.base(), "sides share the base orbit");
        JetPair {
            base: plus.base().clone(),
            plus_slope: plus.slope().clone(),
            minus_slope: minus.slope().clone(),
        }
    }

    /// A bottom coordinate is constant; a finite one is differentiable in
    /// the perturbation exactly when the one-sided slopes agree.
    pub fn differentiable(&self) -> bool {
        self.base == TropicalValue::NegInf || self.plus_slope == self.minus_slope
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetStep {
    pub index: usize,
    pub coords: Vec<JetPair>,
}

impl JetStep {
    pub fn all_differentiable(&self) -> bool {
        self.coords.iter().all(JetPair::differentiable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UltraVerdict {
    /// Every step in the horizon is differentiable in the perturbation.
    NeverNonDifferentiable,
    /// A non-differentiable step appeared and a later step is smooth again.
    RecoveredAt { entry: usize, recovered: usize },
    /// Non-differentiable entry without recovery inside the horizon.
    NotRecoveredWithin { entry: usize, steps: usize },
}

#[derive(Debug, Clone)]
pub struct JetReport {
    pub coords: Vec<String>,
    pub steps: Vec<JetStep>,
    pub verdict: UltraVerdict,
}

/// Setup for a jet run: one coordinate is perturbed to `base + d`, the rest
/// start at fixed tropical values.
#[derive(Debug, Clone)]
pub struct JetSetup {
    pub perturb_coord: String,
    pub perturb_base: Rat,
    pub initial: BTreeMap<String, TropicalValue>,
    pub param_values: BTreeMap<String, Rat>,
    pub steps: usize,
}

/// Runs the perturbed orbit on both sides and classifies each step by
/// differentiability of every coordinate with respect to the perturbation.
pub fn run_jet_confinement(
    map: &TropicalMap,
    setup: &JetSetup,
) -> Result<JetReport, UltraError> {
    validate_bindings(map, &setup.perturb_coord, &setup.initial, &setup.param_values)?;

    let sides = [Sign::Plus, Sign::Minus];
    let mut orbits: Vec<Vec<Vec<SignedJet>>> = Vec::with_capacity(2);
    for sign in sides {
        let dom = Jets { sign };
        let params: Env<SignedJet> = setup
            .param_values
            .iter()
            .map(|(k, v)| (k.clone(), SignedJet::finite(sign, v.clone(), Rat::default())))
            .collect();
        let mut state: Vec<SignedJet> = map
            .vars
            .iter()
            .map(|v| {
                if *v == setup.perturb_coord {
                    SignedJet::finite(
                        sign,
                        setup.perturb_base.clone(),
                        Rat::from_integer(1.into()),
                    )
                } else {
                    SignedJet::constant(sign, setup.initial[v].clone())
                }
            })
            .collect();
        let mut states = vec![state.clone()];
        for _ in 0..setup.steps {
            state = step_state(&dom, map, &state, &params)?;
            states.push(state.clone());
        }
        orbits.push(states);
    }

    let steps: Vec<JetStep> = (0..=setup.steps)
        .map(|n| JetStep {
            index: n,
            coords: orbits[0][n]
                .iter()
                .zip(&orbits[1][n])
                .map(|(p, m)| JetPair::from_sides(p, m))
                .collect(),
        })
        .collect();

    let entry = steps.iter().position(|s| !s.all_differentiable());
    let verdict = match entry {
        None => UltraVerdict::NeverNonDifferentiable,
        Some(e) => match steps[e + 1..].iter().find(|s| s.all_differentiable()) {
            Some(s) => UltraVerdict::RecoveredAt {
                entry: e,
                recovered: s.index,
            },
            None => UltraVerdict::NotRecoveredWithin {
                entry: e,
                steps: setup.steps,
            },
        },
    };

    Ok(JetReport {
        coords: map.vars.clone(),
        steps,
        verdict,
    })
}

impl JetReport {
    /// Scalar jets `0..=steps+1` when the map has a shift structure.
    pub fn scalar_jets(&self, map: &TropicalMap) -> Option<Vec<JetPair>> {
        let pair = map.shift_pair()?;
        let states: Vec<Vec<JetPair>> = self.steps.iter().map(|s| s.coords.clone()).collect();
        Some(scalar_track(&states, pair))
    }
}

/// Setup for a large-parameter run: one coordinate starts at `-L`, the rest
/// at fixed tropical values.
#[derive(Debug, Clone)]
pub struct LargeSetup {
    pub low_coord: String,
    pub initial: BTreeMap<String, TropicalValue>,
    pub param_values: BTreeMap<String, Rat>,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct LargeOrbit {
    pub coords: Vec<String>,
    pub states: Vec<Vec<LargeJet>>,
}

impl LargeOrbit {
    pub fn scalar_jets(&self, map: &TropicalMap) -> Option<Vec<LargeJet>> {
        let pair = map.shift_pair()?;
        Some(scalar_track(&self.states, pair))
    }
}

/// Iterates with one coordinate pushed towards bottom through the large
/// parameter: exact for every sufficiently large value of the parameter.
pub fn run_large_orbit(map: &TropicalMap, setup: &LargeSetup) -> Result<LargeOrbit, UltraError> {
    validate_bindings(map, &setup.low_coord, &setup.initial, &setup.param_values)?;
    let dom = LargeJets;
    let params: Env<LargeJet> = setup
        .param_values
        .iter()
        .map(|(k, v)| (k.clone(), LargeJet::finite(Rat::default(), v.clone())))
        .collect();
    let mut state: Vec<LargeJet> = map
        .vars
        .iter()
        .map(|v| {
            if *v == setup.low_coord {
                LargeJet::finite(-Rat::from_integer(1.into()), Rat::default())
            } else {
                LargeJet::constant(&setup.initial[v])
            }
        })
        .collect();
    let mut states = vec![state.clone()];
    for _ in 0..setup.steps {
        state = step_state(&dom, map, &state, &params)?;
        states.push(state.clone());
    }
    Ok(LargeOrbit {
        coords: map.vars.clone(),
        states,
    })
}

/// Setup for a symbolic orbit: one coordinate stays a free variable, the
/// rest are fixed.
#[derive(Debug, Clone)]
pub struct PlSetup {
    pub free_coord: String,
    pub initial: BTreeMap<String, TropicalValue>,
    pub param_values: BTreeMap<String, Rat>,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct PlOrbit {
    pub coords: Vec<String>,
    pub states: Vec<Vec<PlValue>>,
}

impl PlOrbit {
    pub fn scalar_functions(&self, map: &TropicalMap) -> Option<Vec<PlValue>> {
        let pair = map.shift_pair()?;
        Some(scalar_track(&self.states, pair))
    }

    /// Non-differentiability points per step, per coordinate; bottom
    /// coordinates have none.
    pub fn nd_points(&self) -> Vec<Vec<NdPoints>> {
        self.states
            .iter()
            .map(|st| {
                st.iter()
                    .map(|v| match v {
                        PlValue::Bottom => NdPoints {
                            minus_infinity: false,
                            finite: Vec::new(),
                        },
                        PlValue::Fn(f) => f.nd_points(),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Iterates the map with one coordinate symbolic over the whole line; every
/// orbit entry is an exact piecewise-linear function of it.
pub fn run_pl_orbit(map: &TropicalMap, setup: &PlSetup) -> Result<PlOrbit, UltraError> {
    validate_bindings(map, &setup.free_coord, &setup.initial, &setup.param_values)?;
    let dom = PlFunctions;
    let params: Env<PlValue> = setup
        .param_values
        .iter()
        .map(|(k, v)| {
            (
                k.clone(),
                PlValue::Fn(crate::ultra::pl::PiecewiseLinearFn::constant(v.clone())),
            )
        })
        .collect();
    let mut state: Vec<PlValue> = map
        .vars
        .iter()
        .map(|v| {
            if *v == setup.free_coord {
                PlValue::Fn(crate::ultra::pl::PiecewiseLinearFn::identity())
            } else {
                dom.literal(&setup.initial[v])
            }
        })
        .collect();
    let mut states = vec![state.clone()];
    for _ in 0..setup.steps {
        state = step_state(&dom, map, &state, &params)?;
        states.push(state.clone());
    }
    Ok(PlOrbit {
        coords: map.vars.clone(),
        states,
    })
}
