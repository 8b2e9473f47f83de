//! Lifting a rational map to truncated series coefficients: parameters with
//! tropical value `P` become the monomial `z^P`, initial coordinates become
//! caller-supplied series, and the map is iterated with exact series
//! arithmetic.

use std::collections::BTreeMap;

use crate::mapdsl::ast::RationalMap;
use crate::mapdsl::eval::{ExprError, FieldDomain};
use crate::mapdsl::MapError;
use crate::puiseux::{ps_div, ps_pow, PuiseuxSeries, SeriesError};
use crate::rat::Rat;

/// Series arithmetic as a coefficient domain. `depth` is the window width
/// kept below the leading exponent when inverting non-monomial series.
#[derive(Debug, Clone)]
pub struct PuiseuxField {
    pub depth: Rat,
}

impl FieldDomain for PuiseuxField {
    type Value = PuiseuxSeries;
    type Error = SeriesError;

    fn literal(&self, r: &Rat) -> PuiseuxSeries {
        PuiseuxSeries::constant(r.clone())
    }
    fn add(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        crate::puiseux::ps_add(a, b)
    }
    fn sub(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        crate::puiseux::ps_sub(a, b)
    }
    fn neg(&self, a: &PuiseuxSeries) -> PuiseuxSeries {
        crate::puiseux::ps_neg(a)
    }
    fn mul(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> PuiseuxSeries {
        crate::puiseux::ps_mul(a, b)
    }
    fn div(&self, a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<PuiseuxSeries, SeriesError> {
        ps_div(a, b, &self.depth)
    }
    fn pow(&self, a: &PuiseuxSeries, k: i64) -> Result<PuiseuxSeries, SeriesError> {
        ps_pow(a, k, &self.depth)
    }
}

/// A signed monomial `coeff * z^exp` for initial data. A zero coefficient is
/// rejected so that an accidental zero is distinguished from the explicit
/// zero series.
pub fn signed_monomial(name: &str, coeff: Rat, exp: Rat) -> Result<PuiseuxSeries, MapError> {
    if coeff == Rat::default() {
        return Err(MapError::ZeroAssignment {
            name: name.to_string(),
        });
    }
    Ok(PuiseuxSeries::monomial(coeff, exp))
}

/// A rational map together with series values for its parameters.
#[derive(Debug, Clone)]
pub struct LiftedMap {
    pub map: RationalMap,
    pub domain: PuiseuxField,
    param_values: BTreeMap<String, PuiseuxSeries>,
}

impl LiftedMap {
    /// `tropical_params` binds each parameter alias to its tropical value
    /// `P`; the parameter lifts to `z^P`.
    pub fn new(
        map: &RationalMap,
        tropical_params: &BTreeMap<String, Rat>,
        depth: Rat,
    ) -> Result<Self, MapError> {
        let mut param_values = BTreeMap::new();
        for (src, alias) in &map.params {
            let p = tropical_params
                .get(alias)
                .ok_or_else(|| MapError::UnboundName {
                    name: alias.clone(),
                })?;
            param_values.insert(
                src.clone(),
                PuiseuxSeries::monomial(Rat::from_integer(1.into()), p.clone()),
            );
        }
        Ok(LiftedMap {
            map: map.clone(),
            domain: PuiseuxField { depth },
            param_values,
        })
    }

    pub fn step(&self, state: &[PuiseuxSeries]) -> Result<Vec<PuiseuxSeries>, ExprError<SeriesError>> {
        self.map.step_in(&self.domain, state, &self.param_values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapdsl::parser::parse_map;
    use crate::maxplus::TropicalValue;
    use crate::rat::{rat_int, Rat};

    #[test]
    fn zero_coefficient_monomials_are_rejected() {
        assert!(matches!(
            signed_monomial("w1", rat_int(0), rat_int(2)),
            Err(MapError::ZeroAssignment { name }) if name == "w1"
        ));
        assert!(signed_monomial("w1", rat_int(-1), rat_int(2)).is_ok());
    }

    #[test]
    fn lifted_orbit_valuations_follow_the_tropical_orbit() {
        let m = parse_map("vars: x, y\nx' = y\ny' = (y + 1)/x\n").unwrap();
        let lifted = LiftedMap::new(&m, &BTreeMap::new(), rat_int(60)).unwrap();
        let mut state = vec![
            PuiseuxSeries::monomial(rat_int(1), rat_int(2)),
            PuiseuxSeries::monomial(rat_int(1), rat_int(5)),
        ];
        // Second coordinate valuations across one period of length five.
        let expected: Vec<Rat> = [3, -2, -3, 2, 5].map(|n| rat_int(n)).into();
        for want in expected {
            state = lifted.step(&state).unwrap();
            assert_eq!(
                state[1].valuation().unwrap(),
                TropicalValue::finite(want)
            );
        }
    }

    #[test]
    fn parameters_lift_to_unit_monomials() {
        let m = parse_map("vars: x, t\nparams: q -> Q\nx' = q*t*x\nt' = q*t\n").unwrap();
        let params: BTreeMap<String, Rat> = [("Q".to_string(), rat_int(3))].into();
        let lifted = LiftedMap::new(&m, &params, rat_int(40)).unwrap();
        let state = vec![
            PuiseuxSeries::monomial(rat_int(2), rat_int(1)),
            PuiseuxSeries::monomial(rat_int(1), rat_int(0)),
        ];
        let next = lifted.step(&state).unwrap();
        assert_eq!(
            next[0].valuation().unwrap(),
            TropicalValue::finite(rat_int(4))
        );
        assert_eq!(
            next[1].valuation().unwrap(),
            TropicalValue::finite(rat_int(3))
        );
    }

    #[test]
    fn missing_parameter_value_is_an_error() {
        let m = parse_map("vars: x\nparams: q -> Q\nx' = q*x\n").unwrap();
        assert!(matches!(
            LiftedMap::new(&m, &BTreeMap::new(), rat_int(40)),
            Err(MapError::UnboundName { name }) if name == "Q"
        ));
    }
}
