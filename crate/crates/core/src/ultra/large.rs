//! Jets in a large parameter: values `coeff * L + base` for a parameter `L`
//! taken larger than every finite quantity in play. Comparisons are
//! lexicographic in `(coeff, base)`, which is the pointwise order for all
//! sufficiently large `L`, so one exact orbit covers the whole tail.

use crate::maxplus::{EvalError, TropDomain, TropicalValue};
use crate::rat::Rat;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LargeJet {
    Bottom,
    Finite { coeff: Rat, base: Rat },
}

impl LargeJet {
    pub fn finite(coeff: Rat, base: Rat) -> Self {
        LargeJet::Finite { coeff, base }
    }

    pub fn constant(v: &TropicalValue) -> Self {
        match v {
            TropicalValue::NegInf => LargeJet::Bottom,
            TropicalValue::Finite(r) => LargeJet::finite(Rat::default(), r.clone()),
        }
    }

    /// True when the value does not grow with the parameter.
    pub fn is_bounded(&self) -> bool {
        match self {
            LargeJet::Bottom => true,
            LargeJet::Finite { coeff, .. } => *coeff == Rat::default(),
        }
    }
}

impl fmt::Display for LargeJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LargeJet::Bottom => write!(f, "-inf"),
            LargeJet::Finite { coeff, base } => {
                if *coeff == Rat::default() {
                    write!(f, "{}", base)
                } else if *base == Rat::default() {
                    write!(f, "{}*L", coeff)
                } else {
                    write!(f, "{}*L + {}", coeff, base)
                }
            }
        }
    }
}

pub fn large_max(a: &LargeJet, b: &LargeJet) -> LargeJet {
    match (a, b) {
        (LargeJet::Bottom, _) => b.clone(),
        (_, LargeJet::Bottom) => a.clone(),
        (
            LargeJet::Finite { coeff: ca, base: ba },
            LargeJet::Finite { coeff: cb, base: bb },
        ) => {
            if (ca, ba) >= (cb, bb) {
                a.clone()
            } else {
                b.clone()
            }
        }
    }
}

pub fn large_add(a: &LargeJet, b: &LargeJet) -> LargeJet {
    match (a, b) {
        (
            LargeJet::Finite { coeff: ca, base: ba },
            LargeJet::Finite { coeff: cb, base: bb },
        ) => LargeJet::finite(ca + cb, ba + bb),
        _ => LargeJet::Bottom,
    }
}

pub fn large_sub(a: &LargeJet, b: &LargeJet) -> Result<LargeJet, EvalError> {
    match (a, b) {
        (_, LargeJet::Bottom) => Err(EvalError::DivisionByBottom),
        (LargeJet::Bottom, _) => Ok(LargeJet::Bottom),
        (
            LargeJet::Finite { coeff: ca, base: ba },
            LargeJet::Finite { coeff: cb, base: bb },
        ) => Ok(LargeJet::finite(ca - cb, ba - bb)),
    }
}

pub fn large_scale(k: i64, a: &LargeJet) -> Result<LargeJet, EvalError> {
    if k == 0 {
        return Ok(LargeJet::finite(Rat::default(), Rat::default()));
    }
    match a {
        LargeJet::Bottom => {
            if k < 0 {
                Err(EvalError::DivisionByBottom)
            } else {
                Ok(LargeJet::Bottom)
            }
        }
        LargeJet::Finite { coeff, base } => {
            let kr = Rat::from_integer(k.into());
            Ok(LargeJet::finite(coeff * &kr, base * &kr))
        }
    }
}

/// Large-parameter jets as a max-plus evaluation domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct LargeJets;

impl TropDomain for LargeJets {
    type Value = LargeJet;

    fn literal(&self, v: &TropicalValue) -> LargeJet {
        LargeJet::constant(v)
    }
    fn maximum(&self, a: &LargeJet, b: &LargeJet) -> Result<LargeJet, EvalError> {
        Ok(large_max(a, b))
    }
    fn sum(&self, a: &LargeJet, b: &LargeJet) -> Result<LargeJet, EvalError> {
        Ok(large_add(a, b))
    }
    fn difference(&self, a: &LargeJet, b: &LargeJet) -> Result<LargeJet, EvalError> {
        large_sub(a, b)
    }
    fn scale(&self, k: i64, a: &LargeJet) -> Result<LargeJet, EvalError> {
        large_scale(k, a)
    }
}
