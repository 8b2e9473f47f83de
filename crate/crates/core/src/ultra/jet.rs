//! One-sided first-order jets for max-plus arithmetic: germs
//! `base + slope * d` as the perturbation `d` tends to zero from one side.
//!
//! Maxima compare bases first; on a tie the surviving slope is the larger
//! one from the right (`d > 0`) and the smaller one from the left
//! (`d < 0`), because that branch dominates for small `d` of that sign.
//! A jet with bottom base is identically bottom and carries slope zero.

use crate::maxplus::{EvalError, TropDomain, TropicalValue};
use crate::rat::Rat;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedJet {
    pub sign: Sign,
    base: TropicalValue,
    slope: Rat,
}

impl SignedJet {
    pub fn finite(sign: Sign, base: Rat, slope: Rat) -> Self {
        SignedJet {
            sign,
            base: TropicalValue::finite(base),
            slope,
        }
    }

    pub fn bottom(sign: Sign) -> Self {
        SignedJet {
            sign,
            base: TropicalValue::NegInf,
            slope: Rat::default(),
        }
    }

    pub fn constant(sign: Sign, v: TropicalValue) -> Self {
        match v {
            TropicalValue::NegInf => SignedJet::bottom(sign),
            TropicalValue::Finite(r) => SignedJet::finite(sign, r, Rat::default()),
        }
    }

    pub fn base(&self) -> &TropicalValue {
        &self.base
    }

    pub fn slope(&self) -> &Rat {
        &self.slope
    }

    pub fn is_bottom(&self) -> bool {
        self.base == TropicalValue::NegInf
    }
}

impl fmt::Display for SignedJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            TropicalValue::NegInf => write!(f, "-inf"),
            TropicalValue::Finite(b) => write!(f, "{} + {}*d", b, self.slope),
        }
    }
}

fn check_signs(a: &SignedJet, b: &SignedJet) -> Result<Sign, EvalError> {
    if a.sign != b.sign {
        return Err(EvalError::SignMismatch);
    }
    Ok(a.sign)
}

pub fn jet_max(a: &SignedJet, b: &SignedJet) -> Result<SignedJet, EvalError> {
    let sign = check_signs(a, b)?;
    Ok(match (&a.base, &b.base) {
        (TropicalValue::NegInf, _) => b.clone(),
        (_, TropicalValue::NegInf) => a.clone(),
        (TropicalValue::Finite(ba), TropicalValue::Finite(bb)) => {
            if ba > bb {
                a.clone()
            } else if bb > ba {
                b.clone()
            } else {
                // Equal bases: the dominating branch depends on the side.
                let slope = match sign {
                    Sign::Plus => a.slope.clone().max(b.slope.clone()),
                    Sign::Minus => a.slope.clone().min(b.slope.clone()),
                };
                SignedJet::finite(sign, ba.clone(), slope)
            }
        }
    })
}

pub fn jet_add(a: &SignedJet, b: &SignedJet) -> Result<SignedJet, EvalError> {
    let sign = check_signs(a, b)?;
    Ok(match (&a.base, &b.base) {
        (TropicalValue::Finite(ba), TropicalValue::Finite(bb)) => {
            SignedJet::finite(sign, ba + bb, &a.slope + &b.slope)
        }
        _ => SignedJet::bottom(sign),
    })
}

pub fn jet_sub(a: &SignedJet, b: &SignedJet) -> Result<SignedJet, EvalError> {
    let sign = check_signs(a, b)?;
    match (&a.base, &b.base) {
        (_, TropicalValue::NegInf) => Err(EvalError::DivisionByBottom),
        (TropicalValue::NegInf, _) => Ok(SignedJet::bottom(sign)),
        (TropicalValue::Finite(ba), TropicalValue::Finite(bb)) => {
            Ok(SignedJet::finite(sign, ba - bb, &a.slope - &b.slope))
        }
    }
}

pub fn jet_scale(k: i64, a: &SignedJet) -> Result<SignedJet, EvalError> {
    if k == 0 {
        return Ok(SignedJet::finite(a.sign, Rat::default(), Rat::default()));
    }
    match &a.base {
        TropicalValue::NegInf => {
            if k < 0 {
                Err(EvalError::DivisionByBottom)
            } else {
                Ok(SignedJet::bottom(a.sign))
            }
        }
        TropicalValue::Finite(b) => {
            let kr = Rat::from_integer(k.into());
            Ok(SignedJet::finite(a.sign, b * &kr, &a.slope * &kr))
        }
    }
}

/// Jets of a fixed side as a max-plus evaluation domain.
#[derive(Debug, Clone, Copy)]
pub struct Jets {
    pub sign: Sign,
}

impl TropDomain for Jets {
    type Value = SignedJet;

    fn literal(&self, v: &TropicalValue) -> SignedJet {
        SignedJet::constant(self.sign, v.clone())
    }
    fn maximum(&self, a: &SignedJet, b: &SignedJet) -> Result<SignedJet, EvalError> {
        jet_max(a, b)
    }
    fn sum(&self, a: &SignedJet, b: &SignedJet) -> Result<SignedJet, EvalError> {
        jet_add(a, b)
    }
    fn difference(&self, a: &SignedJet, b: &SignedJet) -> Result<SignedJet, EvalError> {
        jet_sub(a, b)
    }
    fn scale(&self, k: i64, a: &SignedJet) -> Result<SignedJet, EvalError> {
        jet_scale(k, a)
    }
}
