//! Rational functions of one small parameter, reduced to lowest terms, with
//! exact order and limit computations at the origin.

use std::fmt;

use crate::discrete::poly::Poly;
use crate::mapdsl::FieldDomain;
use crate::rat::Rat;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RatFnError {
    /// Division by the identically zero function: the quotient carries no
    /// limit information at all.
    #[error("division by the identically zero function")]
    DivisionByZeroFunction,
}

/// A quotient of polynomials in lowest terms with monic denominator. The
/// denominator is never the zero polynomial, so every value is a genuine
/// rational function; `0/1` represents zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

/// Limit of a coordinate as the parameter goes to zero, projectively: a
/// finite rational or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjLimit {
    Finite(Rat),
    Infinity,
}

impl fmt::Display for ProjLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjLimit::Finite(r) => write!(f, "{}", r),
            ProjLimit::Infinity => write!(f, "inf"),
        }
    }
}

impl RatFn {
    fn reduced(num: Poly, den: Poly) -> RatFn {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFn {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, r) = num.divrem(&g);
        debug_assert!(r.is_zero());
        let (den, r) = den.divrem(&g);
        debug_assert!(r.is_zero());
        let lead_inv = Rat::from_integer(1.into()) / den.leading().expect("nonzero denominator");
        RatFn {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        }
    }

    pub fn from_rat(r: Rat) -> RatFn {
        RatFn {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    /// The parameter itself.
    pub fn epsilon() -> RatFn {
        RatFn {
            num: Poly::x(),
            den: Poly::one(),
        }
    }

    /// `1 / eps`.
    pub fn inv_epsilon() -> RatFn {
        RatFn {
            num: Poly::one(),
            den: Poly::x(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        RatFn::reduced(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        RatFn::reduced(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn, RatFnError> {
        if other.is_zero() {
            return Err(RatFnError::DivisionByZeroFunction);
        }
        Ok(RatFn::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn pow(&self, k: i64) -> Result<RatFn, RatFnError> {
        if k == 0 {
            return Ok(RatFn::from_rat(Rat::from_integer(1.into())));
        }
        let base = if k < 0 {
            RatFn::from_rat(Rat::from_integer(1.into())).div(self)?
        } else {
            self.clone()
        };
        let mut acc = RatFn::from_rat(Rat::from_integer(1.into()));
        let mut base = base;
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        Ok(acc)
    }

    /// Vanishing order at the origin: positive means a zero, negative a
    /// pole; `None` for the identically zero function.
    pub fn order_at_zero(&self) -> Option<i64> {
        let n = self.num.trailing_order()?;
        let d = self
            .den
            .trailing_order()
            .expect("denominator is never the zero polynomial");
        Some(n as i64 - d as i64)
    }

    /// Projective limit at the origin. The identically zero function has
    /// limit zero.
    pub fn limit_at_zero(&self) -> ProjLimit {
        match self.order_at_zero() {
            None => ProjLimit::Finite(Rat::default()),
            Some(o) if o > 0 => ProjLimit::Finite(Rat::default()),
            Some(o) if o < 0 => ProjLimit::Infinity,
            Some(_) => {
                let n = self.num.trailing_order().expect("nonzero numerator");
                let d = self.den.trailing_order().expect("nonzero denominator");
                ProjLimit::Finite(self.num.coeff(n) / self.den.coeff(d))
            }
        }
    }

    /// Evaluation at a nonzero rational parameter value, when defined.
    pub fn eval(&self, eps: &Rat) -> Option<Rat> {
        let d = self.den.eval(eps);
        if d == Rat::default() {
            return None;
        }
        Some(self.num.eval(eps) / d)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Rational functions of the confinement parameter as a coefficient domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatFns;

impl FieldDomain for RatFns {
    type Value = RatFn;
    type Error = RatFnError;

    fn literal(&self, r: &Rat) -> RatFn {
        RatFn::from_rat(r.clone())
    }
    fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.add(b)
    }
    fn sub(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.sub(b)
    }
    fn neg(&self, a: &RatFn) -> RatFn {
        a.neg()
    }
    fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.mul(b)
    }
    fn div(&self, a: &RatFn, b: &RatFn) -> Result<RatFn, RatFnError> {
        a.div(b)
    }
    fn pow(&self, a: &RatFn, k: i64) -> Result<RatFn, RatFnError> {
        a.pow(k)
    }
}
