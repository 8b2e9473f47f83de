//! Max-plus semiring arithmetic over exact rationals.
//!
//! Values live in S = Q ∪ {-inf}. Semiring addition is `max` with identity
//! `-inf`; semiring multiplication is ordinary `+` with identity `0`, and
//! `-inf` is absorbing for it. Tropical division is ordinary subtraction and
//! is undefined when the divisor is `-inf`.
//!
//! [`TropExpr`] is the expression language produced by ultradiscretization:
//! literals, variables, n-ary `max`, n-ary `+`, binary `-`, and integer
//! scaling. [`eval_trop`] evaluates it over scalar values; [`eval_trop_in`]
//! evaluates the same tree over any [`TropDomain`] (jets, large-parameter
//! jets, piecewise-linear functions).

use std::collections::BTreeMap;
use std::fmt;

use crate::rat::{rat_int, Rat};

/// Element of the max-plus semiring: a rational or `-inf`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TropicalValue {
    NegInf,
    Finite(Rat),
}

impl TropicalValue {
    pub fn finite(r: Rat) -> Self {
        TropicalValue::Finite(r)
    }

    pub fn from_int(n: i64) -> Self {
        TropicalValue::Finite(rat_int(n))
    }

    /// Multiplicative identity (the rational 0).
    pub fn one() -> Self {
        TropicalValue::Finite(Rat::default())
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, TropicalValue::NegInf)
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            TropicalValue::NegInf => None,
            TropicalValue::Finite(r) => Some(r),
        }
    }
}

impl fmt::Display for TropicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropicalValue::NegInf => write!(f, "-inf"),
            TropicalValue::Finite(r) => write!(f, "{}", r),
        }
    }
}

/// Parses a rational or `-inf`.
pub fn parse_tropical(s: &str) -> Option<TropicalValue> {
    if s == "-inf" {
        return Some(TropicalValue::NegInf);
    }
    crate::rat::parse_rat(s).map(TropicalValue::Finite)
}

/// Evaluation failure for tropical expressions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("tropical division by the bottom element -inf")]
    DivisionByBottom,
    #[error("jets with different perturbation signs cannot be combined")]
    SignMismatch,
}

/// Semiring addition: max. `-inf` is the identity.
pub fn trop_add(a: &TropicalValue, b: &TropicalValue) -> TropicalValue {
    std::cmp::max(a, b).clone()
}

/// Semiring multiplication: ordinary `+`. `-inf` is absorbing.
pub fn trop_mul(a: &TropicalValue, b: &TropicalValue) -> TropicalValue {
    match (a, b) {
        (TropicalValue::Finite(x), TropicalValue::Finite(y)) => TropicalValue::Finite(x + y),
        _ => TropicalValue::NegInf,
    }
}

/// Tropical division: ordinary `-`. Undefined when `b` is `-inf`.
pub fn trop_div(a: &TropicalValue, b: &TropicalValue) -> Result<TropicalValue, EvalError> {
    match (a, b) {
        (_, TropicalValue::NegInf) => Err(EvalError::DivisionByBottom),
        (TropicalValue::NegInf, _) => Ok(TropicalValue::NegInf),
        (TropicalValue::Finite(x), TropicalValue::Finite(y)) => {
            Ok(TropicalValue::Finite(x - y))
        }
    }
}

/// `k`-fold tropical power: ordinary `k * a`.
///
/// `k = 0` yields `0` for every operand, including `-inf` (empty product).
/// Negative `k` on `-inf` is division by the bottom element.
pub fn int_scale(k: i64, a: &TropicalValue) -> Result<TropicalValue, EvalError> {
    if k == 0 {
        return Ok(TropicalValue::one());
    }
    match a {
        TropicalValue::NegInf if k > 0 => Ok(TropicalValue::NegInf),
        TropicalValue::NegInf => Err(EvalError::DivisionByBottom),
        TropicalValue::Finite(r) => Ok(TropicalValue::Finite(r * rat_int(k))),
    }
}

/// Expression over the max-plus semiring.
///
/// `Max` and `Plus` carry two or more operands. Variable names refer to a
/// declared name set (map coordinates and tropical parameters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TropExpr {
    Lit(TropicalValue),
    Var(String),
    Max(Vec<TropExpr>),
    Plus(Vec<TropExpr>),
    Minus(Box<TropExpr>, Box<TropExpr>),
    IntScale(i64, Box<TropExpr>),
}

impl TropExpr {
    pub fn var(name: &str) -> Self {
        TropExpr::Var(name.to_string())
    }

    /// Variable names occurring in the expression, in first-use order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            TropExpr::Lit(_) => {}
            TropExpr::Var(v) => {
                if !out.iter().any(|n| n == v) {
                    out.push(v.clone());
                }
            }
            TropExpr::Max(xs) | TropExpr::Plus(xs) => {
                for x in xs {
                    x.collect_vars(out);
                }
            }
            TropExpr::Minus(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            TropExpr::IntScale(_, a) => a.collect_vars(out),
        }
    }
}

// Rendering: `max(...)` is call-like; `+`/`-` are left-associative additive
// operators; `k*e` binds tighter than addition.
impl fmt::Display for TropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(e: &TropExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                TropExpr::Plus(_) | TropExpr::Minus(..) => write!(f, "({})", e),
                _ => write!(f, "{}", e),
            }
        }
        match self {
            TropExpr::Lit(v) => write!(f, "{}", v),
            TropExpr::Var(v) => write!(f, "{}", v),
            TropExpr::Max(xs) => {
                write!(f, "max(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, ")")
            }
            TropExpr::Plus(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    atom(x, f)?;
                }
                Ok(())
            }
            TropExpr::Minus(a, b) => {
                atom(a, f)?;
                write!(f, " - ")?;
                atom(b, f)
            }
            TropExpr::IntScale(k, a) => {
                write!(f, "{}*", k)?;
                atom(a, f)
            }
        }
    }
}

/// Variable bindings for evaluation.
pub type Env<V> = BTreeMap<String, V>;

/// A value domain the tropical expression language can be evaluated over.
///
/// Implementations must satisfy the max-plus laws up to the domain's own
/// notion of equality; `literal` embeds scalar constants.
pub trait TropDomain {
    type Value: Clone;

    fn literal(&self, lit: &TropicalValue) -> Self::Value;
    fn maximum(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, EvalError>;
    fn sum(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, EvalError>;
    fn difference(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, EvalError>;
    fn scale(&self, k: i64, a: &Self::Value) -> Result<Self::Value, EvalError>;
}

/// The scalar domain: plain max-plus values.
pub struct Scalars;

impl TropDomain for Scalars {
    type Value = TropicalValue;

    fn literal(&self, lit: &TropicalValue) -> TropicalValue {
        lit.clone()
    }

    fn maximum(&self, a: &TropicalValue, b: &TropicalValue) -> Result<TropicalValue, EvalError> {
        Ok(trop_add(a, b))
    }

    fn sum(&self, a: &TropicalValue, b: &TropicalValue) -> Result<TropicalValue, EvalError> {
        Ok(trop_mul(a, b))
    }

    fn difference(
        &self,
        a: &TropicalValue,
        b: &TropicalValue,
    ) -> Result<TropicalValue, EvalError> {
        trop_div(a, b)
    }

    fn scale(&self, k: i64, a: &TropicalValue) -> Result<TropicalValue, EvalError> {
        int_scale(k, a)
    }
}

/// Evaluates `e` over an arbitrary tropical domain.
pub fn eval_trop_in<D: TropDomain>(
    dom: &D,
    e: &TropExpr,
    env: &Env<D::Value>,
) -> Result<D::Value, EvalError> {
    match e {
        TropExpr::Lit(v) => Ok(dom.literal(v)),
        TropExpr::Var(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
        TropExpr::Max(xs) => fold(dom, xs, env, |d, a, b| d.maximum(a, b)),
        TropExpr::Plus(xs) => fold(dom, xs, env, |d, a, b| d.sum(a, b)),
        TropExpr::Minus(a, b) => {
            let a = eval_trop_in(dom, a, env)?;
            let b = eval_trop_in(dom, b, env)?;
            dom.difference(&a, &b)
        }
        TropExpr::IntScale(k, a) => {
            let a = eval_trop_in(dom, a, env)?;
            dom.scale(*k, &a)
        }
    }
}

fn fold<D: TropDomain>(
    dom: &D,
    xs: &[TropExpr],
    env: &Env<D::Value>,
    op: impl Fn(&D, &D::Value, &D::Value) -> Result<D::Value, EvalError>,
) -> Result<D::Value, EvalError> {
    let mut iter = xs.iter();
    let first = iter
        .next()
        .expect("Max/Plus nodes carry at least one operand");
    let mut acc = eval_trop_in(dom, first, env)?;
    for x in iter {
        let v = eval_trop_in(dom, x, env)?;
        acc = op(dom, &acc, &v)?;
    }
    Ok(acc)
}

/// Evaluates `e` over scalar max-plus values.
pub fn eval_trop(e: &TropExpr, env: &Env<TropicalValue>) -> Result<TropicalValue, EvalError> {
    eval_trop_in(&Scalars, e, env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn fin(n: i64) -> TropicalValue {
        TropicalValue::from_int(n)
    }

    #[test]
    fn identities_and_absorption() {
        let ninf = TropicalValue::NegInf;
        assert_eq!(trop_add(&ninf, &fin(3)), fin(3));
        assert_eq!(trop_add(&fin(-7), &ninf), fin(-7));
        assert_eq!(trop_mul(&fin(3), &TropicalValue::one()), fin(3));
        assert_eq!(trop_mul(&ninf, &fin(3)), ninf);
        assert_eq!(trop_mul(&fin(3), &ninf), ninf);
    }

    #[test]
    fn division_subtracts_and_rejects_bottom_divisor() {
        assert_eq!(trop_div(&fin(5), &fin(2)).unwrap(), fin(3));
        assert_eq!(trop_div(&TropicalValue::NegInf, &fin(2)).unwrap(), TropicalValue::NegInf);
        assert_eq!(
            trop_div(&fin(1), &TropicalValue::NegInf),
            Err(EvalError::DivisionByBottom)
        );
    }

    #[test]
    fn zero_scale_is_the_empty_product() {
        assert_eq!(int_scale(0, &TropicalValue::NegInf).unwrap(), TropicalValue::one());
        assert_eq!(int_scale(0, &fin(9)).unwrap(), TropicalValue::one());
        assert_eq!(int_scale(3, &TropicalValue::NegInf).unwrap(), TropicalValue::NegInf);
        assert_eq!(
            int_scale(-2, &TropicalValue::NegInf),
            Err(EvalError::DivisionByBottom)
        );
        assert_eq!(int_scale(-2, &fin(3)).unwrap(), fin(-6));
    }

    #[test]
    fn ordering_puts_bottom_first() {
        assert!(TropicalValue::NegInf < fin(-1000));
        assert!(fin(1) < TropicalValue::Finite(rat(3, 2)));
    }

    #[test]
    fn evaluates_an_update_rule() {
        // max(A + T + Y, 0) - X - 0*Y at (A, T, X, Y) = (1, 2, 3, 4).
        let e = TropExpr::Minus(
            Box::new(TropExpr::Minus(
                Box::new(TropExpr::Max(vec![
                    TropExpr::Plus(vec![
                        TropExpr::var("A"),
                        TropExpr::var("T"),
                        TropExpr::var("Y"),
                    ]),
                    TropExpr::Lit(TropicalValue::one()),
                ])),
                Box::new(TropExpr::var("X")),
            )),
            Box::new(TropExpr::IntScale(0, Box::new(TropExpr::var("Y")))),
        );
        let mut env = Env::new();
        env.insert("A".into(), fin(1));
        env.insert("T".into(), fin(2));
        env.insert("X".into(), fin(3));
        env.insert("Y".into(), fin(4));
        assert_eq!(eval_trop(&e, &env).unwrap(), fin(4));
    }

    #[test]
    fn unbound_variables_are_reported_by_name() {
        let e = TropExpr::var("missing");
        assert_eq!(
            eval_trop(&e, &Env::new()),
            Err(EvalError::UnboundVariable("missing".into()))
        );
    }

    #[test]
    fn renders_with_minimal_parentheses() {
        let e = TropExpr::Minus(
            Box::new(TropExpr::Max(vec![
                TropExpr::Plus(vec![TropExpr::var("Y"), TropExpr::Lit(fin(1))]),
                TropExpr::Lit(TropicalValue::one()),
            ])),
            Box::new(TropExpr::IntScale(2, Box::new(TropExpr::var("X")))),
        );
        assert_eq!(e.to_string(), "max(Y + 1, 0) - 2*X");
    }
}
