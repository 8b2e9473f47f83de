//! Evaluation of rational map expressions over pluggable coefficient
//! domains, plus the floating-point limit check that compares an expression
//! against its piecewise-linear image along a scaling family.

use std::collections::BTreeMap;

use crate::mapdsl::ast::{Expr, RationalMap};
use crate::mapdsl::transform::{is_subtraction_free, ultradiscretize};
use crate::mapdsl::MapError;
use crate::maxplus::{eval_trop, TropicalValue};
use crate::rat::{rat_to_f64, Rat};
use thiserror::Error;

/// A coefficient domain in which rational expressions evaluate: exact
/// rationals, series, or symbolic fractions. Division and powers may fail.
pub trait FieldDomain {
    type Value: Clone;
    type Error;

    fn literal(&self, r: &Rat) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn pow(&self, a: &Self::Value, k: i64) -> Result<Self::Value, Self::Error>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError<E> {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Domain(E),
}

/// Evaluates with both coordinates and parameters bound by name in `env`.
pub fn eval_expr_in<D: FieldDomain>(
    dom: &D,
    e: &Expr,
    env: &BTreeMap<String, D::Value>,
) -> Result<D::Value, ExprError<D::Error>>
where
    D::Error: std::error::Error,
{
    match e {
        Expr::Lit(r) => Ok(dom.literal(r)),
        Expr::Var(v) | Expr::Param(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| ExprError::Unbound(v.clone())),
        Expr::Add(a, b) => Ok(dom.add(
            &eval_expr_in(dom, a, env)?,
            &eval_expr_in(dom, b, env)?,
        )),
        Expr::Sub(a, b) => Ok(dom.sub(
            &eval_expr_in(dom, a, env)?,
            &eval_expr_in(dom, b, env)?,
        )),
        Expr::Neg(a) => Ok(dom.neg(&eval_expr_in(dom, a, env)?)),
        Expr::Mul(a, b) => Ok(dom.mul(
            &eval_expr_in(dom, a, env)?,
            &eval_expr_in(dom, b, env)?,
        )),
        Expr::Div(a, b) => dom
            .div(
                &eval_expr_in(dom, a, env)?,
                &eval_expr_in(dom, b, env)?,
            )
            .map_err(ExprError::Domain),
        Expr::Pow(a, k) => dom
            .pow(&eval_expr_in(dom, a, env)?, *k)
            .map_err(ExprError::Domain),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
}

/// Exact rational arithmetic; `0^0 = 1` by the empty-product convention.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

fn rat_pow(a: &Rat, k: i64) -> Result<Rat, NumError> {
    if k == 0 {
        return Ok(Rat::from_integer(1.into()));
    }
    let (mut base, mut k) = if k < 0 {
        if a == &Rat::default() {
            return Err(NumError::DivisionByZero);
        }
        (a.recip(), k.unsigned_abs())
    } else {
        (a.clone(), k.unsigned_abs())
    };
    let mut acc = Rat::from_integer(1.into());
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    Ok(acc)
}

impl FieldDomain for Rationals {
    type Value = Rat;
    type Error = NumError;

    fn literal(&self, r: &Rat) -> Rat {
        r.clone()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn div(&self, a: &Rat, b: &Rat) -> Result<Rat, NumError> {
        if b == &Rat::default() {
            return Err(NumError::DivisionByZero);
        }
        Ok(a / b)
    }
    fn pow(&self, a: &Rat, k: i64) -> Result<Rat, NumError> {
        rat_pow(a, k)
    }
}

impl RationalMap {
    /// One application of the map over any coefficient domain. `params`
    /// binds parameter source names.
    pub fn step_in<D: FieldDomain>(
        &self,
        dom: &D,
        state: &[D::Value],
        params: &BTreeMap<String, D::Value>,
    ) -> Result<Vec<D::Value>, ExprError<D::Error>>
    where
        D::Error: std::error::Error,
    {
        let mut env = params.clone();
        for (v, s) in self.vars.iter().zip(state) {
            env.insert(v.clone(), s.clone());
        }
        self.updates
            .iter()
            .map(|u| eval_expr_in(dom, u, &env))
            .collect()
    }
}

/// One entry of the limit check: the scale and the absolute deviation from
/// the piecewise-linear value, or an overflow marker if the floating-point
/// evaluation left the finite range.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSample {
    pub epsilon: Rat,
    pub deviation: Deviation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deviation {
    Value(f64),
    OverflowAtEpsilon,
}

/// `eps * log` of the expression value at the exponentially scaled point,
/// computed directly in the log domain so large exponents never overflow:
/// sums become smooth maxima, products become sums.
fn eps_log_eval(e: &Expr, env: &BTreeMap<String, f64>, eps: f64) -> f64 {
    match e {
        Expr::Lit(c) => eps * rat_to_f64(c).ln(),
        Expr::Var(v) | Expr::Param(v) => env[v],
        Expr::Add(a, b) => {
            let (ya, yb) = (eps_log_eval(a, env, eps), eps_log_eval(b, env, eps));
            let (hi, lo) = if ya >= yb { (ya, yb) } else { (yb, ya) };
            hi + eps * (1.0 + ((lo - hi) / eps).exp()).ln()
        }
        Expr::Mul(a, b) => eps_log_eval(a, env, eps) + eps_log_eval(b, env, eps),
        Expr::Div(a, b) => eps_log_eval(a, env, eps) - eps_log_eval(b, env, eps),
        Expr::Pow(a, k) => (*k as f64) * eps_log_eval(a, env, eps),
        Expr::Sub(..) | Expr::Neg(_) => {
            unreachable!("checked subtraction-free before evaluation")
        }
    }
}

/// Natural log of the weighted term count of an expression: the number of
/// monomials it expands to, counted with multiplicity, each literal `c`
/// weighing `max(|c|, 1/|c|)`. For subtraction-free expressions the
/// deviation measured by [`numeric_ud_check`] is at most `eps` times this
/// value: a sum of `m` positive terms lies within a factor `m` of its
/// largest term, and the factors compound additively through `log`.
pub fn log_term_count(e: &Expr) -> f64 {
    match e {
        Expr::Lit(c) => rat_to_f64(c).abs().ln().abs(),
        Expr::Var(_) | Expr::Param(_) => 0.0,
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (ya, yb) = (log_term_count(a), log_term_count(b));
            let (hi, lo) = if ya >= yb { (ya, yb) } else { (yb, ya) };
            hi + (1.0 + (lo - hi).exp()).ln()
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => log_term_count(a) + log_term_count(b),
        Expr::Pow(a, k) => (k.unsigned_abs() as f64) * log_term_count(a),
        Expr::Neg(a) => log_term_count(a),
    }
}

/// Compares `eps * log f(exp(X/eps))` against the piecewise-linear image of
/// `f` at `X`, for each scale in `epsilons`. The expression must be
/// subtraction-free and the assignment must bind every name to a finite
/// value. Overflow at one scale is reported in place, not propagated.
pub fn numeric_ud_check(
    e: &Expr,
    assignment: &BTreeMap<String, Rat>,
    epsilons: &[Rat],
) -> Result<Vec<DeviationSample>, MapError> {
    if !is_subtraction_free(e) {
        return Err(MapError::NotSubtractionFree {
            node: e.to_string(),
        });
    }
    // Wrap the expression as a one-coordinate map to reuse the transform;
    // every name is treated as a coordinate here.
    let mut names: Vec<String> = Vec::new();
    collect_names(e, &mut names);
    names.sort();
    names.dedup();
    for n in &names {
        if !assignment.contains_key(n) {
            return Err(MapError::UnboundName { name: n.clone() });
        }
    }
    let as_vars: Expr = rename_params_to_vars(e);
    let map = RationalMap {
        vars: names.clone(),
        params: Vec::new(),
        updates: vec![as_vars.clone()],
    };
    let tmap = ultradiscretize(&map)?;
    let trop_env: crate::maxplus::Env<TropicalValue> = tmap
        .vars
        .iter()
        .zip(&names)
        .map(|(tn, n)| {
            (
                tn.clone(),
                TropicalValue::finite(assignment[n].clone()),
            )
        })
        .collect();
    let target = eval_trop(&tmap.updates[0], &trop_env)
        .expect("tropical image of subtraction-free expression evaluates");
    let target = match target {
        TropicalValue::Finite(r) => rat_to_f64(&r),
        TropicalValue::NegInf => f64::NEG_INFINITY,
    };

    let float_env: BTreeMap<String, f64> = names
        .iter()
        .map(|n| (n.clone(), rat_to_f64(&assignment[n])))
        .collect();
    let mut out = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let eps_f = rat_to_f64(eps);
        let y = eps_log_eval(&as_vars, &float_env, eps_f);
        let dev = if y.is_finite() && target.is_finite() {
            Deviation::Value((y - target).abs())
        } else {
            Deviation::OverflowAtEpsilon
        };
        out.push(DeviationSample {
            epsilon: eps.clone(),
            deviation: dev,
        });
    }
    Ok(out)
}

fn collect_names(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Lit(_) => {}
        Expr::Var(v) | Expr::Param(v) => out.push(v.clone()),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        Expr::Neg(a) => collect_names(a, out),
        Expr::Pow(a, _) => collect_names(a, out),
    }
}

fn rename_params_to_vars(e: &Expr) -> Expr {
    match e {
        Expr::Param(p) => Expr::Var(p.clone()),
        Expr::Lit(_) | Expr::Var(_) => e.clone(),
        Expr::Add(a, b) => Expr::Add(
            Box::new(rename_params_to_vars(a)),
            Box::new(rename_params_to_vars(b)),
        ),
        Expr::Sub(a, b) => Expr::Sub(
            Box::new(rename_params_to_vars(a)),
            Box::new(rename_params_to_vars(b)),
        ),
        Expr::Mul(a, b) => Expr::Mul(
            Box::new(rename_params_to_vars(a)),
            Box::new(rename_params_to_vars(b)),
        ),
        Expr::Div(a, b) => Expr::Div(
            Box::new(rename_params_to_vars(a)),
            Box::new(rename_params_to_vars(b)),
        ),
        Expr::Neg(a) => Expr::Neg(Box::new(rename_params_to_vars(a))),
        Expr::Pow(a, k) => Expr::Pow(Box::new(rename_params_to_vars(a)), *k),
    }
}
