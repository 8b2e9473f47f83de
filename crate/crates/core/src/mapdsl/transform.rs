//! Structural operations on map syntax: the subtraction-free check and the
//! operator-replacement transform that sends a rational map to its
//! piecewise-linear image.
//!
//! The transform replaces sums by maxima, products by sums, quotients by
//! differences, and integer powers by integer scaling. Positive literals map
//! to tropical zero; declared parameters map to their tropical aliases.
//! Subtraction, negation, and non-positive literals have no image, and the
//! transform reports the offending subexpression.

use crate::mapdsl::ast::{Expr, RationalMap, TropicalMap};
use crate::mapdsl::MapError;
use crate::maxplus::{TropExpr, TropicalValue};
use crate::rat::Rat;

/// True when the expression uses only positive literals, names, sums,
/// products, quotients, and integer powers.
pub fn is_subtraction_free(e: &Expr) -> bool {
    match e {
        Expr::Lit(c) => *c > Rat::default(),
        Expr::Var(_) | Expr::Param(_) => true,
        Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            is_subtraction_free(a) && is_subtraction_free(b)
        }
        Expr::Sub(..) | Expr::Neg(_) => false,
        Expr::Pow(a, _) => is_subtraction_free(a),
    }
}

pub fn is_subtraction_free_map(m: &RationalMap) -> bool {
    m.updates.iter().all(is_subtraction_free)
}

/// Tropical coordinate names: each name uppercased when that renaming is
/// injective and actually changes something, otherwise the original names.
fn tropical_names(m: &RationalMap) -> Result<(Vec<String>, Vec<String>), MapError> {
    let aliases: Vec<String> = m.params.iter().map(|(_, a)| a.clone()).collect();
    let upper: Vec<String> = m.vars.iter().map(|v| v.to_uppercase()).collect();
    let mut all: Vec<&String> = upper.iter().chain(aliases.iter()).collect();
    all.sort();
    let injective = all.windows(2).all(|w| w[0] != w[1]);
    let changes = upper.iter().zip(&m.vars).any(|(u, v)| u != v);
    if injective && changes {
        return Ok((upper, aliases));
    }
    let mut all: Vec<&String> = m.vars.iter().chain(aliases.iter()).collect();
    all.sort();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(MapError::NameCollision {
            name: all
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0].clone())
                .unwrap_or_default(),
        });
    }
    Ok((m.vars.clone(), aliases))
}

fn ud_expr(
    e: &Expr,
    m: &RationalMap,
    var_names: &[String],
) -> Result<TropExpr, MapError> {
    Ok(match e {
        Expr::Lit(c) if *c > Rat::default() => TropExpr::Lit(TropicalValue::finite(Rat::default())),
        Expr::Lit(_) | Expr::Sub(..) | Expr::Neg(_) => {
            return Err(MapError::NotSubtractionFree {
                node: e.to_string(),
            })
        }
        Expr::Var(v) => {
            let i = m.vars.iter().position(|w| w == v).expect("declared var");
            TropExpr::Var(var_names[i].clone())
        }
        Expr::Param(p) => {
            let alias = m
                .params
                .iter()
                .find(|(s, _)| s == p)
                .map(|(_, a)| a.clone())
                .expect("declared param");
            TropExpr::Var(alias)
        }
        Expr::Add(a, b) => {
            let mut args = Vec::new();
            flatten_max(ud_expr(a, m, var_names)?, &mut args);
            flatten_max(ud_expr(b, m, var_names)?, &mut args);
            TropExpr::Max(args)
        }
        Expr::Mul(a, b) => {
            let mut args = Vec::new();
            flatten_plus(ud_expr(a, m, var_names)?, &mut args);
            flatten_plus(ud_expr(b, m, var_names)?, &mut args);
            TropExpr::Plus(args)
        }
        Expr::Div(a, b) => TropExpr::Minus(
            Box::new(ud_expr(a, m, var_names)?),
            Box::new(ud_expr(b, m, var_names)?),
        ),
        Expr::Pow(a, k) => TropExpr::IntScale(*k, Box::new(ud_expr(a, m, var_names)?)),
    })
}

fn flatten_max(e: TropExpr, out: &mut Vec<TropExpr>) {
    match e {
        TropExpr::Max(args) => out.extend(args),
        other => out.push(other),
    }
}

fn flatten_plus(e: TropExpr, out: &mut Vec<TropExpr>) {
    match e {
        TropExpr::Plus(args) => out.extend(args),
        other => out.push(other),
    }
}

/// Operator replacement on every update. Fails with `NotSubtractionFree` if
/// any update leaves the subtraction-free fragment.
pub fn ultradiscretize(m: &RationalMap) -> Result<TropicalMap, MapError> {
    let (var_names, param_names) = tropical_names(m)?;
    let mut updates = Vec::with_capacity(m.updates.len());
    for u in &m.updates {
        updates.push(ud_expr(u, m, &var_names)?);
    }
    Ok(TropicalMap {
        vars: var_names,
        params: param_names,
        updates,
    })
}
