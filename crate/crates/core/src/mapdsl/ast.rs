//! Syntax trees for rational maps and their piecewise-linear images.

use std::collections::BTreeMap;
use std::fmt;

use crate::maxplus::TropExpr;
use crate::rat::Rat;

/// Rational expression in map coordinates and parameters.
///
/// `Pow` exponents are integers fixed at parse time. Literal quotients and
/// negated literals are folded by the parser, so `3/4` is a single `Lit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(Rat),
    Var(String),
    Param(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    /// Replaces state variables by expressions; parameters are untouched.
    pub fn substitute(&self, subst: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Lit(_) | Expr::Param(_) => self.clone(),
            Expr::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.substitute(subst)),
                Box::new(b.substitute(subst)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.substitute(subst)),
                Box::new(b.substitute(subst)),
            ),
            Expr::Mul(a, b) => Expr::Mul(
                Box::new(a.substitute(subst)),
                Box::new(b.substitute(subst)),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(a.substitute(subst)),
                Box::new(b.substitute(subst)),
            ),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(subst))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.substitute(subst)), *k),
        }
    }
}

// Precedence levels used when rendering: additive 1, multiplicative 2,
// leaf/parenthesized 3. Right operands are rendered one level up so that
// re-parsing reproduces the same left-associated tree. A non-integer literal
// prints as a quotient of integers, so it sits at multiplicative level: bare
// in `x + 1/2` but parenthesized in `x*(1/2)`, where `x*1/2` would re-parse
// as `(x*1)/2`.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Lit(r) if !r.is_integer() => 2,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Lit(_) | Expr::Var(_) | Expr::Param(_) | Expr::Neg(_) | Expr::Pow(..) => 3,
    }
}

fn write_prec(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(r) => write!(f, "{}", r),
            Expr::Var(v) | Expr::Param(v) => write!(f, "{}", v),
            Expr::Add(a, b) => {
                write_prec(a, 1, f)?;
                write!(f, " + ")?;
                write_prec(b, 2, f)
            }
            Expr::Sub(a, b) => {
                write_prec(a, 1, f)?;
                write!(f, " - ")?;
                write_prec(b, 2, f)
            }
            Expr::Mul(a, b) => {
                write_prec(a, 2, f)?;
                write!(f, "*")?;
                write_prec(b, 3, f)
            }
            Expr::Div(a, b) => {
                write_prec(a, 2, f)?;
                write!(f, "/")?;
                write_prec(b, 3, f)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                match **a {
                    Expr::Var(_) | Expr::Param(_) | Expr::Neg(_) => write!(f, "{}", a),
                    Expr::Lit(ref r) if r.is_integer() && *r >= Rat::default() => {
                        write!(f, "{}", r)
                    }
                    _ => write!(f, "({})", a),
                }
            }
            Expr::Pow(base, k) => {
                match **base {
                    Expr::Var(_) | Expr::Param(_) => write!(f, "{}", base)?,
                    Expr::Lit(ref r) if r.is_integer() && *r >= Rat::default() => {
                        write!(f, "{}", r)?
                    }
                    _ => write!(f, "({})", base)?,
                }
                if *k < 0 {
                    write!(f, "^({})", k)
                } else {
                    write!(f, "^{}", k)
                }
            }
        }
    }
}

/// A rational map in the text format: declared coordinates, optional
/// parameters with their tropical aliases, and one update per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    pub vars: Vec<String>,
    /// `(source name, tropical alias)` pairs.
    pub params: Vec<(String, String)>,
    /// Updates aligned with `vars`.
    pub updates: Vec<Expr>,
}

impl RationalMap {
    pub fn update_for(&self, var: &str) -> Option<&Expr> {
        self.vars
            .iter()
            .position(|v| v == var)
            .map(|i| &self.updates[i])
    }

    /// Index of a coordinate pair `(i, j)` such that the update of
    /// coordinate `i` is exactly coordinate `j`: the shift structure of a
    /// second-order scalar recurrence written as a first-order system.
    pub fn shift_pair(&self) -> Option<(usize, usize)> {
        for (i, u) in self.updates.iter().enumerate() {
            if let Expr::Var(v) = u {
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

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars: {}", self.vars.join(", "))?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|(s, a)| format!("{} -> {}", s, a))
                .collect();
            write!(f, "\nparams: {}", ps.join(", "))?;
        }
        for (v, u) in self.vars.iter().zip(&self.updates) {
            write!(f, "\n{}' = {}", v, u)?;
        }
        Ok(())
    }
}

/// The piecewise-linear image of a rational map: same coordinate structure,
/// updates over the max-plus expression language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalMap {
    pub vars: Vec<String>,
    /// Tropical parameter names (the declared aliases).
    pub params: Vec<String>,
    pub updates: Vec<TropExpr>,
}

impl TropicalMap {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

impl fmt::Display for TropicalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars: {}", self.vars.join(", "))?;
        if !self.params.is_empty() {
            write!(f, "\nparams: {}", self.params.join(", "))?;
        }
        for (v, u) in self.vars.iter().zip(&self.updates) {
            write!(f, "\n{}' = {}", v, u)?;
        }
        Ok(())
    }
}
