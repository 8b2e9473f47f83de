//! Line-oriented parser for the rational-map text format.
//!
//! ```text
//! # comment
//! vars: x, y
//! params: a -> A, q -> Q
//! x' = y
//! y' = (a*t*y + 1)/(x*y^2)
//! ```
//!
//! Grammar per update line (whitespace-insensitive inside expressions):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ['^' exponent]
//! atom   := integer | name | '(' expr ')' | '-' atom
//! ```
//!
//! Exponents must be integers; `x^(1/2)` is rejected. Quotients of literals
//! fold to a single rational literal, so `3/4` and `3 / 4` both parse to
//! `Lit(3/4)`, while `x^3/2` keeps the conventional reading `(x^3)/2`.

use std::collections::BTreeSet;

use crate::mapdsl::ast::{Expr, RationalMap};
use crate::mapdsl::MapError;
use crate::rat::Rat;
use num::BigInt;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<Spanned>, MapError> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = i + 1;
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Spanned { tok: Tok::Plus, col });
            }
            '-' => {
                chars.next();
                out.push(Spanned { tok: Tok::Minus, col });
            }
            '*' => {
                chars.next();
                out.push(Spanned { tok: Tok::Star, col });
            }
            '/' => {
                chars.next();
                out.push(Spanned { tok: Tok::Slash, col });
            }
            '^' => {
                chars.next();
                out.push(Spanned { tok: Tok::Caret, col });
            }
            '(' => {
                chars.next();
                out.push(Spanned { tok: Tok::LParen, col });
            }
            ')' => {
                chars.next();
                out.push(Spanned { tok: Tok::RParen, col });
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: BigInt = digits.parse().expect("digit run");
                out.push(Spanned { tok: Tok::Int(n), col });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Name(name), col });
            }
            other => {
                return Err(MapError::Syntax {
                    line: lineno,
                    col,
                    msg: format!("unexpected character `{}`", other),
                });
            }
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    line_len: usize,
    vars: &'a BTreeSet<String>,
    params: &'a BTreeSet<String>,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|s| s.col).unwrap_or(self.line_len + 1)
    }

    fn syntax(&self, msg: impl Into<String>) -> MapError {
        MapError::Syntax {
            line: self.line,
            col: self.here(),
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, MapError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, MapError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = Expr::Mul(Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = fold_div(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, MapError> {
        let base = self.atom()?;
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.pos += 1;
            let k = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    /// `['-'] integer` or `'(' ['-'] integer ')'`; anything else is a
    /// non-integer exponent.
    fn exponent(&mut self) -> Result<i64, MapError> {
        let col = self.here();
        let parenthesized = if matches!(self.peek().map(|s| &s.tok), Some(Tok::LParen)) {
            self.pos += 1;
            true
        } else {
            false
        };
        let negate = if matches!(self.peek().map(|s| &s.tok), Some(Tok::Minus)) {
            self.pos += 1;
            true
        } else {
            false
        };
        let k = match self.bump().map(|s| s.tok.clone()) {
            Some(Tok::Int(n)) => i64::try_from(&n).map_err(|_| MapError::Syntax {
                line: self.line,
                col,
                msg: "exponent out of range".to_string(),
            })?,
            _ => {
                return Err(MapError::NonIntegerExponent {
                    line: self.line,
                    col,
                })
            }
        };
        if parenthesized {
            match self.bump().map(|s| s.tok.clone()) {
                Some(Tok::RParen) => {}
                _ => {
                    return Err(MapError::NonIntegerExponent {
                        line: self.line,
                        col,
                    })
                }
            }
        }
        Ok(if negate { -k } else { k })
    }

    fn atom(&mut self) -> Result<Expr, MapError> {
        let col = self.here();
        match self.bump().map(|s| s.tok.clone()) {
            Some(Tok::Int(n)) => Ok(Expr::Lit(Rat::from_integer(n))),
            Some(Tok::Name(name)) => {
                if self.vars.contains(&name) {
                    Ok(Expr::Var(name))
                } else if self.params.contains(&name) {
                    Ok(Expr::Param(name))
                } else {
                    Err(MapError::UndeclaredName {
                        line: self.line,
                        col,
                        name,
                    })
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump().map(|s| s.tok.clone()) {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(self.syntax("expected `)`")),
                }
            }
            Some(Tok::Minus) => {
                let inner = self.atom()?;
                Ok(match inner {
                    Expr::Lit(r) => Expr::Lit(-r),
                    other => Expr::Neg(Box::new(other)),
                })
            }
            Some(other) => Err(MapError::Syntax {
                line: self.line,
                col,
                msg: format!("unexpected token `{:?}`", other),
            }),
            None => Err(self.syntax("unexpected end of expression")),
        }
    }
}

/// Literal quotients collapse to the rational they denote, matching the
/// rational-literal production of the grammar.
fn fold_div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Lit(p), Expr::Lit(q)) if *q != Rat::default() => Expr::Lit(p / q),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_name_list(body: &str, lineno: usize, offset: usize) -> Result<Vec<String>, MapError> {
    let mut out = Vec::new();
    for piece in body.split(',') {
        let name = piece.trim();
        if name.is_empty() || !is_valid_name(name) {
            return Err(MapError::Syntax {
                line: lineno,
                col: offset + 1,
                msg: format!("invalid name `{}`", name),
            });
        }
        out.push(name.to_string());
    }
    Ok(out)
}

fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the full map format. Every declared coordinate must receive exactly
/// one update; names in expressions must be declared coordinates or
/// parameters.
pub fn parse_map(input: &str) -> Result<RationalMap, MapError> {
    let mut vars: Vec<String> = Vec::new();
    let mut params: Vec<(String, String)> = Vec::new();
    let mut updates: Vec<Option<Expr>> = Vec::new();
    let mut seen_vars = false;

    for (idx, raw) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }

        if let Some(body) = trimmed.strip_prefix("vars:") {
            if seen_vars {
                return Err(MapError::Syntax {
                    line: lineno,
                    col: 1,
                    msg: "duplicate vars declaration".to_string(),
                });
            }
            seen_vars = true;
            vars = parse_name_list(body, lineno, 0)?;
            let mut set = BTreeSet::new();
            for v in &vars {
                if !set.insert(v.clone()) {
                    return Err(MapError::DuplicateName { name: v.clone() });
                }
            }
            updates = vec![None; vars.len()];
            continue;
        }

        if let Some(body) = trimmed.strip_prefix("params:") {
            for piece in body.split(',') {
                let piece = piece.trim();
                let (src, alias) = piece.split_once("->").ok_or(MapError::Syntax {
                    line: lineno,
                    col: 1,
                    msg: format!("expected `name -> Alias` in `{}`", piece),
                })?;
                let (src, alias) = (src.trim(), alias.trim());
                if !is_valid_name(src) || !is_valid_name(alias) {
                    return Err(MapError::Syntax {
                        line: lineno,
                        col: 1,
                        msg: format!("invalid parameter declaration `{}`", piece),
                    });
                }
                if vars.iter().any(|v| v == src)
                    || params.iter().any(|(s, a)| s == src || a == alias)
                {
                    return Err(MapError::DuplicateName {
                        name: src.to_string(),
                    });
                }
                params.push((src.to_string(), alias.to_string()));
            }
            continue;
        }

        // Update line: `name' = expr`.
        if !seen_vars {
            return Err(MapError::Syntax {
                line: lineno,
                col: 1,
                msg: "vars declaration must come first".to_string(),
            });
        }
        let (lhs, _) = trimmed.split_once('=').ok_or(MapError::Syntax {
            line: lineno,
            col: 1,
            msg: "expected `name' = expr`".to_string(),
        })?;
        let lhs = lhs.trim();
        let name = lhs.strip_suffix('\'').ok_or(MapError::Syntax {
            line: lineno,
            col: 1,
            msg: "update target must end with `'`".to_string(),
        })?;
        let name = name.trim();
        let slot = vars.iter().position(|v| v == name).ok_or_else(|| {
            MapError::UndeclaredName {
                line: lineno,
                col: 1,
                name: name.to_string(),
            }
        })?;
        if updates[slot].is_some() {
            return Err(MapError::DuplicateUpdate {
                name: name.to_string(),
            });
        }

        let var_set: BTreeSet<String> = vars.iter().cloned().collect();
        let param_set: BTreeSet<String> = params.iter().map(|(s, _)| s.clone()).collect();
        // Lex only the right-hand side, blank-padded so error columns stay
        // relative to the full line.
        let eq_col = line.find('=').expect("split_once found `=`");
        let mut padded = " ".repeat(eq_col + 1);
        padded.push_str(&line[eq_col + 1..]);
        let toks = lex_line(&padded, lineno)?;
        let mut p = ExprParser {
            toks: &toks,
            pos: 0,
            line: lineno,
            line_len: line.len(),
            vars: &var_set,
            params: &param_set,
        };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.syntax("trailing tokens after expression"));
        }
        updates[slot] = Some(e);
    }

    if !seen_vars || vars.is_empty() {
        return Err(MapError::Syntax {
            line: 1,
            col: 1,
            msg: "missing vars declaration".to_string(),
        });
    }
    let mut finished = Vec::with_capacity(vars.len());
    for (v, u) in vars.iter().zip(updates) {
        match u {
            Some(e) => finished.push(e),
            None => return Err(MapError::MissingUpdate { name: v.clone() }),
        }
    }
    Ok(RationalMap {
        vars,
        params,
        updates: finished,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn qp1_source() -> &'static str {
        "# second-order recurrence as a first-order system\n\
         vars: x, y, t\n\
         params: a -> A, q -> Q\n\
         x' = y\n\
         y' = (a*t*y + 1)/(x*y^2)\n\
         t' = q*t\n"
    }

    #[test]
    fn parses_full_map() {
        let m = parse_map(qp1_source()).unwrap();
        assert_eq!(m.vars, vec!["x", "y", "t"]);
        assert_eq!(
            m.params,
            vec![
                ("a".to_string(), "A".to_string()),
                ("q".to_string(), "Q".to_string())
            ]
        );
        assert_eq!(m.updates[0], Expr::var("y"));
        assert_eq!(m.shift_pair(), Some((0, 1)));
    }

    #[test]
    fn display_roundtrip_is_structural() {
        let m = parse_map(qp1_source()).unwrap();
        let printed = m.to_string();
        let again = parse_map(&printed).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn literal_quotients_fold() {
        let m = parse_map("vars: x\nx' = 3/4*x + 1 / 2\n").unwrap();
        match &m.updates[0] {
            Expr::Add(l, r) => {
                assert_eq!(**r, Expr::Lit(rat(1, 2)));
                match &**l {
                    Expr::Mul(c, _) => assert_eq!(**c, Expr::Lit(rat(3, 4))),
                    other => panic!("expected product, got {:?}", other),
                }
            }
            other => panic!("expected sum, got {:?}", other),
        }
    }

    #[test]
    fn power_binds_tighter_than_division() {
        let m = parse_map("vars: x\nx' = 2/4^2\n").unwrap();
        assert_eq!(
            m.updates[0],
            Expr::Div(
                Box::new(Expr::Lit(rat_int(2))),
                Box::new(Expr::Pow(Box::new(Expr::Lit(rat_int(4))), 2))
            )
        );
    }

    #[test]
    fn negative_and_parenthesized_exponents() {
        let m = parse_map("vars: x, y\nx' = y^-1\ny' = x^(-2)\n").unwrap();
        assert_eq!(m.updates[0], Expr::Pow(Box::new(Expr::var("y")), -1));
        assert_eq!(m.updates[1], Expr::Pow(Box::new(Expr::var("x")), -2));
    }

    #[test]
    fn rational_exponent_is_rejected() {
        let err = parse_map("vars: x\nx' = x^(1/2)\n").unwrap_err();
        assert!(matches!(err, MapError::NonIntegerExponent { line: 2, .. }));
    }

    #[test]
    fn undeclared_name_reports_position() {
        let err = parse_map("vars: x\nx' = x + w\n").unwrap_err();
        match err {
            MapError::UndeclaredName { line, name, .. } => {
                assert_eq!(line, 2);
                assert_eq!(name, "w");
            }
            other => panic!("expected undeclared-name error, got {:?}", other),
        }
    }

    #[test]
    fn missing_update_is_reported() {
        let err = parse_map("vars: x, y\nx' = y\n").unwrap_err();
        assert!(matches!(err, MapError::MissingUpdate { name } if name == "y"));
    }

    #[test]
    fn duplicate_update_is_reported() {
        let err = parse_map("vars: x\nx' = x\nx' = x + 1\n").unwrap_err();
        assert!(matches!(err, MapError::DuplicateUpdate { name } if name == "x"));
    }

    #[test]
    fn unary_minus_folds_into_literals() {
        let m = parse_map("vars: x\nx' = -3/4 + -x\n").unwrap();
        assert_eq!(
            m.updates[0],
            Expr::Add(
                Box::new(Expr::Lit(rat(-3, 4))),
                Box::new(Expr::Neg(Box::new(Expr::var("x"))))
            )
        );
    }
}
