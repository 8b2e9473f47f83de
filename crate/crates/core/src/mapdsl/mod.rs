//! A small text format for rational maps, with parsing, evaluation over
//! pluggable coefficient domains, the subtraction-free check, operator
//! replacement onto the max-plus language, series lifts, and a
//! floating-point limit check.
//!
//! Invariants:
//! - Parsing validates that every name is declared and every coordinate has
//!   exactly one update; a parsed map rendered with `Display` re-parses to a
//!   structurally identical map.
//! - Operator replacement is defined exactly on the subtraction-free
//!   fragment and fails with the offending subexpression otherwise.
//! - For subtraction-free expressions, evaluating the replaced expression on
//!   valuations equals the valuation of the series evaluation whenever no
//!   leading-term cancellation occurs.

pub mod ast;
pub mod eval;
pub mod lift;
pub mod parser;
pub mod transform;

pub use ast::{Expr, RationalMap, TropicalMap};
pub use eval::{
    eval_expr_in, log_term_count, numeric_ud_check, Deviation, DeviationSample, ExprError,
    FieldDomain, NumError, Rationals,
};
pub use lift::{signed_monomial, LiftedMap, PuiseuxField};
pub use parser::parse_map;
pub use transform::{is_subtraction_free, is_subtraction_free_map, ultradiscretize};

use thiserror::Error;

/// Errors from parsing, validation, and structural transforms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared name `{name}` at line {line}, column {col}")]
    UndeclaredName {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("non-integer exponent at line {line}, column {col}")]
    NonIntegerExponent { line: usize, col: usize },
    #[error("duplicate declaration of `{name}`")]
    DuplicateName { name: String },
    #[error("missing update for coordinate `{name}`")]
    MissingUpdate { name: String },
    #[error("duplicate update for coordinate `{name}`")]
    DuplicateUpdate { name: String },
    #[error("not subtraction-free: `{node}`")]
    NotSubtractionFree { node: String },
    #[error("zero coefficient assigned to `{name}`; pass the zero series explicitly")]
    ZeroAssignment { name: String },
    #[error("tropical name collision on `{name}`")]
    NameCollision { name: String },
    #[error("no value bound for `{name}`")]
    UnboundName { name: String },
}
