//! Command-line front end over the core analyses: builtin maps, request
//! resolution, scenario files, and table rendering.
//!
//! Exit-code contract: 0 means the analysis ran and reached a good outcome
//! (confined, recovered, equal valuations, all checks pass), 1 means the
//! analysis ran and reached a negative finding (not confined, divergence,
//! bound exceeded), 2 means the request itself failed. Tables go to stdout;
//! diagnostics and, in CSV mode, verdict lines go to stderr.

pub mod builtins;
pub mod request;
pub mod scenario;
pub mod table;

use thiserror::Error;
use tropdyn::discrete::DiscreteError;
use tropdyn::mapdsl::MapError;
use tropdyn::tropcorr::{CompareError, CorrError};
use tropdyn::ultra::UltraError;

/// Everything the front end itself can reject, plus pass-through wrappers
/// for the analysis errors of the core crate.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown map `{name}`: not a builtin and not a readable file")]
    UnknownMap { name: String },
    #[error("cannot read map file `{path}`: {source}")]
    MapRead {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot read scenario file `{path}`: {source}")]
    ScenarioRead {
        path: String,
        source: std::io::Error,
    },
    #[error("`--sigma` selects a member of the qp1/udp1 families; `{name}` is not one")]
    SigmaConflict { name: String },
    #[error("bad {what} `{text}`: {why}")]
    BadValue {
        what: String,
        text: String,
        why: String,
    },
    #[error("`{analysis}` requires `{key}`")]
    MissingKey {
        analysis: &'static str,
        key: &'static str,
    },
    #[error("`{analysis}` does not use `{key}`")]
    UnusedKey {
        analysis: &'static str,
        key: &'static str,
    },
    #[error("`{analysis}` takes exactly one of `{a}` and `{b}`")]
    ExactlyOne {
        analysis: &'static str,
        a: &'static str,
        b: &'static str,
    },
    #[error("`{analysis}` needs a rational map, but `{name}` is already piecewise-linear")]
    NeedsRational {
        analysis: &'static str,
        name: String,
    },
    #[error("`{name}` is not a coordinate of the map")]
    UnknownCoordinate { name: String },
    #[error("no initial value for coordinate `{name}`")]
    MissingInit { name: String },
    #[error("coordinate `{name}` is the {role} coordinate and cannot also be initialized")]
    InitConflict { name: String, role: &'static str },
    #[error("no value for parameter `{alias}`")]
    MissingParam { alias: String },
    #[error("`{name}` is not a parameter of the map")]
    UnknownParam { name: String },
    #[error("step {step}: {msg}")]
    Step { step: usize, msg: String },
    #[error("scenario line {line}: {msg}")]
    ScenarioLine { line: usize, msg: String },
    #[error("scenario: {msg}")]
    Scenario { msg: String },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Discrete(#[from] DiscreteError),
    #[error(transparent)]
    Ultra(#[from] UltraError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// Result of a successfully executed request: rendered stdout text, stderr
/// diagnostics, and whether the analysis reached a negative finding.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out: String,
    pub diag: String,
    pub finding: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.finding {
            1
        } else {
            0
        }
    }
}
