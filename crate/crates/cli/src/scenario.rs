//! Flat `key = value` scenario files.
//!
//! One scenario per file: `#` starts a comment, blank lines are skipped,
//! `init`, `lift`, and `param` may repeat, every other key appears at most
//! once. The keys mirror the command-line flags one to one.

use crate::request::{Analysis, RequestArgs};
use crate::table::Format;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub analysis: Analysis,
    pub args: RequestArgs,
}

fn err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::ScenarioLine {
        line,
        msg: msg.into(),
    }
}

fn file_err(msg: impl Into<String>) -> CliError {
    CliError::Scenario { msg: msg.into() }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let mut analysis: Option<Analysis> = None;
    let mut args = RequestArgs::default();
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, format!("expected `key = value`, got `{line}`")));
        };
        let key = key.trim();
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(err(lineno, format!("key `{key}` has no value")));
        }

        let repeatable = matches!(key, "init" | "lift" | "param");
        if !repeatable {
            if seen.iter().any(|k| k == key) {
                return Err(err(lineno, format!("key `{key}` given twice")));
            }
            seen.push(key.to_string());
        }

        match key {
            "map" => args.map = Some(value),
            "analysis" => {
                analysis = Some(match value.as_str() {
                    "orbit" => Analysis::Orbit,
                    "confine-discrete" => Analysis::ConfineDiscrete,
                    "confine-ultra" => Analysis::ConfineUltra,
                    "correspond" => Analysis::Correspond,
                    "lemma3" => Analysis::Lemma3,
                    other => {
                        return Err(err(lineno, format!("unknown analysis `{other}`")));
                    }
                });
            }
            "perturb" => args.perturb = Some(value),
            "free" => args.free = Some(value),
            "samples" => args.samples = Some(value),
            "steps" => {
                args.steps = Some(value.parse().map_err(|_| {
                    err(lineno, format!("`steps` must be a non-negative integer, got `{value}`"))
                })?);
            }
            "depth" => args.depth = Some(value),
            "format" => {
                args.format = match value.as_str() {
                    "md" => Format::Md,
                    "csv" => Format::Csv,
                    other => {
                        return Err(err(lineno, format!("`format` must be md or csv, got `{other}`")));
                    }
                };
            }
            "sigma" => {
                args.sigma = Some(value.parse().map_err(|_| {
                    err(lineno, format!("`sigma` must be an integer, got `{value}`"))
                })?);
            }
            "init" => args.init.push(value),
            "lift" => args.lift.push(value),
            "param" => args.param.push(value),
            "A" => args.param.push(format!("A={value}")),
            "Q" => args.param.push(format!("Q={value}")),
            "T0" => args.t0 = Some(value),
            other => return Err(err(lineno, format!("unknown key `{other}`"))),
        }
    }

    let analysis = analysis.ok_or_else(|| file_err("missing required key `analysis`"))?;
    if args.map.is_none() {
        return Err(file_err("missing required key `map`"));
    }
    Ok(Scenario { analysis, args })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_repeats() {
        let s = parse_scenario(
            "# jets through the singular point\n\
             map = ud-autonomous\n\
             analysis = confine-ultra\n\
             init = W0=3\n\
             perturb = W1@0  # base value\n\
             steps = 8\n",
        )
        .unwrap();
        assert!(matches!(s.analysis, Analysis::ConfineUltra));
        assert_eq!(s.args.map.as_deref(), Some("ud-autonomous"));
        assert_eq!(s.args.init, vec!["W0=3".to_string()]);
        assert_eq!(s.args.perturb.as_deref(), Some("W1@0"));
        assert_eq!(s.args.steps, Some(8));
    }

    #[test]
    fn nonautonomous_keys_become_params() {
        let s = parse_scenario(
            "map = qp1\nsigma = 1\nanalysis = orbit\nA = 1/2\nQ = -1\nT0 = 0\n\
             init = x=1\ninit = y=1\nsteps = 4\n",
        )
        .unwrap();
        assert_eq!(s.args.param, vec!["A=1/2".to_string(), "Q=-1".to_string()]);
        assert_eq!(s.args.t0.as_deref(), Some("0"));
        assert_eq!(s.args.sigma, Some(1));
    }

    #[test]
    fn duplicate_singleton_keys_are_rejected() {
        let e = parse_scenario("map = autonomous\nmap = qp1\nanalysis = orbit\n");
        assert!(matches!(e, Err(CliError::ScenarioLine { line: 2, .. })));
    }

    #[test]
    fn missing_analysis_or_map_is_rejected() {
        assert!(parse_scenario("map = autonomous\n").is_err());
        assert!(parse_scenario("analysis = orbit\n").is_err());
    }

    #[test]
    fn unknown_keys_and_kinds_are_rejected() {
        assert!(parse_scenario("map = autonomous\nanalysis = orbit\nfoo = 1\n").is_err());
        assert!(parse_scenario("map = autonomous\nanalysis = blowup\n").is_err());
    }
}
