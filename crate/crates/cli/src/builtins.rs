//! Built-in maps available by name.
//!
//! Rational builtins are embedded as map-DSL sources; piecewise-linear
//! builtins are the operator-replacement images of their rational
//! counterparts, so the two families stay in sync by construction.

use tropdyn::mapdsl::{parse_map, ultradiscretize, RationalMap, TropicalMap};

use crate::CliError;

/// A resolved map: either a rational map (with its text source) or the
/// piecewise-linear image of one.
#[derive(Debug, Clone)]
pub enum MapSpec {
    Rational(RationalMap),
    Tropical(TropicalMap),
}

const AUTONOMOUS: &str = "\
vars: w0, w1
w0' = w1
w1' = (w1 + 1)/w0";

fn qp1_source(sigma: u32) -> String {
    format!(
        "\
vars: x, y, t
params: a -> A, q -> Q
x' = y
y' = (a*t*y + 1)/(x*y^{sigma})
t' = q*t"
    )
}

/// Names accepted by `--map`, in the order shown to users.
pub const BUILTIN_NAMES: [&str; 10] = [
    "autonomous",
    "ud-autonomous",
    "qp1-sigma0",
    "qp1-sigma1",
    "qp1-sigma2",
    "udp1-sigma0",
    "udp1-sigma1",
    "udp1-sigma2",
    "qp1",
    "udp1",
];

fn parse_builtin(source: &str) -> RationalMap {
    parse_map(source).expect("builtin sources parse")
}

fn ud_builtin(source: &str) -> TropicalMap {
    ultradiscretize(&parse_builtin(source)).expect("builtin sources are subtraction-free")
}

/// Resolves a builtin name, with `sigma` selecting the member of the `qp1`
/// and `udp1` families. Explicit `-sigmaK` names reject a conflicting flag.
pub fn builtin(name: &str, sigma: Option<u32>) -> Result<MapSpec, CliError> {
    let family = || -> Result<u32, CliError> {
        match sigma {
            None => Ok(0),
            Some(k @ 0..=2) => Ok(k),
            Some(k) => Err(CliError::BadValue {
                what: "sigma".into(),
                text: k.to_string(),
                why: "must be 0, 1, or 2".into(),
            }),
        }
    };
    let fixed = |base: &str, k: u32| -> Result<u32, CliError> {
        match sigma {
            Some(s) if s != k => Err(CliError::SigmaConflict { name: base.to_string() }),
            _ => Ok(k),
        }
    };
    match name {
        "autonomous" => {
            if sigma.is_some() {
                return Err(CliError::SigmaConflict { name: name.to_string() });
            }
            Ok(MapSpec::Rational(parse_builtin(AUTONOMOUS)))
        }
        "ud-autonomous" => {
            if sigma.is_some() {
                return Err(CliError::SigmaConflict { name: name.to_string() });
            }
            Ok(MapSpec::Tropical(ud_builtin(AUTONOMOUS)))
        }
        "qp1" => Ok(MapSpec::Rational(parse_builtin(&qp1_source(family()?)))),
        "udp1" => Ok(MapSpec::Tropical(ud_builtin(&qp1_source(family()?)))),
        "qp1-sigma0" => Ok(MapSpec::Rational(parse_builtin(&qp1_source(fixed(name, 0)?)))),
        "qp1-sigma1" => Ok(MapSpec::Rational(parse_builtin(&qp1_source(fixed(name, 1)?)))),
        "qp1-sigma2" => Ok(MapSpec::Rational(parse_builtin(&qp1_source(fixed(name, 2)?)))),
        "udp1-sigma0" => Ok(MapSpec::Tropical(ud_builtin(&qp1_source(fixed(name, 0)?)))),
        "udp1-sigma1" => Ok(MapSpec::Tropical(ud_builtin(&qp1_source(fixed(name, 1)?)))),
        "udp1-sigma2" => Ok(MapSpec::Tropical(ud_builtin(&qp1_source(fixed(name, 2)?)))),
        _ => Err(CliError::UnknownMap { name: name.to_string() }),
    }
}

pub fn is_builtin(name: &str) -> bool {
    BUILTIN_NAMES.contains(&name)
}

/// Parses and replaces every builtin once, so a bad embedded source fails
/// fast instead of surfacing mid-analysis.
pub fn validate_builtins() {
    for name in BUILTIN_NAMES {
        builtin(name, None).expect("builtins resolve");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_resolve() {
        validate_builtins();
    }

    #[test]
    fn sigma_selects_the_family_member() {
        let MapSpec::Rational(m) = builtin("qp1", Some(2)).unwrap() else {
            panic!("qp1 is rational");
        };
        assert!(m.updates[1].to_string().contains("y^2"));
        let MapSpec::Rational(base) = builtin("qp1-sigma0", None).unwrap() else {
            panic!("qp1-sigma0 is rational");
        };
        assert!(base.updates[1].to_string().contains("y^0"));
    }

    #[test]
    fn explicit_names_reject_conflicting_sigma() {
        assert!(matches!(
            builtin("qp1-sigma1", Some(2)),
            Err(CliError::SigmaConflict { .. })
        ));
        assert!(builtin("qp1-sigma1", Some(1)).is_ok());
        assert!(matches!(
            builtin("autonomous", Some(1)),
            Err(CliError::SigmaConflict { .. })
        ));
    }

    #[test]
    fn tropical_builtins_are_replacement_images() {
        let MapSpec::Tropical(t) = builtin("ud-autonomous", None).unwrap() else {
            panic!("ud-autonomous is tropical");
        };
        assert_eq!(t.vars, vec!["W0".to_string(), "W1".to_string()]);
        let MapSpec::Tropical(u) = builtin("udp1-sigma1", None).unwrap() else {
            panic!("udp1-sigma1 is tropical");
        };
        assert_eq!(u.vars, vec!["X".to_string(), "Y".to_string(), "T".to_string()]);
        assert_eq!(u.params, vec!["A".to_string(), "Q".to_string()]);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(
            builtin("qp2", None),
            Err(CliError::UnknownMap { .. })
        ));
    }
}
