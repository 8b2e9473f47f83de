//! Request resolution and dispatch: map lookup, typed argument parsing,
//! and one function per analysis turning a core report into table rows,
//! footers, and an exit finding.

use std::collections::BTreeMap;
use std::fs;
use std::thread;

use tropdyn::discrete::{
    run_discrete_confinement, DiscreteSetup, DiscreteStep, DiscreteVerdict, PerturbBase,
    Perturbation,
};
use tropdyn::mapdsl::{
    is_subtraction_free_map, log_term_count, numeric_ud_check, parse_map, ultradiscretize,
    Deviation, ExprError, RationalMap, Rationals, TropicalMap,
};
use tropdyn::maxplus::{eval_trop, parse_tropical, TropicalValue};
use tropdyn::puiseux::{parse_series, PuiseuxSeries};
use tropdyn::rat::{parse_rat, rat, rat_int, rat_to_f64, Rat};
use tropdyn::tropcorr::{
    nd_correspondence, orbit_compare, CorrEntry, CorrSetup, TrackEntry, TrackStatus,
};
use tropdyn::ultra::{
    run_jet_confinement, run_large_orbit, run_pl_orbit, scalar_track, JetSetup, LargeSetup,
    PlSetup,
};

use crate::builtins::{builtin, is_builtin, MapSpec};
use crate::scenario::parse_scenario;
use crate::table::{render, Format, Row};
use crate::{CliError, Outcome};

const DEFAULT_STEPS: usize = 8;
const DEFAULT_DEPTH: i64 = 40;

/// The analyses reachable from scenario files and their command-line twins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analysis {
    Orbit,
    ConfineDiscrete,
    ConfineUltra,
    Correspond,
    Lemma3,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Orbit => "orbit",
            Analysis::ConfineDiscrete => "confine-discrete",
            Analysis::ConfineUltra => "confine-ultra",
            Analysis::Correspond => "correspond",
            Analysis::Lemma3 => "lemma3",
        }
    }
}

/// Raw request arguments, exactly as given on the command line or in a
/// scenario file. Typed interpretation happens at dispatch.
#[derive(Debug, Clone, Default)]
pub struct RequestArgs {
    pub map: Option<String>,
    pub sigma: Option<u32>,
    pub steps: Option<usize>,
    pub depth: Option<String>,
    pub format: Format,
    pub perturb: Option<String>,
    pub free: Option<String>,
    pub samples: Option<String>,
    pub init: Vec<String>,
    pub lift: Vec<String>,
    pub param: Vec<String>,
    pub t0: Option<String>,
    pub epsilons: Option<String>,
}

pub fn run_analysis(analysis: Analysis, args: &RequestArgs) -> Result<Outcome, CliError> {
    let name = analysis.name();
    let (map_name, spec) = resolve_map(name, args)?;
    match analysis {
        Analysis::Orbit => {
            ensure_absent(
                name,
                &[
                    ("perturb", args.perturb.is_some()),
                    ("free", args.free.is_some()),
                    ("samples", args.samples.is_some()),
                    ("lift", !args.lift.is_empty()),
                    ("depth", args.depth.is_some()),
                    ("epsilons", args.epsilons.is_some()),
                ],
            )?;
            run_orbit(&spec, args)
        }
        Analysis::ConfineDiscrete => {
            ensure_absent(
                name,
                &[
                    ("lift", !args.lift.is_empty()),
                    ("depth", args.depth.is_some()),
                    ("epsilons", args.epsilons.is_some()),
                ],
            )?;
            run_confine_discrete(&map_name, &spec, args)
        }
        Analysis::ConfineUltra => {
            ensure_absent(
                name,
                &[
                    ("samples", args.samples.is_some()),
                    ("lift", !args.lift.is_empty()),
                    ("depth", args.depth.is_some()),
                    ("epsilons", args.epsilons.is_some()),
                ],
            )?;
            run_confine_ultra(&spec, args)
        }
        Analysis::Correspond => {
            ensure_absent(
                name,
                &[
                    ("perturb", args.perturb.is_some()),
                    ("free", args.free.is_some()),
                    ("samples", args.samples.is_some()),
                    ("epsilons", args.epsilons.is_some()),
                ],
            )?;
            run_correspond(&map_name, &spec, args)
        }
        Analysis::Lemma3 => {
            ensure_absent(
                name,
                &[
                    ("perturb", args.perturb.is_some()),
                    ("samples", args.samples.is_some()),
                    ("lift", !args.lift.is_empty()),
                    ("depth", args.depth.is_some()),
                    ("epsilons", args.epsilons.is_some()),
                ],
            )?;
            run_lemma3(&map_name, &spec, args)
        }
    }
}

/// `parse`: canonical text form, plus the subtraction-free verdict for
/// rational maps.
pub fn run_parse(map: &str, sigma: Option<u32>) -> Result<Outcome, CliError> {
    let spec = resolve_named(map, sigma)?;
    let out = match &spec {
        MapSpec::Rational(m) => {
            let sf = if is_subtraction_free_map(m) { "yes" } else { "no" };
            format!("{m}\nsubtraction-free: {sf}\n")
        }
        MapSpec::Tropical(t) => format!("{t}\n"),
    };
    Ok(Outcome {
        out,
        diag: String::new(),
        finding: false,
    })
}

/// `trop`: the max-plus image of a rational map; a map that is already
/// piecewise-linear prints unchanged.
pub fn run_trop(map: &str, sigma: Option<u32>) -> Result<Outcome, CliError> {
    let spec = resolve_named(map, sigma)?;
    let t = match &spec {
        MapSpec::Rational(m) => ultradiscretize(m)?,
        MapSpec::Tropical(t) => t.clone(),
    };
    Ok(Outcome {
        out: format!("{t}\n"),
        diag: String::new(),
        finding: false,
    })
}

/// `check-limit`: numeric deviations between the scaled logarithm of each
/// update and its max-plus image, against an `eps * ln(term count)` bound.
pub fn run_check_limit(args: &RequestArgs) -> Result<Outcome, CliError> {
    let (map_name, spec) = resolve_map("check-limit", args)?;
    ensure_absent(
        "check-limit",
        &[
            ("perturb", args.perturb.is_some()),
            ("free", args.free.is_some()),
            ("samples", args.samples.is_some()),
            ("lift", !args.lift.is_empty()),
            ("steps", args.steps.is_some()),
            ("depth", args.depth.is_some()),
        ],
    )?;
    let MapSpec::Rational(m) = &spec else {
        return Err(CliError::NeedsRational {
            analysis: "check-limit",
            name: map_name,
        });
    };
    let aliases = normalize_aliases(m, alias_params(args)?)?;
    let params = source_params(m, &aliases)?;
    let mut assignment = rational_inits(m, args)?;
    for v in &m.vars {
        if !assignment.contains_key(v) {
            return Err(CliError::MissingInit { name: v.clone() });
        }
    }
    assignment.extend(params);

    let epsilons: Vec<Rat> = match &args.epsilons {
        Some(text) => text
            .split(',')
            .map(|s| rat_arg("epsilons", s.trim()))
            .collect::<Result<_, _>>()?,
        None => vec![rat(1, 10), rat(1, 100), rat(1, 1000)],
    };

    let mut rows = Vec::new();
    let mut exceeded = false;
    for (i, (v, u)) in m.vars.iter().zip(&m.updates).enumerate() {
        let samples = numeric_ud_check(u, &assignment, &epsilons)?;
        let log_terms = log_term_count(u);
        for s in &samples {
            // small absolute allowance for the floating evaluation itself
            let bound = rat_to_f64(&s.epsilon) * log_terms + 1e-9;
            let (value, flag) = match s.deviation {
                Deviation::Value(d) => {
                    if d <= bound {
                        (format!("{d:.5e}"), "ok")
                    } else {
                        exceeded = true;
                        (format!("{d:.5e}"), "exceeds")
                    }
                }
                Deviation::OverflowAtEpsilon => ("overflow".to_string(), "overflow"),
            };
            rows.push(Row::new(i, v, &format!("eps={}", s.epsilon), value, flag));
        }
    }
    let verdict = if exceeded {
        "verdict: deviations exceed the eps * ln(term count) bound"
    } else {
        "verdict: deviations vanish within the eps * ln(term count) bound"
    };
    Ok(finish(rows, vec![verdict.to_string()], exceeded, args.format))
}

/// Reads, parses, and executes one scenario file.
pub fn run_scenario_file(path: &str) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::ScenarioRead {
        path: path.to_string(),
        source: e,
    })?;
    let sc = parse_scenario(&text)?;
    run_analysis(sc.analysis, &sc.args)
}

/// Executes scenario files concurrently and assembles output in declaration
/// order. Returns `(stdout, stderr, exit code)`; the exit code is the worst
/// over all scenarios.
pub fn run_batch(paths: &[String]) -> (String, String, i32) {
    let results: Vec<Result<Outcome, CliError>> = thread::scope(|s| {
        let handles: Vec<_> = paths
            .iter()
            .map(|p| s.spawn(move || run_scenario_file(p)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    });

    let many = paths.len() > 1;
    let mut out = String::new();
    let mut diag = String::new();
    let mut code = 0;
    for (i, (path, res)) in paths.iter().zip(&results).enumerate() {
        match res {
            Ok(o) => {
                if many {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.push_str(&format!("# scenario: {path}\n"));
                }
                out.push_str(&o.out);
                if !o.diag.is_empty() {
                    if many {
                        for line in o.diag.lines() {
                            diag.push_str(&format!("{path}: {line}\n"));
                        }
                    } else {
                        diag.push_str(&o.diag);
                    }
                }
                code = code.max(o.exit_code());
            }
            Err(e) => {
                diag.push_str(&format!("{path}: error: {e}\n"));
                code = 2;
            }
        }
    }
    (out, diag, code)
}

// ---- map resolution ----

fn resolve_map(analysis: &'static str, args: &RequestArgs) -> Result<(String, MapSpec), CliError> {
    let name = args.map.clone().ok_or(CliError::MissingKey {
        analysis,
        key: "map",
    })?;
    let spec = resolve_named(&name, args.sigma)?;
    Ok((name, spec))
}

fn resolve_named(name: &str, sigma: Option<u32>) -> Result<MapSpec, CliError> {
    if is_builtin(name) {
        return builtin(name, sigma);
    }
    let text = fs::read_to_string(name).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::UnknownMap {
            name: name.to_string(),
        },
        _ => CliError::MapRead {
            path: name.to_string(),
            source: e,
        },
    })?;
    if sigma.is_some() {
        return Err(CliError::SigmaConflict {
            name: name.to_string(),
        });
    }
    Ok(MapSpec::Rational(parse_map(&text)?))
}

// ---- argument parsing helpers ----

fn bad(what: &str, text: &str, why: &str) -> CliError {
    CliError::BadValue {
        what: what.to_string(),
        text: text.to_string(),
        why: why.to_string(),
    }
}

fn ensure_absent(analysis: &'static str, pairs: &[(&'static str, bool)]) -> Result<(), CliError> {
    for (key, present) in pairs {
        if *present {
            return Err(CliError::UnusedKey { analysis, key });
        }
    }
    Ok(())
}

fn split_eq<'a>(what: &str, s: &'a str) -> Result<(&'a str, &'a str), CliError> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(bad(what, s, "expected `name=value`")),
    }
}

fn split_at_sign<'a>(what: &str, s: &'a str) -> Result<(&'a str, &'a str), CliError> {
    match s.split_once('@') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(bad(what, s, "expected `coord@value`")),
    }
}

fn rat_arg(what: &str, s: &str) -> Result<Rat, CliError> {
    parse_rat(s).ok_or_else(|| bad(what, s, "expected a rational `p` or `p/q`"))
}

fn trop_arg(what: &str, s: &str) -> Result<TropicalValue, CliError> {
    parse_tropical(s).ok_or_else(|| bad(what, s, "expected a rational or `-inf`"))
}

fn alias_params(args: &RequestArgs) -> Result<BTreeMap<String, Rat>, CliError> {
    let mut out = BTreeMap::new();
    for p in &args.param {
        let (name, val) = split_eq("param", p)?;
        let r = rat_arg("param", val)?;
        if out.insert(name.to_string(), r).is_some() {
            return Err(bad("param", p, "parameter given twice"));
        }
    }
    Ok(out)
}

/// Rewrites parameter names onto their declared aliases; both the source
/// name and the alias are accepted on input.
fn normalize_aliases(
    m: &RationalMap,
    given: BTreeMap<String, Rat>,
) -> Result<BTreeMap<String, Rat>, CliError> {
    let mut out = BTreeMap::new();
    for (name, v) in given {
        let alias = m
            .params
            .iter()
            .find_map(|(s, a)| (*s == name || *a == name).then(|| a.clone()))
            .ok_or(CliError::UnknownParam { name })?;
        if out.insert(alias.clone(), v).is_some() {
            return Err(bad("param", &alias, "given under both of its names"));
        }
    }
    Ok(out)
}

fn source_params(
    m: &RationalMap,
    by_alias: &BTreeMap<String, Rat>,
) -> Result<BTreeMap<String, Rat>, CliError> {
    let mut out = BTreeMap::new();
    for (src, alias) in &m.params {
        let v = by_alias.get(alias).ok_or_else(|| CliError::MissingParam {
            alias: alias.clone(),
        })?;
        out.insert(src.clone(), v.clone());
    }
    Ok(out)
}

fn check_alias_params(
    aliases: &[String],
    by_alias: &BTreeMap<String, Rat>,
) -> Result<(), CliError> {
    for name in by_alias.keys() {
        if !aliases.iter().any(|a| a == name) {
            return Err(CliError::UnknownParam { name: name.clone() });
        }
    }
    for a in aliases {
        if !by_alias.contains_key(a) {
            return Err(CliError::MissingParam { alias: a.clone() });
        }
    }
    Ok(())
}

fn coord_index(
    source: Option<&[String]>,
    tropical: &[String],
    name: &str,
) -> Result<usize, CliError> {
    if let Some(vs) = source {
        if let Some(i) = vs.iter().position(|v| v == name) {
            return Ok(i);
        }
    }
    tropical
        .iter()
        .position(|v| v == name)
        .ok_or_else(|| CliError::UnknownCoordinate {
            name: name.to_string(),
        })
}

/// Initial rational values by source name, with `T0` as sugar for the `t`
/// coordinate.
fn rational_inits(m: &RationalMap, args: &RequestArgs) -> Result<BTreeMap<String, Rat>, CliError> {
    let mut out = BTreeMap::new();
    for it in &args.init {
        let (k, v) = split_eq("init", it)?;
        if !m.vars.iter().any(|x| x == k) {
            return Err(CliError::UnknownCoordinate { name: k.to_string() });
        }
        if out.insert(k.to_string(), rat_arg("init", v)?).is_some() {
            return Err(bad("init", it, "coordinate initialized twice"));
        }
    }
    if let Some(v) = &args.t0 {
        if !m.vars.iter().any(|x| x == "t") {
            return Err(CliError::UnknownCoordinate {
                name: "t".to_string(),
            });
        }
        if out.insert("t".to_string(), rat_arg("T0", v)?).is_some() {
            return Err(bad("T0", v, "coordinate `t` already initialized"));
        }
    }
    Ok(out)
}

/// Tropical name of the time coordinate, when the map has one.
fn t_coord_name(source: Option<&RationalMap>, t: &TropicalMap) -> Option<String> {
    if let Some(m) = source {
        let i = m.vars.iter().position(|v| v == "t")?;
        return Some(t.vars[i].clone());
    }
    t.vars.iter().find(|v| *v == "T" || *v == "t").cloned()
}

/// Initial tropical values keyed by tropical coordinate name; source names
/// are accepted and resolved positionally.
fn tropical_inits(
    source: Option<&RationalMap>,
    t: &TropicalMap,
    args: &RequestArgs,
) -> Result<BTreeMap<String, TropicalValue>, CliError> {
    let mut out = BTreeMap::new();
    for it in &args.init {
        let (k, v) = split_eq("init", it)?;
        let idx = coord_index(source.map(|m| m.vars.as_slice()), &t.vars, k)?;
        if out.insert(t.vars[idx].clone(), trop_arg("init", v)?).is_some() {
            return Err(bad("init", it, "coordinate initialized twice"));
        }
    }
    if let Some(v) = &args.t0 {
        let name = t_coord_name(source, t).ok_or(CliError::UnknownCoordinate {
            name: "t".to_string(),
        })?;
        if out.insert(name, trop_arg("T0", v)?).is_some() {
            return Err(bad("T0", v, "coordinate already initialized"));
        }
    }
    Ok(out)
}

// ---- rendering helpers ----

fn finish(rows: Vec<Row>, footers: Vec<String>, finding: bool, format: Format) -> Outcome {
    let table = render(&rows, format);
    let notes: String = footers.iter().map(|f| format!("{f}\n")).collect();
    match format {
        Format::Md => {
            let mut out = table;
            if !notes.is_empty() {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&notes);
            }
            Outcome {
                out,
                diag: String::new(),
                finding,
            }
        }
        Format::Csv => Outcome {
            out: table,
            diag: notes,
            finding,
        },
    }
}

/// One-sided orbit value as an affine form in the perturbation `d`.
fn affine_str(base: &TropicalValue, slope: &Rat) -> String {
    let TropicalValue::Finite(b) = base else {
        return "-inf".to_string();
    };
    let zero = Rat::default();
    if *slope == zero {
        return b.to_string();
    }
    let mag = if *slope < zero {
        -slope.clone()
    } else {
        slope.clone()
    };
    let term = if mag == rat_int(1) {
        "d".to_string()
    } else {
        format!("{mag}*d")
    };
    if *b == zero {
        if *slope < zero {
            format!("-{term}")
        } else {
            term
        }
    } else if *slope < zero {
        format!("{b} - {term}")
    } else {
        format!("{b} + {term}")
    }
}

/// Multiset of valuations with multiplicities expanded.
fn multiset_str(items: &[(TropicalValue, usize)]) -> String {
    let mut parts = Vec::new();
    for (v, m) in items {
        for _ in 0..*m {
            parts.push(v.to_string());
        }
    }
    format!("{{{}}}", parts.join(", "))
}

/// Shift pair and a common scalar label like `W` for `W0, W1`, when the
/// coordinate names share an alphabetic prefix with digit suffixes.
fn scalar_view(t: &TropicalMap) -> Option<((usize, usize), String)> {
    let pair = t.shift_pair()?;
    scalar_label(&t.vars, pair).map(|l| (pair, l))
}

fn scalar_label(vars: &[String], pair: (usize, usize)) -> Option<String> {
    let (a, b) = (&vars[pair.0], &vars[pair.1]);
    let n = a
        .bytes()
        .zip(b.bytes())
        .take_while(|(x, y)| x == y)
        .count();
    let (p, sa, sb) = (&a[..n], &a[n..], &b[n..]);
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    (!p.is_empty() && digits(sa) && digits(sb)).then(|| p.to_string())
}

/// First index with a raised flag and the first clean index after it.
fn first_recovery(flags: &[bool]) -> Option<(usize, Option<usize>)> {
    let entry = flags.iter().position(|f| *f)?;
    let recovered = flags[entry..].iter().position(|f| !*f).map(|k| entry + k);
    Some((entry, recovered))
}

fn recovery_verdict(
    flags: &[bool],
    steps: usize,
    condition: &str,
    recovery: &str,
) -> (String, bool) {
    match first_recovery(flags) {
        None => (
            format!("verdict: never {condition} within {steps} steps"),
            false,
        ),
        Some((e, Some(r))) => (
            format!("verdict: {recovery} at step {r} ({condition} from step {e})"),
            false,
        ),
        Some((e, None)) => (
            format!("verdict: not {recovery} within {steps} steps ({condition} from step {e})"),
            true,
        ),
    }
}

// ---- orbit ----

fn run_orbit(spec: &MapSpec, args: &RequestArgs) -> Result<Outcome, CliError> {
    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let aliases = alias_params(args)?;
    let mut rows = Vec::new();
    match spec {
        MapSpec::Rational(m) => {
            let params = source_params(m, &normalize_aliases(m, aliases)?)?;
            let inits = rational_inits(m, args)?;
            let mut state: Vec<Rat> = m
                .vars
                .iter()
                .map(|v| {
                    inits
                        .get(v)
                        .cloned()
                        .ok_or_else(|| CliError::MissingInit { name: v.clone() })
                })
                .collect::<Result<_, _>>()?;
            for (i, v) in m.vars.iter().enumerate() {
                rows.push(Row::new(0, v, "", state[i].to_string(), ""));
            }
            for n in 1..=steps {
                state = m
                    .step_in(&Rationals, &state, &params)
                    .map_err(|e| CliError::Step {
                        step: n,
                        msg: e.to_string(),
                    })?;
                for (i, v) in m.vars.iter().enumerate() {
                    rows.push(Row::new(n, v, "", state[i].to_string(), ""));
                }
            }
        }
        MapSpec::Tropical(t) => {
            check_alias_params(&t.params, &aliases)?;
            let inits = tropical_inits(None, t, args)?;
            let mut state: Vec<TropicalValue> = t
                .vars
                .iter()
                .map(|v| {
                    inits
                        .get(v)
                        .cloned()
                        .ok_or_else(|| CliError::MissingInit { name: v.clone() })
                })
                .collect::<Result<_, _>>()?;
            let mut env: BTreeMap<String, TropicalValue> = aliases
                .iter()
                .map(|(k, v)| (k.clone(), TropicalValue::Finite(v.clone())))
                .collect();
            for (i, v) in t.vars.iter().enumerate() {
                rows.push(Row::new(0, v, "", state[i].to_string(), ""));
            }
            for n in 1..=steps {
                for (v, s) in t.vars.iter().zip(&state) {
                    env.insert(v.clone(), s.clone());
                }
                state = t
                    .updates
                    .iter()
                    .map(|u| eval_trop(u, &env))
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Step {
                        step: n,
                        msg: e.to_string(),
                    })?;
                for (i, v) in t.vars.iter().enumerate() {
                    rows.push(Row::new(n, v, "", state[i].to_string(), ""));
                }
            }
        }
    }
    Ok(finish(rows, Vec::new(), false, args.format))
}

// ---- confine-discrete ----

fn discrete_flag(st: &DiscreteStep) -> String {
    match (st.infinite_coord, st.info_lost) {
        (true, true) => "infinite, info-loss".to_string(),
        (true, false) => "infinite".to_string(),
        (false, true) => "info-loss".to_string(),
        (false, false) => String::new(),
    }
}

fn run_confine_discrete(
    map_name: &str,
    spec: &MapSpec,
    args: &RequestArgs,
) -> Result<Outcome, CliError> {
    let MapSpec::Rational(m) = spec else {
        return Err(CliError::NeedsRational {
            analysis: "confine-discrete",
            name: map_name.to_string(),
        });
    };
    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let params = source_params(m, &normalize_aliases(m, alias_params(args)?)?)?;
    let inits = rational_inits(m, args)?;

    if let Some(freespec) = &args.free {
        if freespec.contains('=') {
            if args.perturb.is_some() {
                return Err(bad("free", freespec, "a grid scan does not take `perturb`"));
            }
            return scan_singular_candidates(m, freespec, &inits, &params, steps, args.format);
        }
    }

    let perturb = args.perturb.as_ref().ok_or(CliError::MissingKey {
        analysis: "confine-discrete",
        key: "perturb",
    })?;
    let (pc, pv) = split_at_sign("perturb", perturb)?;
    if !m.vars.iter().any(|v| v == pc) {
        return Err(CliError::UnknownCoordinate {
            name: pc.to_string(),
        });
    }
    let base = if pv == "inf" {
        PerturbBase::Infinity
    } else {
        PerturbBase::Rational(rat_arg("perturb", pv)?)
    };
    let free = match &args.free {
        Some(f) => {
            if !m.vars.iter().any(|v| v == f) {
                return Err(CliError::UnknownCoordinate { name: f.clone() });
            }
            f.clone()
        }
        None => infer_free(m, pc)?,
    };
    let samples_text = args.samples.as_ref().ok_or(CliError::MissingKey {
        analysis: "confine-discrete",
        key: "samples",
    })?;
    let samples: Vec<Rat> = samples_text
        .split(',')
        .map(|s| rat_arg("samples", s.trim()))
        .collect::<Result<_, _>>()?;

    if inits.contains_key(pc) {
        return Err(CliError::InitConflict {
            name: pc.to_string(),
            role: "perturbed",
        });
    }
    if inits.contains_key(&free) {
        return Err(CliError::InitConflict {
            name: free.clone(),
            role: "free",
        });
    }

    let setup = DiscreteSetup {
        perturbation: Perturbation {
            coord: pc.to_string(),
            base,
        },
        free_coord: free.clone(),
        samples,
        fixed_coords: inits,
        param_values: params,
        steps,
    };
    let report = run_discrete_confinement(m, &setup)?;

    let mut rows = Vec::new();
    for st in &report.steps {
        let flag = discrete_flag(st);
        for (si, sample) in report.samples.iter().enumerate() {
            for (ci, coord) in report.coords.iter().enumerate() {
                rows.push(Row::new(
                    st.index,
                    coord,
                    &format!("{free}={sample}"),
                    st.limits[si][ci].to_string(),
                    &flag,
                ));
            }
        }
    }
    let (verdict, finding) = match report.verdict {
        DiscreteVerdict::NeverSingular => {
            (format!("verdict: never singular within {steps} steps"), false)
        }
        DiscreteVerdict::ConfinedAt { entry, recovered } => (
            format!("verdict: confined at step {recovered} (singular from step {entry})"),
            false,
        ),
        DiscreteVerdict::NotConfinedWithin { entry, steps } => (
            format!("verdict: not confined within {steps} steps (singular from step {entry})"),
            true,
        ),
    };
    Ok(finish(rows, vec![verdict], finding, args.format))
}

/// The free coordinate that carries the samples, inferred as the other
/// coordinate of a two-coordinate map.
fn infer_free(m: &RationalMap, perturbed: &str) -> Result<String, CliError> {
    let others: Vec<&String> = m.vars.iter().filter(|v| *v != perturbed).collect();
    match others.as_slice() {
        [only] => Ok((*only).clone()),
        _ => Err(CliError::MissingKey {
            analysis: "confine-discrete",
            key: "free",
        }),
    }
}

/// Grid scan: iterate exactly from every grid value of the free coordinate
/// and flag the values whose orbit meets a zero denominator.
fn scan_singular_candidates(
    m: &RationalMap,
    freespec: &str,
    inits: &BTreeMap<String, Rat>,
    params: &BTreeMap<String, Rat>,
    steps: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    let (coord, grid) = split_eq("free", freespec)?;
    if !m.vars.iter().any(|v| v == coord) {
        return Err(CliError::UnknownCoordinate {
            name: coord.to_string(),
        });
    }
    if inits.contains_key(coord) {
        return Err(CliError::InitConflict {
            name: coord.to_string(),
            role: "free",
        });
    }
    let values: Vec<Rat> = grid
        .split(',')
        .map(|s| rat_arg("free", s.trim()))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    let mut singular = Vec::new();
    for (gi, g) in values.iter().enumerate() {
        let mut state: Vec<Rat> = m
            .vars
            .iter()
            .map(|v| {
                if v == coord {
                    Ok(g.clone())
                } else {
                    inits
                        .get(v)
                        .cloned()
                        .ok_or_else(|| CliError::MissingInit { name: v.clone() })
                }
            })
            .collect::<Result<_, _>>()?;
        let mut flag = String::new();
        for n in 1..=steps {
            match m.step_in(&Rationals, &state, params) {
                Ok(next) => state = next,
                Err(ExprError::Unbound(name)) => {
                    return Err(CliError::Step {
                        step: n,
                        msg: format!("unbound name `{name}`"),
                    });
                }
                Err(ExprError::Domain(_)) => {
                    flag = format!("singular at step {n}");
                    singular.push(g.to_string());
                    break;
                }
            }
        }
        rows.push(Row::new(gi, coord, "", g.to_string(), &flag));
    }
    let footer = if singular.is_empty() {
        format!("no singular candidates within {steps} steps")
    } else {
        format!("singular candidates: {}", singular.join(", "))
    };
    Ok(finish(rows, vec![footer], false, format))
}

// ---- confine-ultra ----

fn run_confine_ultra(spec: &MapSpec, args: &RequestArgs) -> Result<Outcome, CliError> {
    let (source, t): (Option<&RationalMap>, TropicalMap) = match spec {
        MapSpec::Rational(m) => (Some(m), ultradiscretize(m)?),
        MapSpec::Tropical(t) => (None, t.clone()),
    };
    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let aliases = match source {
        Some(m) => normalize_aliases(m, alias_params(args)?)?,
        None => alias_params(args)?,
    };
    check_alias_params(&t.params, &aliases)?;
    let inits = tropical_inits(source, &t, args)?;

    match (&args.perturb, &args.free) {
        (Some(_), Some(_)) | (None, None) => Err(CliError::ExactlyOne {
            analysis: "confine-ultra",
            a: "perturb",
            b: "free",
        }),
        (Some(p), None) => run_jets(source, &t, p, inits, aliases, steps, args.format),
        (None, Some(f)) => run_pl_scan(source, &t, f, inits, aliases, steps, args.format),
    }
}

fn run_jets(
    source: Option<&RationalMap>,
    t: &TropicalMap,
    perturb: &str,
    mut inits: BTreeMap<String, TropicalValue>,
    aliases: BTreeMap<String, Rat>,
    steps: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    let (pc_raw, pv) = split_at_sign("perturb", perturb)?;
    let idx = coord_index(source.map(|m| m.vars.as_slice()), &t.vars, pc_raw)?;
    let pc = t.vars[idx].clone();
    if inits.remove(&pc).is_some() {
        return Err(CliError::InitConflict {
            name: pc,
            role: "perturbed",
        });
    }

    if pv == "-inf" {
        let setup = LargeSetup {
            low_coord: pc,
            initial: inits,
            param_values: aliases,
            steps,
        };
        let orbit = run_large_orbit(t, &setup)?;
        let mut rows = Vec::new();
        if let Some((pair, label)) = scalar_view(t) {
            let track = scalar_track(&orbit.states, pair);
            for (n, j) in track.iter().enumerate() {
                rows.push(Row::new(n, &label, "", j.to_string(), ""));
            }
        } else {
            for (k, st) in orbit.states.iter().enumerate() {
                for (i, c) in orbit.coords.iter().enumerate() {
                    rows.push(Row::new(k, c, "", st[i].to_string(), ""));
                }
            }
        }
        let footer = "values hold for every sufficiently large L".to_string();
        return Ok(finish(rows, vec![footer], false, format));
    }

    let setup = JetSetup {
        perturb_coord: pc,
        perturb_base: rat_arg("perturb", pv)?,
        initial: inits,
        param_values: aliases,
        steps,
    };
    let report = run_jet_confinement(t, &setup)?;

    let mut rows = Vec::new();
    let flags: Vec<bool>;
    if let Some((pair, label)) = scalar_view(t) {
        let states: Vec<_> = report.steps.iter().map(|s| s.coords.clone()).collect();
        let track = scalar_track(&states, pair);
        flags = track.iter().map(|p| !p.differentiable()).collect();
        for (n, p) in track.iter().enumerate() {
            let flag = if p.differentiable() { "" } else { "nd" };
            rows.push(Row::new(n, &label, "delta=0", p.base.to_string(), flag));
            rows.push(Row::new(
                n,
                &label,
                "delta>0",
                affine_str(&p.base, &p.plus_slope),
                flag,
            ));
            rows.push(Row::new(
                n,
                &label,
                "delta<0",
                affine_str(&p.base, &p.minus_slope),
                flag,
            ));
        }
    } else {
        flags = report.steps.iter().map(|s| !s.all_differentiable()).collect();
        for st in &report.steps {
            for (i, c) in report.coords.iter().enumerate() {
                let p = &st.coords[i];
                let flag = if p.differentiable() { "" } else { "nd" };
                rows.push(Row::new(st.index, c, "delta=0", p.base.to_string(), flag));
                rows.push(Row::new(
                    st.index,
                    c,
                    "delta>0",
                    affine_str(&p.base, &p.plus_slope),
                    flag,
                ));
                rows.push(Row::new(
                    st.index,
                    c,
                    "delta<0",
                    affine_str(&p.base, &p.minus_slope),
                    flag,
                ));
            }
        }
    }
    let (verdict, finding) = recovery_verdict(&flags, steps, "non-differentiable", "recovered");
    Ok(finish(rows, vec![verdict], finding, format))
}

fn run_pl_scan(
    source: Option<&RationalMap>,
    t: &TropicalMap,
    free: &str,
    mut inits: BTreeMap<String, TropicalValue>,
    aliases: BTreeMap<String, Rat>,
    steps: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    if free.contains('=') {
        return Err(bad(
            "free",
            free,
            "the piecewise-linear scan takes a bare coordinate name",
        ));
    }
    let idx = coord_index(source.map(|m| m.vars.as_slice()), &t.vars, free)?;
    let fc = t.vars[idx].clone();
    if inits.remove(&fc).is_some() {
        return Err(CliError::InitConflict {
            name: fc,
            role: "free",
        });
    }

    let setup = PlSetup {
        free_coord: fc,
        initial: inits,
        param_values: aliases,
        steps,
    };
    let orbit = run_pl_orbit(t, &setup)?;
    let nd = orbit.nd_points();

    let mut rows = Vec::new();
    let flags: Vec<bool>;
    if let Some((pair, label)) = scalar_view(t) {
        let fns = scalar_track(&orbit.states, pair);
        let nds = scalar_track(&nd, pair);
        flags = nds.iter().map(|s| !s.is_empty()).collect();
        for n in 0..fns.len() {
            let flag = if nds[n].is_empty() { "" } else { "nd" };
            rows.push(Row::new(n, &label, "function", fns[n].to_string(), flag));
            rows.push(Row::new(n, &label, "nd-points", nds[n].to_string(), flag));
        }
    } else {
        flags = nd
            .iter()
            .map(|st| st.iter().any(|s| !s.is_empty()))
            .collect();
        for (k, st) in orbit.states.iter().enumerate() {
            for (i, c) in orbit.coords.iter().enumerate() {
                let flag = if nd[k][i].is_empty() { "" } else { "nd" };
                rows.push(Row::new(k, c, "function", st[i].to_string(), flag));
                rows.push(Row::new(k, c, "nd-points", nd[k][i].to_string(), flag));
            }
        }
    }
    let (verdict, finding) = recovery_verdict(&flags, steps, "non-differentiable", "recovered");
    Ok(finish(rows, vec![verdict], finding, format))
}

// ---- correspond ----

fn track_flag(e: &TrackEntry) -> &'static str {
    match e.status {
        TrackStatus::Equal => "equal",
        TrackStatus::Diverged => "diverged",
        TrackStatus::Vanished => "vanished",
        TrackStatus::WindowExhausted => "window-exhausted",
    }
}

fn push_track_rows(rows: &mut Vec<Row>, n: usize, label: &str, e: &TrackEntry) {
    let flag = track_flag(e);
    let val = e
        .valuation
        .as_ref()
        .map(|v| v.to_string())
        .unwrap_or_else(|| "?".to_string());
    rows.push(Row::new(n, label, "valuation", val, flag));
    rows.push(Row::new(n, label, "tropical", e.tropical.to_string(), flag));
}

fn run_correspond(map_name: &str, spec: &MapSpec, args: &RequestArgs) -> Result<Outcome, CliError> {
    let MapSpec::Rational(m) = spec else {
        return Err(CliError::NeedsRational {
            analysis: "correspond",
            name: map_name.to_string(),
        });
    };
    let t = ultradiscretize(m)?;
    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let depth = match &args.depth {
        Some(d) => rat_arg("depth", d)?,
        None => rat_int(DEFAULT_DEPTH),
    };
    let aliases = normalize_aliases(m, alias_params(args)?)?;
    check_alias_params(&t.params, &aliases)?;

    let mut series: BTreeMap<String, PuiseuxSeries> = BTreeMap::new();
    for l in &args.lift {
        let (k, v) = split_eq("lift", l)?;
        let idx = coord_index(Some(&m.vars), &t.vars, k)?;
        let s = parse_series(v).map_err(|e| bad("lift", v, &e.to_string()))?;
        if series.insert(m.vars[idx].clone(), s).is_some() {
            return Err(bad("lift", l, "coordinate lifted twice"));
        }
    }
    let mut monomial_init = |name: String, text: &str, what: &str| -> Result<(), CliError> {
        let lift = match trop_arg(what, text)? {
            TropicalValue::NegInf => PuiseuxSeries::zero(),
            TropicalValue::Finite(q) => PuiseuxSeries::monomial(rat_int(1), q),
        };
        if series.insert(name.clone(), lift).is_some() {
            return Err(bad(what, text, "coordinate already lifted"));
        }
        Ok(())
    };
    for it in &args.init {
        let (k, v) = split_eq("init", it)?;
        let idx = coord_index(Some(&m.vars), &t.vars, k)?;
        monomial_init(m.vars[idx].clone(), v, "init")?;
    }
    if let Some(v) = &args.t0 {
        if !m.vars.iter().any(|x| x == "t") {
            return Err(CliError::UnknownCoordinate {
                name: "t".to_string(),
            });
        }
        monomial_init("t".to_string(), v, "T0")?;
    }
    let initial: Vec<PuiseuxSeries> = m
        .vars
        .iter()
        .map(|v| {
            series
                .get(v)
                .cloned()
                .ok_or_else(|| CliError::MissingInit { name: v.clone() })
        })
        .collect::<Result<_, _>>()?;

    let report = orbit_compare(m, &initial, &aliases, steps, depth)?;

    let mut rows = Vec::new();
    let label = m.shift_pair().and_then(|pair| scalar_label(&m.vars, pair));
    match (&report.scalar, &label) {
        (Some(track), Some(label)) => {
            for (n, e) in track.iter().enumerate() {
                push_track_rows(&mut rows, n, label, e);
            }
        }
        _ => {
            for (k, st) in report.states.iter().enumerate() {
                for (i, c) in report.coords.iter().enumerate() {
                    push_track_rows(&mut rows, k, c, &st[i]);
                }
            }
        }
    }

    let mut footers = Vec::new();
    if let Some(n) = report.first_cancellation {
        footers.push(format!("first cancellation: n = {n}"));
    }
    if let Some(n) = report.first_divergence {
        footers.push(format!("first divergence: n = {n}"));
    }
    if let Some(h) = &report.terminated {
        let mut line = format!("halted before state {}: {}", h.missing_state, h.reason);
        if let Some(s) = h.missing_scalar {
            line.push_str(&format!(" (scalar n = {s})"));
        }
        footers.push(line);
    }
    let ok = report.all_equal();
    let diverging = report.first_divergence.is_some()
        || report.first_cancellation.is_some()
        || report
            .states
            .iter()
            .flatten()
            .any(|e| matches!(e.status, TrackStatus::Diverged | TrackStatus::Vanished));
    footers.push(
        if ok {
            "verdict: valuations equal the tropical orbit at every compared step"
        } else if diverging {
            "verdict: valuations diverge from the tropical orbit"
        } else {
            "verdict: inconclusive before the horizon"
        }
        .to_string(),
    );
    Ok(finish(rows, footers, !ok, args.format))
}

// ---- lemma3 ----

fn run_lemma3(map_name: &str, spec: &MapSpec, args: &RequestArgs) -> Result<Outcome, CliError> {
    let MapSpec::Rational(m) = spec else {
        return Err(CliError::NeedsRational {
            analysis: "lemma3",
            name: map_name.to_string(),
        });
    };
    let t = ultradiscretize(m)?;
    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let aliases = normalize_aliases(m, alias_params(args)?)?;
    check_alias_params(&t.params, &aliases)?;
    let free = args.free.as_ref().ok_or(CliError::MissingKey {
        analysis: "lemma3",
        key: "free",
    })?;
    if free.contains('=') {
        return Err(bad("free", free, "expected a bare coordinate name"));
    }
    let idx = coord_index(Some(&m.vars), &t.vars, free)?;
    let fc = t.vars[idx].clone();
    let mut inits = tropical_inits(Some(m), &t, args)?;
    if inits.remove(&fc).is_some() {
        return Err(CliError::InitConflict {
            name: fc,
            role: "free",
        });
    }

    let setup = CorrSetup {
        free_coord: fc,
        initial: inits,
        param_values: aliases,
        steps,
    };
    let report = nd_correspondence(m, &setup)?;

    let push_entry = |rows: &mut Vec<Row>, n: usize, label: &str, e: &CorrEntry| {
        let flag = if !e.check.matches {
            "mismatch"
        } else if e.check.shared.is_empty() {
            "ok"
        } else {
            "ok (shared root)"
        };
        rows.push(Row::new(n, label, "fraction", e.rendered.clone(), flag));
        rows.push(Row::new(n, label, "roots", multiset_str(&e.check.roots), flag));
        rows.push(Row::new(n, label, "poles", multiset_str(&e.check.poles), flag));
        rows.push(Row::new(n, label, "nd-points", e.check.nd.to_string(), flag));
    };

    let mut rows = Vec::new();
    match (&report.scalar, scalar_view(&t)) {
        (Some(track), Some((_, label))) => {
            for (n, e) in track.iter().enumerate() {
                push_entry(&mut rows, n, &label, e);
            }
        }
        _ => {
            for (k, st) in report.states.iter().enumerate() {
                for (i, c) in report.coords.iter().enumerate() {
                    push_entry(&mut rows, k, c, &st[i]);
                }
            }
        }
    }
    let ok = report.all_match();
    let verdict = if ok {
        "verdict: non-differentiability points match the root and pole valuations at every step"
    } else {
        "verdict: mismatch between non-differentiability points and valuations"
    };
    Ok(finish(rows, vec![verdict.to_string()], !ok, args.format))
}
