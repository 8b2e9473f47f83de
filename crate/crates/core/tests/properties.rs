//! Randomized cross-checks between independently implemented layers.
//!
//! Each property pits two routes to the same answer against each other:
//! scalar max-plus algebra against itself (the semiring laws), series
//! valuations against tropical arithmetic, jets against directly perturbed
//! orbits, piecewise-linear functions against pointwise orbits, and hull
//! based root extraction against an exhaustive tie scan.

use std::collections::BTreeMap;

use proptest::prelude::*;

use tropdyn::mapdsl::{
    eval_expr_in, parse_map, ultradiscretize, Expr, PuiseuxField, RationalMap, TropicalMap,
};
use tropdyn::maxplus::{eval_trop, int_scale, trop_add, trop_div, trop_mul, Env, TropicalValue};
use tropdyn::puiseux::{
    parse_series, ps_add, ps_inv, ps_mul, ps_sub, PuiseuxSeries, SeriesError,
};
use tropdyn::rat::{rat, rat_int};
use tropdyn::tropcorr::{newton_valuations, orbit_compare, trop_roots, PuiseuxPoly, TropicalPoly};
use tropdyn::ultra::{run_jet_confinement, run_pl_orbit, JetSetup, PlSetup};
use tropdyn::Rat;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

/// Rationals with denominators at most `max_den`, to keep exponent lattices
/// coarse where series term counts matter.
fn arb_rat_den(max_den: i64) -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=max_den).prop_map(|(n, d)| rat(n, d))
}

fn arb_nonzero_rat() -> impl Strategy<Value = Rat> {
    arb_rat().prop_map(|r| if r == Rat::default() { rat_int(1) } else { r })
}

fn arb_pos_rat() -> impl Strategy<Value = Rat> {
    (1i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn arb_trop() -> impl Strategy<Value = TropicalValue> {
    prop_oneof![
        1 => Just(TropicalValue::NegInf),
        7 => arb_rat().prop_map(TropicalValue::Finite),
    ]
}

fn arb_exact_series() -> impl Strategy<Value = PuiseuxSeries> {
    proptest::collection::vec((arb_rat(), arb_nonzero_rat()), 0..5)
        .prop_map(|ts| PuiseuxSeries::from_terms(ts, None))
}

fn arb_series() -> impl Strategy<Value = PuiseuxSeries> {
    (
        proptest::collection::vec((arb_rat(), arb_nonzero_rat()), 0..5),
        proptest::option::of(arb_rat()),
    )
        .prop_map(|(ts, tau)| PuiseuxSeries::from_terms(ts, tau))
}

fn fin(n: i64) -> TropicalValue {
    TropicalValue::Finite(rat_int(n))
}

fn autonomous_map() -> RationalMap {
    parse_map("vars: x, y\nx' = y\ny' = (y + 1)/x").expect("fixed source parses")
}

fn ud_autonomous() -> TropicalMap {
    ultradiscretize(&autonomous_map()).expect("map is subtraction-free")
}

/// Direct scalar orbit of a parameterless tropical map from a finite state.
fn trop_orbit(
    map: &TropicalMap,
    init: Vec<TropicalValue>,
    steps: usize,
) -> Vec<Vec<TropicalValue>> {
    let mut states = vec![init];
    for _ in 0..steps {
        let cur = states.last().expect("orbit is never empty");
        let env: Env<TropicalValue> =
            map.vars.iter().cloned().zip(cur.iter().cloned()).collect();
        let next = map
            .updates
            .iter()
            .map(|u| eval_trop(u, &env).expect("finite orbit stays evaluable"))
            .collect();
        states.push(next);
    }
    states
}

proptest! {
    #[test]
    fn max_plus_semiring_laws(a in arb_trop(), b in arb_trop(), c in arb_trop()) {
        let zero = TropicalValue::NegInf;
        let one = fin(0);
        prop_assert_eq!(trop_add(&a, &b), trop_add(&b, &a));
        prop_assert_eq!(trop_mul(&a, &b), trop_mul(&b, &a));
        prop_assert_eq!(
            trop_add(&trop_add(&a, &b), &c),
            trop_add(&a, &trop_add(&b, &c))
        );
        prop_assert_eq!(
            trop_mul(&trop_mul(&a, &b), &c),
            trop_mul(&a, &trop_mul(&b, &c))
        );
        prop_assert_eq!(trop_add(&a, &a), a.clone());
        prop_assert_eq!(trop_add(&a, &zero), a.clone());
        prop_assert_eq!(trop_mul(&a, &one), a.clone());
        prop_assert_eq!(trop_mul(&a, &zero), zero.clone());
        prop_assert_eq!(
            trop_mul(&a, &trop_add(&b, &c)),
            trop_add(&trop_mul(&a, &b), &trop_mul(&a, &c))
        );
    }

    #[test]
    fn division_cancels_products(a in arb_trop(), b in arb_rat()) {
        let b = TropicalValue::Finite(b);
        let q = trop_div(&trop_mul(&a, &b), &b).expect("finite divisor");
        prop_assert_eq!(q, a);
    }

    #[test]
    fn integer_scaling_matches_direct_arithmetic(a in arb_trop(), k in -6i64..=6) {
        let got = int_scale(k, &a);
        match (&a, k) {
            (TropicalValue::Finite(r), _) => {
                prop_assert_eq!(got.unwrap(), TropicalValue::Finite(r * rat_int(k)));
            }
            (TropicalValue::NegInf, 0) => prop_assert_eq!(got.unwrap(), fin(0)),
            (TropicalValue::NegInf, _) if k > 0 => {
                prop_assert_eq!(got.unwrap(), TropicalValue::NegInf);
            }
            (TropicalValue::NegInf, _) => prop_assert!(got.is_err()),
        }
    }

    #[test]
    fn valuation_is_multiplicative(f in arb_exact_series(), g in arb_exact_series()) {
        let vf = f.valuation().unwrap();
        let vg = g.valuation().unwrap();
        let vp = ps_mul(&f, &g).valuation().unwrap();
        prop_assert_eq!(vp, trop_mul(&vf, &vg));
    }

    #[test]
    fn valuation_of_sums_is_dominated(f in arb_exact_series(), g in arb_exact_series()) {
        let vf = f.valuation().unwrap();
        let vg = g.valuation().unwrap();
        let bound = trop_add(&vf, &vg);
        let vs = ps_add(&f, &g).valuation().unwrap();
        prop_assert!(vs <= bound);
        if vf != vg {
            prop_assert_eq!(vs, bound);
        }
    }

    #[test]
    fn truncation_masks_are_never_dropped(f in arb_exact_series(), tau in arb_rat()) {
        let masked = PuiseuxSeries::from_terms(Vec::new(), Some(tau.clone()));
        let sum = ps_add(&f, &masked);
        match f.valuation().unwrap() {
            TropicalValue::Finite(v) if v >= tau => {
                prop_assert_eq!(sum.valuation().unwrap(), TropicalValue::Finite(v));
            }
            _ => prop_assert!(matches!(
                sum.valuation(),
                Err(SeriesError::IndeterminateValuation)
            )),
        }
    }

    #[test]
    fn series_text_round_trips(f in arb_series()) {
        let back = parse_series(&f.to_string()).unwrap();
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_series_multiply_to_one(f in arb_exact_series(), depth in 5i64..=30) {
        prop_assume!(!f.is_zero());
        let inv = ps_inv(&f, &rat_int(depth)).unwrap();
        let prod = ps_mul(&f, &inv);
        prop_assert_eq!(prod.valuation().unwrap(), fin(0));
        let residual = ps_sub(&prod, &PuiseuxSeries::one());
        match residual.valuation() {
            Ok(TropicalValue::NegInf) => {}
            Err(SeriesError::IndeterminateValuation) => {}
            other => prop_assert!(false, "residual valuation {:?}", other),
        }
    }
}

// --- map text round trip ---------------------------------------------------

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        arb_rat().prop_map(Expr::Lit),
        prop_oneof![Just("x".to_string()), Just("y".to_string())].prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner, -3i64..=3).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}

/// Applies the parser's literal folds, so round-tripping through text is the
/// identity on the result: negation of a literal folds into the literal, and
/// a literal quotient folds into one rational.
fn fold_literals(e: Expr) -> Expr {
    match e {
        Expr::Add(a, b) => Expr::Add(
            Box::new(fold_literals(*a)),
            Box::new(fold_literals(*b)),
        ),
        Expr::Sub(a, b) => Expr::Sub(
            Box::new(fold_literals(*a)),
            Box::new(fold_literals(*b)),
        ),
        Expr::Mul(a, b) => Expr::Mul(
            Box::new(fold_literals(*a)),
            Box::new(fold_literals(*b)),
        ),
        Expr::Div(a, b) => {
            let a = fold_literals(*a);
            let b = fold_literals(*b);
            match (&a, &b) {
                (Expr::Lit(p), Expr::Lit(q)) if *q != Rat::default() => Expr::Lit(p / q),
                _ => Expr::Div(Box::new(a), Box::new(b)),
            }
        }
        Expr::Neg(a) => {
            let a = fold_literals(*a);
            match a {
                Expr::Lit(c) => Expr::Lit(-c),
                other => Expr::Neg(Box::new(other)),
            }
        }
        Expr::Pow(a, k) => Expr::Pow(Box::new(fold_literals(*a)), k),
        leaf => leaf,
    }
}

proptest! {
    #[test]
    fn map_text_round_trips(e in arb_expr()) {
        let map = RationalMap {
            vars: vec!["x".to_string(), "y".to_string()],
            params: Vec::new(),
            updates: vec![fold_literals(e), Expr::Var("x".to_string())],
        };
        let back = parse_map(&map.to_string()).unwrap();
        prop_assert_eq!(back, map);
    }
}

// --- operator replacement commutes with valuation --------------------------

fn arb_sf_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        arb_pos_rat().prop_map(Expr::Lit),
        prop_oneof![Just("x".to_string()), Just("y".to_string())].prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner, -2i64..=3).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// On subtraction-free expressions with positive-monomial inputs, the
    /// valuation of the series value equals the tropical value of the
    /// replaced expression on the input valuations.
    #[test]
    fn replaced_expressions_match_series_valuations(
        e in arb_sf_expr(),
        cx in arb_pos_rat(),
        ex in arb_rat_den(4),
        cy in arb_pos_rat(),
        ey in arb_rat_den(4),
    ) {
        let wrapper = RationalMap {
            vars: vec!["x".to_string(), "y".to_string()],
            params: Vec::new(),
            updates: vec![e.clone(), Expr::Var("x".to_string())],
        };
        let replaced = ultradiscretize(&wrapper).unwrap();

        let senv: BTreeMap<String, PuiseuxSeries> = BTreeMap::from([
            ("x".to_string(), PuiseuxSeries::monomial(cx, ex.clone())),
            ("y".to_string(), PuiseuxSeries::monomial(cy, ey.clone())),
        ]);
        let series = eval_expr_in(&PuiseuxField { depth: rat_int(4) }, &e, &senv).unwrap();

        let tenv: Env<TropicalValue> = Env::from([
            ("X".to_string(), TropicalValue::Finite(ex)),
            ("Y".to_string(), TropicalValue::Finite(ey)),
        ]);
        let tropical = eval_trop(&replaced.updates[0], &tenv).unwrap();

        prop_assert_eq!(series.valuation().unwrap(), tropical);
    }

    /// One-sided jets are exact linearizations: for a small enough exact
    /// perturbation, the directly perturbed tropical orbit equals
    /// `base + slope * delta` coordinate by coordinate.
    #[test]
    fn jets_linearize_perturbed_orbits(w0 in arb_rat(), steps in 1usize..=7) {
        let tmap = ud_autonomous();
        let setup = JetSetup {
            perturb_coord: "Y".to_string(),
            perturb_base: Rat::default(),
            initial: BTreeMap::from([
                ("X".to_string(), TropicalValue::Finite(w0.clone())),
            ]),
            param_values: BTreeMap::new(),
            steps,
        };
        let report = run_jet_confinement(&tmap, &setup).unwrap();
        let delta = rat(1, 1 << 20);

        for side in [1i64, -1] {
            let signed = rat_int(side) * delta.clone();
            let init = vec![
                TropicalValue::Finite(w0.clone()),
                TropicalValue::Finite(signed.clone()),
            ];
            let direct = trop_orbit(&tmap, init, steps);
            for (k, state) in direct.iter().enumerate() {
                for (i, v) in state.iter().enumerate() {
                    let pair = &report.steps[k].coords[i];
                    let slope = if side > 0 { &pair.plus_slope } else { &pair.minus_slope };
                    let expect = match &pair.base {
                        TropicalValue::NegInf => TropicalValue::NegInf,
                        TropicalValue::Finite(b) => {
                            TropicalValue::Finite(b + slope.clone() * signed.clone())
                        }
                    };
                    prop_assert_eq!(v.clone(), expect);
                }
            }
        }
    }

    /// The piecewise-linear functions of the free coordinate evaluate, at any
    /// rational argument, to the orbit started from that argument.
    #[test]
    fn orbit_functions_evaluate_pointwise(
        w0 in arb_rat(),
        w in arb_rat(),
        steps in 1usize..=7,
    ) {
        let tmap = ud_autonomous();
        let orbit = run_pl_orbit(&tmap, &PlSetup {
            free_coord: "Y".to_string(),
            initial: BTreeMap::from([
                ("X".to_string(), TropicalValue::Finite(w0.clone())),
            ]),
            param_values: BTreeMap::new(),
            steps,
        }).unwrap();

        let direct = trop_orbit(
            &tmap,
            vec![TropicalValue::Finite(w0), TropicalValue::Finite(w.clone())],
            steps,
        );
        for (k, state) in orbit.states.iter().enumerate() {
            for (i, f) in state.iter().enumerate() {
                prop_assert_eq!(f.eval(&w), direct[k][i].clone());
            }
        }
    }

    /// A jet based at `w` is differentiable exactly when `w` is not a
    /// non-differentiability point of the matching piecewise-linear function.
    #[test]
    fn jet_kinks_are_the_nd_points(
        w0 in arb_rat(),
        w in arb_rat(),
        steps in 1usize..=6,
    ) {
        let tmap = ud_autonomous();
        let shared_init = BTreeMap::from([
            ("X".to_string(), TropicalValue::Finite(w0.clone())),
        ]);
        let orbit = run_pl_orbit(&tmap, &PlSetup {
            free_coord: "Y".to_string(),
            initial: shared_init.clone(),
            param_values: BTreeMap::new(),
            steps,
        }).unwrap();
        let nd = orbit.nd_points();

        let report = run_jet_confinement(&tmap, &JetSetup {
            perturb_coord: "Y".to_string(),
            perturb_base: w.clone(),
            initial: shared_init,
            param_values: BTreeMap::new(),
            steps,
        }).unwrap();

        for (k, step) in report.steps.iter().enumerate() {
            for (i, pair) in step.coords.iter().enumerate() {
                prop_assert_eq!(pair.differentiable(), !nd[k][i].finite.contains(&w));
            }
        }
    }
}

// --- root extraction against an exhaustive tie scan ------------------------

/// Oracle for tropical roots: a root is a point where the maximum over
/// monomials is attained at least twice; its multiplicity is the spread of
/// the attaining degrees. Candidates are pairwise tie points.
fn tie_scan_roots(coeffs: &[TropicalValue]) -> Vec<(TropicalValue, usize)> {
    let finite: Vec<(usize, &Rat)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            TropicalValue::Finite(r) => Some((i, r)),
            TropicalValue::NegInf => None,
        })
        .collect();
    let mut out = Vec::new();
    let low = finite.first().expect("lead coefficient is finite").0;
    if low > 0 {
        out.push((TropicalValue::NegInf, low));
    }
    let mut candidates: Vec<Rat> = Vec::new();
    for (a, (i, ci)) in finite.iter().enumerate() {
        for (j, cj) in finite.iter().skip(a + 1) {
            candidates.push((*ci - *cj) / rat_int((*j - *i) as i64));
        }
    }
    candidates.sort();
    candidates.dedup();
    for x in candidates {
        let values: Vec<(usize, Rat)> = finite
            .iter()
            .map(|(i, c)| (*i, *c + rat_int(*i as i64) * x.clone()))
            .collect();
        let best = values.iter().map(|(_, v)| v.clone()).max().unwrap();
        let attaining: Vec<usize> = values
            .iter()
            .filter(|(_, v)| *v == best)
            .map(|(i, _)| *i)
            .collect();
        if attaining.len() >= 2 {
            let mult = attaining.last().unwrap() - attaining.first().unwrap();
            out.push((TropicalValue::Finite(x), mult));
        }
    }
    out
}

proptest! {
    #[test]
    fn hull_roots_match_the_tie_scan(
        low in proptest::collection::vec(arb_trop(), 1..6),
        lead in arb_rat(),
    ) {
        let mut coeffs = low;
        coeffs.push(TropicalValue::Finite(lead));
        let p = TropicalPoly::from_coeffs(coeffs.clone());
        let got = trop_roots(&p).unwrap();
        prop_assert_eq!(got, tie_scan_roots(&coeffs));
    }

    #[test]
    fn root_multiplicities_sum_to_the_degree(
        low in proptest::collection::vec(arb_trop(), 1..6),
        lead in arb_rat(),
    ) {
        let mut coeffs = low;
        coeffs.push(TropicalValue::Finite(lead));
        let degree = coeffs.len() - 1;
        let p = TropicalPoly::from_coeffs(coeffs);
        let total: usize = trop_roots(&p).unwrap().iter().map(|(_, m)| m).sum();
        prop_assert_eq!(total, degree);
    }

    /// Valuations read off the coefficient polygon recover the construction:
    /// a product of factors `w - c z^q` reports exactly the multiset of `q`s.
    #[test]
    fn factored_polynomials_expose_root_valuations(
        roots in proptest::collection::vec((arb_nonzero_rat(), arb_rat()), 1..5),
    ) {
        let mut p = PuiseuxPoly::one();
        let mut expected: Vec<TropicalValue> = Vec::new();
        for (c, q) in &roots {
            let r = PuiseuxSeries::monomial(c.clone(), q.clone());
            p = p.mul(&PuiseuxPoly::linear_root(&r));
            expected.push(TropicalValue::Finite(q.clone()));
        }
        expected.sort();
        let flat: Vec<TropicalValue> = newton_valuations(&p)
            .unwrap()
            .into_iter()
            .flat_map(|(v, m)| std::iter::repeat(v).take(m))
            .collect();
        prop_assert_eq!(flat, expected);
    }
}

// --- lifted orbits against the scalar recurrence ----------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Positive monomial initial data stays cancellation-free, so the series
    /// orbit tracks the tropical one exactly and the scalar valuations obey
    /// the piecewise-linear recurrence.
    #[test]
    fn monomial_orbits_track_the_tropical_recurrence(
        c0 in arb_pos_rat(),
        e0 in arb_rat_den(4),
        c1 in arb_pos_rat(),
        e1 in arb_rat_den(4),
    ) {
        let map = autonomous_map();
        let init = vec![
            PuiseuxSeries::monomial(c0, e0),
            PuiseuxSeries::monomial(c1, e1),
        ];
        let report = orbit_compare(&map, &init, &BTreeMap::new(), 6, rat_int(6)).unwrap();
        prop_assert!(report.terminated.is_none());
        prop_assert!(report.all_equal());

        let scalar = report.scalar.as_ref().unwrap();
        for n in 1..scalar.len() - 1 {
            let prev = &scalar[n - 1].tropical;
            let cur = &scalar[n].tropical;
            let step = trop_div(&trop_add(cur, &fin(0)), prev).unwrap();
            prop_assert_eq!(&scalar[n + 1].tropical, &step);
        }
    }
}
