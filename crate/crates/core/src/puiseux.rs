//! Truncated Puiseux series in one parameter `z`, ordered by descending
//! exponent, with a non-archimedean valuation.
//!
//! A series is a finite list of `(exponent, coefficient)` terms (exact
//! rationals, strictly descending exponents, no zero coefficients) together
//! with a knowledge threshold `tau`: coefficients of exponents `>= tau` are
//! exact, anything strictly below `tau` is unknown. `tau = None` means the
//! representation is exact. The valuation of a series is its largest
//! exponent; the valuation of the exact zero series is `-inf`.
//!
//! Truncation thresholds are propagated conservatively: every operation
//! claims knowledge only where its inputs guarantee it. A series with no
//! terms but a finite threshold is a "truncated zero" whose valuation is
//! indeterminate; that state is reported through [`SeriesError`], never
//! silently collapsed to zero.

use std::fmt;

use crate::maxplus::TropicalValue;
use crate::rat::{parse_rat, rat_int, Rat};

/// Failure states of series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("division by the exact zero series")]
    DivisionByZeroSeries,
    #[error("leading term indeterminate: no terms inside the truncation window")]
    IndeterminateLeadingTerm,
    #[error("valuation indeterminate: no terms inside the truncation window")]
    IndeterminateValuation,
    #[error("malformed series literal: {0}")]
    Parse(String),
}

/// Truncated Puiseux series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    /// `(exponent, coefficient)`, exponents strictly descending, coefficients nonzero.
    terms: Vec<(Rat, Rat)>,
    /// Knowledge threshold: exact for exponents `>= tau`; `None` = exact everywhere.
    tau: Option<Rat>,
}

impl PuiseuxSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        PuiseuxSeries { terms: Vec::new(), tau: None }
    }

    /// The exact constant 1.
    pub fn one() -> Self {
        Self::monomial(rat_int(1), Rat::default())
    }

    /// The exact series `coeff * z^exp`; zero coefficient gives the zero series.
    pub fn monomial(coeff: Rat, exp: Rat) -> Self {
        if coeff == Rat::default() {
            return Self::zero();
        }
        PuiseuxSeries { terms: vec![(exp, coeff)], tau: None }
    }

    /// The exact constant `c`.
    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, Rat::default())
    }

    /// Builds a series from arbitrary terms and a threshold, canonicalizing:
    /// equal exponents are combined, zero coefficients and terms below the
    /// threshold are dropped.
    pub fn from_terms(terms: Vec<(Rat, Rat)>, tau: Option<Rat>) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut canon: Vec<(Rat, Rat)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(t) = &tau {
                if e < *t {
                    continue;
                }
            }
            match canon.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => canon.push((e, c)),
            }
        }
        canon.retain(|(_, c)| *c != Rat::default());
        PuiseuxSeries { terms: canon, tau }
    }

    pub fn terms(&self) -> &[(Rat, Rat)] {
        &self.terms
    }

    pub fn threshold(&self) -> Option<&Rat> {
        self.tau.as_ref()
    }

    /// True for the exact zero series.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.tau.is_none()
    }

    /// True when no terms are known but the series is truncated, so it may
    /// hide nonzero terms below the window.
    pub fn is_indeterminate_zero(&self) -> bool {
        self.terms.is_empty() && self.tau.is_some()
    }

    pub fn is_exact(&self) -> bool {
        self.tau.is_none()
    }

    /// Leading `(exponent, coefficient)`; `None` for the exact zero series.
    pub fn leading(&self) -> Result<Option<(&Rat, &Rat)>, SeriesError> {
        match self.terms.first() {
            Some((e, c)) => Ok(Some((e, c))),
            None if self.tau.is_none() => Ok(None),
            None => Err(SeriesError::IndeterminateLeadingTerm),
        }
    }

    /// Largest exponent, or `-inf` for the exact zero series.
    pub fn valuation(&self) -> Result<TropicalValue, SeriesError> {
        match self.terms.first() {
            Some((e, _)) => Ok(TropicalValue::Finite(e.clone())),
            None if self.tau.is_none() => Ok(TropicalValue::NegInf),
            None => Err(SeriesError::IndeterminateValuation),
        }
    }

    /// Leading coefficient; errors on the exact zero series as well, since
    /// the zero series has no leading term.
    pub fn leading_coeff(&self) -> Result<Rat, SeriesError> {
        match self.leading()? {
            Some((_, c)) => Ok(c.clone()),
            None => Err(SeriesError::DivisionByZeroSeries),
        }
    }

    /// Upper bound on any exponent that may occur in the series (`None` = the
    /// series is exactly zero, so there is no exponent at all).
    fn exponent_bound(&self) -> Option<Rat> {
        self.terms
            .first()
            .map(|(e, _)| e.clone())
            .or_else(|| self.tau.clone())
    }
}

fn tau_max(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    // `None` is -inf: the exact case imposes no floor.
    match (a, b) {
        (None, x) | (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(x.clone().max(y.clone())),
    }
}

// `a + b` with `None` = -inf absorbing.
fn opt_add(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// `f + g`. Thresholds take the coarser of the two (max).
pub fn ps_add(f: &PuiseuxSeries, g: &PuiseuxSeries) -> PuiseuxSeries {
    let tau = tau_max(&f.tau, &g.tau);
    let mut terms = f.terms.clone();
    terms.extend(g.terms.iter().cloned());
    PuiseuxSeries::from_terms(terms, tau)
}

/// `-f`.
pub fn ps_neg(f: &PuiseuxSeries) -> PuiseuxSeries {
    PuiseuxSeries {
        terms: f.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        tau: f.tau.clone(),
    }
}

/// `f - g`.
pub fn ps_sub(f: &PuiseuxSeries, g: &PuiseuxSeries) -> PuiseuxSeries {
    ps_add(f, &ps_neg(g))
}

/// `f * g`. An exact zero factor gives the exact zero product; otherwise the
/// threshold is `max(tau_f + bound(g), tau_g + bound(f))`, where `bound` is
/// the largest exponent possibly present in the other factor.
pub fn ps_mul(f: &PuiseuxSeries, g: &PuiseuxSeries) -> PuiseuxSeries {
    if f.is_zero() || g.is_zero() {
        return PuiseuxSeries::zero();
    }
    let tau = tau_max(
        &opt_add(&f.tau, &g.exponent_bound()),
        &opt_add(&g.tau, &f.exponent_bound()),
    );
    let mut terms = Vec::with_capacity(f.terms.len() * g.terms.len());
    for (ef, cf) in &f.terms {
        for (eg, cg) in &g.terms {
            terms.push((ef + eg, cf * cg));
        }
    }
    PuiseuxSeries::from_terms(terms, tau)
}

/// Multiplies by the exact scalar `c`.
pub fn ps_scale(f: &PuiseuxSeries, c: &Rat) -> PuiseuxSeries {
    ps_mul(f, &PuiseuxSeries::constant(c.clone()))
}

/// `1 / f` by geometric expansion around the leading term, keeping exponents
/// within `depth` of the leading exponent of the result.
///
/// Writing `f = c z^v (1 + u)` with `u` strictly below order zero, the
/// inverse is `c^-1 z^-v sum (-u)^k`; the sum is truncated to relative
/// exponents `>= -depth`, so the result's threshold is `-v - depth` (or the
/// inherited `tau_f - 2v` if that is coarser). The inverse of an exact
/// monomial is exact.
pub fn ps_inv(f: &PuiseuxSeries, depth: &Rat) -> Result<PuiseuxSeries, SeriesError> {
    let (v, c) = match f.terms.first() {
        Some((e, c)) => (e.clone(), c.clone()),
        None if f.tau.is_none() => return Err(SeriesError::DivisionByZeroSeries),
        None => return Err(SeriesError::IndeterminateLeadingTerm),
    };
    let inv_c = rat_int(1) / &c;

    // Relative tail u: exponents shifted by -v, coefficients divided by c.
    let u_terms: Vec<(Rat, Rat)> = f.terms[1..]
        .iter()
        .map(|(e, q)| (e - &v, q / &c))
        .collect();
    let u_tau_rel = f.tau.as_ref().map(|t| t - &v);

    if u_terms.is_empty() && u_tau_rel.is_none() {
        return Ok(PuiseuxSeries::monomial(inv_c, -v));
    }

    // Coarsen the tail's window to -depth so every power is truncated there.
    let window = match &u_tau_rel {
        Some(t) => t.clone().max(-depth.clone()),
        None => -depth.clone(),
    };
    let u = PuiseuxSeries {
        terms: u_terms,
        tau: Some(window.clone()),
    };
    let minus_u = ps_neg(&u);

    // Geometric sum, stopping once a power lies entirely below the window;
    // later powers only sink lower. Each power is re-windowed so that
    // sub-window terms do not accumulate.
    let mut acc = PuiseuxSeries::one();
    let mut power = minus_u.clone();
    while power.terms.first().is_some_and(|(e, _)| *e >= window) {
        acc = ps_add(&acc, &power);
        let product = ps_mul(&power, &minus_u);
        power = PuiseuxSeries::from_terms(product.terms, Some(window.clone()));
    }
    // The sum is unknown below the window even when every kept power is gone.
    acc = ps_add(
        &acc,
        &PuiseuxSeries {
            terms: Vec::new(),
            tau: Some(window.clone()),
        },
    );

    let terms = acc
        .terms
        .iter()
        .map(|(e, q)| (e - &v, q * &inv_c))
        .collect();
    let tau = acc.tau.map(|t| t - &v);
    Ok(PuiseuxSeries::from_terms(terms, tau))
}

/// `f^k` by repeated squaring; negative exponents invert first.
pub fn ps_pow(f: &PuiseuxSeries, k: i64, depth: &Rat) -> Result<PuiseuxSeries, SeriesError> {
    if k == 0 {
        return Ok(PuiseuxSeries::one());
    }
    let base = if k < 0 { ps_inv(f, depth)? } else { f.clone() };
    let mut n = k.unsigned_abs();
    let mut base = base;
    let mut acc = PuiseuxSeries::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = ps_mul(&acc, &base);
        }
        base = ps_mul(&base, &base);
        n >>= 1;
    }
    Ok(acc)
}

/// `f / g`.
pub fn ps_div(
    f: &PuiseuxSeries,
    g: &PuiseuxSeries,
    depth: &Rat,
) -> Result<PuiseuxSeries, SeriesError> {
    Ok(ps_mul(f, &ps_inv(g, depth)?))
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            match &self.tau {
                None => return write!(f, "0"),
                Some(t) => return write!(f, "O(z^({}))", t),
            }
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if *c < Rat::default() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let unit_coeff = mag == rat_int(1);
            if *e == Rat::default() {
                write!(f, "{}", mag)?;
            } else if unit_coeff {
                write!(f, "z^({})", e)?;
            } else {
                write!(f, "{}*z^({})", mag, e)?;
            }
        }
        if let Some(t) = &self.tau {
            write!(f, " + O(z^({}))", t)?;
        }
        Ok(())
    }
}

/// Parses the rendering produced by `Display`: terms `c`, `z^(q)`, or
/// `c*z^(q)` joined by `+`/`-`, with an optional trailing `O(z^(q))`.
pub fn parse_series(input: &str) -> Result<PuiseuxSeries, SeriesError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(SeriesError::Parse("empty series literal".into()));
    }
    let mut terms: Vec<(Rat, Rat)> = Vec::new();
    let mut tau: Option<Rat> = None;
    for (sign, part) in split_signed_terms(s)? {
        let part = part.trim();
        if part.is_empty() {
            return Err(SeriesError::Parse("missing term".into()));
        }
        if let Some(rest) = part.strip_prefix("O(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| SeriesError::Parse(format!("unclosed O(...) in `{input}`")))?;
            let exp = parse_z_power(inner.trim())
                .ok_or_else(|| SeriesError::Parse(format!("bad truncation term `{part}`")))?;
            tau = Some(match tau {
                Some(t) => t.max(exp),
                None => exp,
            });
            continue;
        }
        let (coeff, exp) = parse_term(part)
            .ok_or_else(|| SeriesError::Parse(format!("bad series term `{part}`")))?;
        terms.push((exp, if sign { -coeff } else { coeff }));
    }
    Ok(PuiseuxSeries::from_terms(terms, tau))
}

// Splits on top-level + and - between terms. A sign directly after `^`, `*`,
// or `/` belongs to the term (as in `z^-8`); parentheses protect exponents.
fn split_signed_terms(s: &str) -> Result<Vec<(bool, String)>, SeriesError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    let mut negated = false;
    let mut last_sig: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
                last_sig = Some(ch);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| SeriesError::Parse(format!("unbalanced `)` in `{s}`")))?;
                current.push(ch);
                last_sig = Some(ch);
            }
            '+' | '-' if depth == 0 && !matches!(last_sig, Some('^' | '*' | '/')) => {
                if current.trim().is_empty() {
                    if ch == '-' {
                        negated = !negated;
                    }
                } else {
                    out.push((negated, std::mem::take(&mut current)));
                    negated = ch == '-';
                    last_sig = None;
                }
            }
            _ => {
                if !ch.is_whitespace() {
                    last_sig = Some(ch);
                }
                current.push(ch);
            }
        }
    }
    if depth != 0 {
        return Err(SeriesError::Parse(format!("unbalanced `(` in `{s}`")));
    }
    if current.trim().is_empty() {
        return Err(SeriesError::Parse(format!("dangling sign in `{s}`")));
    }
    out.push((negated, current));
    Ok(out)
}

// `c`, `z`, `z^q`, `z^(q)`, `c*z`, `c*z^q`, or `c*z^(q)`.
fn parse_term(part: &str) -> Option<(Rat, Rat)> {
    let part = part.trim();
    if let Some((coeff_txt, z_txt)) = part.split_once('*') {
        let coeff = parse_rat(coeff_txt.trim())?;
        let exp = parse_z_power(z_txt.trim())?;
        return Some((coeff, exp));
    }
    if part.starts_with('z') {
        let exp = parse_z_power(part)?;
        return Some((rat_int(1), exp));
    }
    parse_rat(part).map(|c| (c, Rat::default()))
}

// `z`, `z^q`, or `z^(q)`.
fn parse_z_power(s: &str) -> Option<Rat> {
    let rest = s.strip_prefix('z')?;
    let rest = rest.trim();
    if rest.is_empty() {
        return Some(rat_int(1));
    }
    let rest = rest.strip_prefix('^')?.trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(rest);
    parse_rat(inner.trim())
}
