//! Orbit coordinates as symbolic fractions in one free initial coordinate:
//! a product of polynomial factors over a product of polynomial factors,
//! with exact cancellation after every operation.
//!
//! Invariants: factor lists never contain the constant one; denominator
//! factors are never zero; a zero value is exactly the single zero factor
//! over an empty denominator. Reduction only ever cancels what it can
//! certify exactly (equal factors, or trial divisions that leave no
//! remainder), so the represented rational function is preserved.

use std::fmt;

use crate::mapdsl::eval::FieldDomain;
use crate::maxplus::TropicalValue;
use crate::puiseux::{PuiseuxSeries, SeriesError};
use crate::rat::{rat_int, Rat};
use crate::tropcorr::poly::{newton_valuations, PolyError, PuiseuxPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymFrac {
    num_factors: Vec<PuiseuxPoly>,
    den_factors: Vec<PuiseuxPoly>,
}

impl SymFrac {
    pub fn one() -> Self {
        SymFrac {
            num_factors: Vec::new(),
            den_factors: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        SymFrac {
            num_factors: vec![PuiseuxPoly::zero()],
            den_factors: Vec::new(),
        }
    }

    pub fn constant(c: PuiseuxSeries) -> Self {
        Self::from_poly(PuiseuxPoly::constant(c))
    }

    /// The free coordinate itself.
    pub fn identity() -> Self {
        Self::from_poly(PuiseuxPoly::identity())
    }

    pub fn from_poly(p: PuiseuxPoly) -> Self {
        let mut f = SymFrac {
            num_factors: vec![p],
            den_factors: Vec::new(),
        };
        f.reduce();
        f
    }

    pub fn num_factors(&self) -> &[PuiseuxPoly] {
        &self.num_factors
    }

    pub fn den_factors(&self) -> &[PuiseuxPoly] {
        &self.den_factors
    }

    pub fn is_zero(&self) -> bool {
        self.num_factors.iter().any(PuiseuxPoly::is_zero)
    }

    /// Expands both factor products.
    pub fn expanded(&self) -> (PuiseuxPoly, PuiseuxPoly) {
        (product(&self.num_factors), product(&self.den_factors))
    }

    pub fn add(&self, other: &SymFrac) -> SymFrac {
        let (an, ad) = self.expanded();
        let (bn, bd) = other.expanded();
        let num = an.mul(&bd).add(&bn.mul(&ad));
        let mut den = self.den_factors.clone();
        den.extend(other.den_factors.iter().cloned());
        let mut f = SymFrac {
            num_factors: vec![num],
            den_factors: den,
        };
        f.reduce();
        f
    }

    pub fn neg(&self) -> SymFrac {
        let mut f = self.clone();
        match f.num_factors.first_mut() {
            Some(p) => *p = p.scale(&rat_int(-1)),
            None => f.num_factors.push(PuiseuxPoly::constant(
                PuiseuxSeries::constant(rat_int(-1)),
            )),
        }
        f.reduce();
        f
    }

    pub fn sub(&self, other: &SymFrac) -> SymFrac {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SymFrac) -> SymFrac {
        let mut f = SymFrac {
            num_factors: [self.num_factors.clone(), other.num_factors.clone()].concat(),
            den_factors: [self.den_factors.clone(), other.den_factors.clone()].concat(),
        };
        f.reduce();
        f
    }

    pub fn div(&self, other: &SymFrac) -> Result<SymFrac, SeriesError> {
        if other.is_zero() {
            return Err(SeriesError::DivisionByZeroSeries);
        }
        let mut f = SymFrac {
            num_factors: [self.num_factors.clone(), other.den_factors.clone()].concat(),
            den_factors: [self.den_factors.clone(), other.num_factors.clone()].concat(),
        };
        f.reduce();
        Ok(f)
    }

    pub fn pow(&self, k: i64) -> Result<SymFrac, SeriesError> {
        if k == 0 {
            return Ok(Self::one());
        }
        let base = if k < 0 {
            Self::one().div(self)?
        } else {
            self.clone()
        };
        let mut f = SymFrac {
            num_factors: repeat_factors(&base.num_factors, k.unsigned_abs()),
            den_factors: repeat_factors(&base.den_factors, k.unsigned_abs()),
        };
        f.reduce();
        Ok(f)
    }

    /// Root and pole valuations with multiplicity, each sorted ascending with
    /// bottom first. Constant factors contribute neither; the zero fraction
    /// is rejected since every point is a root.
    #[allow(clippy::type_complexity)]
    pub fn valuations(
        &self,
    ) -> Result<(Vec<(TropicalValue, usize)>, Vec<(TropicalValue, usize)>), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok((
            factor_valuations(&self.num_factors)?,
            factor_valuations(&self.den_factors)?,
        ))
    }

    /// Cancels equal factors across the fraction bar, then divides factors
    /// out of the other side wherever an exact trial division succeeds.
    /// Every pass strictly shrinks total degree or factor count.
    fn reduce(&mut self) {
        self.num_factors.retain(|p| !p.is_one());
        self.den_factors.retain(|p| !p.is_one());
        debug_assert!(
            !self.den_factors.iter().any(PuiseuxPoly::is_zero),
            "zero denominators are rejected at division time"
        );
        if self.is_zero() {
            *self = Self::zero();
            return;
        }
        loop {
            if let Some((ni, di)) = self.equal_pair() {
                self.num_factors.remove(ni);
                self.den_factors.remove(di);
                continue;
            }
            if let Some((ni, di, quot)) = self.divisible_pair() {
                self.den_factors.remove(di);
                if quot.is_one() {
                    self.num_factors.remove(ni);
                } else {
                    self.num_factors[ni] = quot;
                }
                continue;
            }
            if let Some((di, ni, quot)) = self.divisible_pair_rev() {
                self.num_factors.remove(ni);
                if quot.is_one() {
                    self.den_factors.remove(di);
                } else {
                    self.den_factors[di] = quot;
                }
                continue;
            }
            break;
        }
    }

    fn equal_pair(&self) -> Option<(usize, usize)> {
        for (ni, n) in self.num_factors.iter().enumerate() {
            if let Some(di) = self.den_factors.iter().position(|d| d == n) {
                return Some((ni, di));
            }
        }
        None
    }

    fn divisible_pair(&self) -> Option<(usize, usize, PuiseuxPoly)> {
        for (di, d) in self.den_factors.iter().enumerate() {
            if d.degree() == Some(0) {
                continue;
            }
            for (ni, n) in self.num_factors.iter().enumerate() {
                if let Some(q) = n.trial_div(d) {
                    return Some((ni, di, q));
                }
            }
        }
        None
    }

    fn divisible_pair_rev(&self) -> Option<(usize, usize, PuiseuxPoly)> {
        for (ni, n) in self.num_factors.iter().enumerate() {
            if n.degree() == Some(0) {
                continue;
            }
            for (di, d) in self.den_factors.iter().enumerate() {
                if let Some(q) = d.trial_div(n) {
                    return Some((di, ni, q));
                }
            }
        }
        None
    }

    /// Renders with `var` as the free coordinate, factors joined by `*`.
    pub fn render(&self, var: &str) -> String {
        let num = render_product(&self.num_factors, var);
        if self.den_factors.is_empty() {
            return num;
        }
        let den = render_product(&self.den_factors, var);
        let den = if top_level_contains(&den, &['*', '/']) {
            format!("({})", den)
        } else {
            den
        };
        format!("{}/{}", num, den)
    }
}

impl fmt::Display for SymFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("w"))
    }
}

fn product(factors: &[PuiseuxPoly]) -> PuiseuxPoly {
    factors
        .iter()
        .fold(PuiseuxPoly::one(), |acc, p| acc.mul(p))
}

fn repeat_factors(factors: &[PuiseuxPoly], times: u64) -> Vec<PuiseuxPoly> {
    let mut out = Vec::with_capacity(factors.len() * times as usize);
    for _ in 0..times {
        out.extend(factors.iter().cloned());
    }
    out
}

fn factor_valuations(
    factors: &[PuiseuxPoly],
) -> Result<Vec<(TropicalValue, usize)>, PolyError> {
    let mut out: Vec<(TropicalValue, usize)> = Vec::new();
    for f in factors {
        if f.degree() == Some(0) {
            continue;
        }
        for (v, m) in newton_valuations(f)? {
            match out.iter_mut().find(|(w, _)| *w == v) {
                Some((_, k)) => *k += m,
                None => out.push((v, m)),
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn render_product(factors: &[PuiseuxPoly], var: &str) -> String {
    if factors.is_empty() {
        return "1".to_string();
    }
    factors
        .iter()
        .map(|p| wrap_sum(&p.render(var)))
        .collect::<Vec<_>>()
        .join("*")
}

fn wrap_sum(s: &str) -> String {
    if top_level_contains(s, &['+', '-']) {
        format!("({})", s)
    } else {
        s.to_string()
    }
}

/// True when any of `targets` occurs outside all parentheses. A leading `-`
/// counts, so negated factors are wrapped inside products.
fn top_level_contains(s: &str, targets: &[char]) -> bool {
    let mut depth = 0u32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if depth == 0 && targets.contains(&c) => return true,
            _ => {}
        }
    }
    false
}

/// Symbolic fractions as a coefficient domain: addition expands, while
/// multiplication and division only move factors, so iteration stays exact.
#[derive(Debug, Clone, Copy, Default)]
pub struct SymFracs;

impl FieldDomain for SymFracs {
    type Value = SymFrac;
    type Error = SeriesError;

    fn literal(&self, r: &Rat) -> SymFrac {
        SymFrac::constant(PuiseuxSeries::constant(r.clone()))
    }
    fn add(&self, a: &SymFrac, b: &SymFrac) -> SymFrac {
        a.add(b)
    }
    fn sub(&self, a: &SymFrac, b: &SymFrac) -> SymFrac {
        a.sub(b)
    }
    fn neg(&self, a: &SymFrac) -> SymFrac {
        a.neg()
    }
    fn mul(&self, a: &SymFrac, b: &SymFrac) -> SymFrac {
        a.mul(b)
    }
    fn div(&self, a: &SymFrac, b: &SymFrac) -> Result<SymFrac, SeriesError> {
        a.div(b)
    }
    fn pow(&self, a: &SymFrac, k: i64) -> Result<SymFrac, SeriesError> {
        a.pow(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::parse_series;

    fn series(s: &str) -> PuiseuxSeries {
        parse_series(s).unwrap()
    }

    fn w_plus(s: &str) -> PuiseuxPoly {
        PuiseuxPoly::from_coeffs(vec![series(s), PuiseuxSeries::one()])
    }

    #[test]
    fn equal_factors_cancel_across_the_bar() {
        let shared = w_plus("1 + z^(2)");
        let f = SymFrac::from_poly(shared.clone())
            .mul(&SymFrac::constant(series("z^(2)")))
            .div(&SymFrac::from_poly(shared))
            .unwrap();
        assert_eq!(f, SymFrac::constant(series("z^(2)")));
        assert_eq!(f.render("w"), "z^(2)");
    }

    #[test]
    fn trial_division_pulls_shared_factors_out_of_expanded_sums() {
        // (z^2*w + z^2 + w + 1) / ((w + 1)*w) = (1 + z^2) / w.
        let num = w_plus("1").mul(&PuiseuxPoly::constant(series("1 + z^(2)")));
        let den = SymFrac::from_poly(w_plus("1")).mul(&SymFrac::identity());
        let f = SymFrac::from_poly(num).div(&den).unwrap();
        assert_eq!(
            f.expanded(),
            (
                PuiseuxPoly::constant(series("1 + z^(2)")),
                PuiseuxPoly::identity()
            )
        );
    }

    #[test]
    fn addition_expands_and_keeps_the_denominator_factored() {
        // 1/w + 1 = (w + 1)/w.
        let f = SymFrac::one()
            .div(&SymFrac::identity())
            .unwrap()
            .add(&SymFrac::one());
        assert_eq!(f.num_factors(), &[w_plus("1")]);
        assert_eq!(f.den_factors(), &[PuiseuxPoly::identity()]);
        assert_eq!(f.render("w"), "(w + 1)/w");
    }

    #[test]
    fn division_by_zero_is_rejected() {
        assert_eq!(
            SymFrac::identity().div(&SymFrac::zero()),
            Err(SeriesError::DivisionByZeroSeries)
        );
    }

    #[test]
    fn powers_repeat_and_invert_factors() {
        let f = SymFrac::identity().pow(-2).unwrap();
        assert!(f.num_factors().is_empty());
        assert_eq!(
            f.den_factors(),
            &[PuiseuxPoly::identity(), PuiseuxPoly::identity()]
        );
        assert_eq!(SymFrac::identity().pow(0).unwrap(), SymFrac::one());
    }

    #[test]
    fn valuations_split_roots_from_poles_and_skip_constants() {
        // z^2 * (w + z^3) / (w * (w + 1)): root valuation {3}, poles
        // {-inf, 0}; the scalar z^2 contributes nothing.
        let f = SymFrac::constant(series("z^(2)"))
            .mul(&SymFrac::from_poly(w_plus("z^(3)")))
            .div(&SymFrac::identity())
            .unwrap()
            .div(&SymFrac::from_poly(w_plus("1")))
            .unwrap();
        let (roots, poles) = f.valuations().unwrap();
        assert_eq!(roots, vec![(TropicalValue::finite(rat_int(3)), 1)]);
        assert_eq!(
            poles,
            vec![
                (TropicalValue::NegInf, 1),
                (TropicalValue::finite(rat_int(0)), 1)
            ]
        );
    }

    #[test]
    fn zero_numerators_normalize_and_refuse_valuations() {
        let f = SymFrac::identity().sub(&SymFrac::identity());
        assert!(f.is_zero());
        assert_eq!(f, SymFrac::zero());
        assert_eq!(f.valuations(), Err(PolyError::ZeroPolynomial));
        assert_eq!(f.render("w"), "0");
    }
}
