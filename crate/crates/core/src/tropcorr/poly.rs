//! Univariate polynomials with series or tropical coefficients, and root
//! valuations read off the Newton polygon.
//!
//! Invariants: coefficient vectors are dense, ascending in degree, and
//! trimmed so the leading coefficient is nonzero (series: not exactly zero,
//! tropical: not bottom). The root multiset of a tropical polynomial is the
//! negated slope multiset of the upper concave hull of the finite points
//! `(i, c_i)`, together with a root at `-inf` of multiplicity `ord` when the
//! lowest `ord` coefficients are bottom; multiplicities add up to the degree.

use std::fmt;

use crate::maxplus::TropicalValue;
use crate::puiseux::{ps_add, ps_inv, ps_mul, ps_scale, ps_sub, PuiseuxSeries, SeriesError};
use crate::rat::{rat_int, Rat};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial carries no root data")]
    ZeroPolynomial,
    #[error("constant polynomials have no roots")]
    ConstantPolynomial,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Polynomial in one indeterminate over truncated series coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxPoly {
    /// Ascending in degree; the last entry is never the exact zero series.
    coeffs: Vec<PuiseuxSeries>,
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(PuiseuxSeries::one())
    }

    pub fn constant(c: PuiseuxSeries) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `w`.
    pub fn identity() -> Self {
        Self::from_coeffs(vec![PuiseuxSeries::zero(), PuiseuxSeries::one()])
    }

    /// The degree-one polynomial `w - r`, whose single root is `r`.
    pub fn linear_root(r: &PuiseuxSeries) -> Self {
        Self::from_coeffs(vec![crate::puiseux::ps_neg(r), PuiseuxSeries::one()])
    }

    /// Trims trailing exact zeros; indeterminate zeros are kept, since they
    /// may hide a nonzero leading coefficient.
    pub fn from_coeffs(coeffs: Vec<PuiseuxSeries>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(PuiseuxSeries::is_zero) {
            coeffs.pop();
        }
        PuiseuxPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[PuiseuxSeries] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == PuiseuxSeries::one()
    }

    pub fn add(&self, other: &PuiseuxPoly) -> PuiseuxPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = PuiseuxSeries::zero();
        let coeffs = (0..n)
            .map(|i| {
                ps_add(
                    self.coeffs.get(i).unwrap_or(&zero),
                    other.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &PuiseuxPoly) -> PuiseuxPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![PuiseuxSeries::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = ps_add(&coeffs[i + j], &ps_mul(a, b));
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Rat) -> PuiseuxPoly {
        Self::from_coeffs(self.coeffs.iter().map(|s| ps_scale(s, c)).collect())
    }

    fn all_exact(&self) -> bool {
        self.coeffs.iter().all(PuiseuxSeries::is_exact)
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder
    /// and exactness can be certified: every coefficient on both sides must
    /// be an exact series and the divisor's leading coefficient an exact
    /// monomial, so each elimination step is exact arithmetic. Returns `None`
    /// when any of that fails or a nonzero remainder is left.
    pub fn trial_div(&self, divisor: &PuiseuxPoly) -> Option<PuiseuxPoly> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let m = divisor.degree()?;
        if !self.all_exact() || !divisor.all_exact() {
            return None;
        }
        let lead = divisor.coeffs.last().expect("nonzero divisor has a lead");
        if lead.terms().len() != 1 {
            return None;
        }
        let inv = ps_inv(lead, &Rat::default()).expect("exact monomial inverts exactly");
        let n = self.degree().expect("nonzero dividend has a degree");
        if n < m {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![PuiseuxSeries::zero(); n - m + 1];
        for k in (0..=n - m).rev() {
            let q = ps_mul(&rem[m + k], &inv);
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = ps_sub(&rem[k + i], &ps_mul(&q, d));
            }
            quot[k] = q;
        }
        if rem.iter().all(PuiseuxSeries::is_zero) {
            Some(Self::from_coeffs(quot))
        } else {
            None
        }
    }

    /// Coefficient-wise valuations. Errors when a coefficient is an
    /// indeterminate zero, since its valuation cannot be certified.
    pub fn tropicalize(&self) -> Result<TropicalPoly, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.valuation())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TropicalPoly::from_coeffs(coeffs))
    }

    /// Renders with `var` as the indeterminate, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let power = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{}^{}", var, k),
            };
            let rendered = c.to_string();
            let part = if power.is_empty() {
                rendered
            } else if *c == PuiseuxSeries::one() {
                power
            } else if c.terms().len() == 1 && c.is_exact() && !rendered.starts_with('-') {
                format!("{}*{}", rendered, power)
            } else {
                format!("({})*{}", rendered, power)
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("w"))
    }
}

/// Polynomial with tropical coefficients, ascending in degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPoly {
    coeffs: Vec<TropicalValue>,
}

impl TropicalPoly {
    /// Trims trailing bottom coefficients.
    pub fn from_coeffs(coeffs: Vec<TropicalValue>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| *c == TropicalValue::NegInf) {
            coeffs.pop();
        }
        TropicalPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[TropicalValue] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

/// Root multiset of a tropical polynomial as `(root, multiplicity)` pairs,
/// ascending, `-inf` first when present. Multiplicities sum to the degree.
pub fn trop_roots(p: &TropicalPoly) -> Result<Vec<(TropicalValue, usize)>, PolyError> {
    let n = p.degree().ok_or(PolyError::ZeroPolynomial)?;
    if n == 0 {
        return Err(PolyError::ConstantPolynomial);
    }
    let pts: Vec<(usize, Rat)> = p
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            TropicalValue::Finite(r) => Some((i, r.clone())),
            TropicalValue::NegInf => None,
        })
        .collect();
    let ord = pts.first().expect("leading coefficient is finite").0;
    let mut roots = Vec::new();
    if ord > 0 {
        roots.push((TropicalValue::NegInf, ord));
    }
    let hull = upper_hull(&pts);
    for seg in hull.windows(2) {
        let (i0, c0) = &seg[0];
        let (i1, c1) = &seg[1];
        let run = rat_int((i1 - i0) as i64);
        let slope = (c1 - c0) / run;
        roots.push((TropicalValue::Finite(-slope), i1 - i0));
    }
    Ok(roots)
}

/// Upper concave hull of points sorted by ascending x; collinear interior
/// points are dropped, so consecutive hull slopes strictly decrease.
fn upper_hull(pts: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
    let mut hull: Vec<(usize, Rat)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = rat_int((b.0 - a.0) as i64) * (&p.1 - &a.1)
                - (&b.1 - &a.1) * rat_int((p.0 - a.0) as i64);
            if cross >= Rat::default() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull
}

/// Valuations of the classical roots, counted with multiplicity: the root
/// multiset of the coefficient-wise tropicalization.
pub fn newton_valuations(p: &PuiseuxPoly) -> Result<Vec<(TropicalValue, usize)>, PolyError> {
    trop_roots(&p.tropicalize()?)
}
