//! Dense univariate polynomials with rational coefficients.
//!
//! Coefficients are stored by ascending degree with no trailing zeros, so
//! the zero polynomial is the empty vector and `coeffs.len() - 1` is the
//! degree.

use crate::rat::Rat;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rat::from_integer(1.into()))
    }

    /// The variable itself.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![Rat::default(), Rat::from_integer(1.into())])
    }

    /// Ascending-degree coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| *c == Rat::default()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Multiplicity of the root at zero: the lowest nonzero-degree index.
    pub fn trailing_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != Rat::default())
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::default();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Rat::default() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division; panics on a zero divisor (callers check).
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dlead = divisor.leading().expect("nonzero divisor").clone();
        let ddeg = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::default(); self.coeffs.len().saturating_sub(ddeg)];
        while rem.len() > ddeg {
            while rem.last().is_some_and(|c| *c == Rat::default()) {
                rem.pop();
            }
            if rem.len() < ddeg + 1 {
                break;
            }
            let shift = rem.len() - 1 - ddeg;
            let factor = rem.last().expect("nonempty").clone() / &dlead;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let idx = shift + j;
                let delta = b * &factor;
                rem[idx] -= delta;
            }
            quot[shift] = factor;
            // The leading entry is now exactly zero.
            rem.pop();
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scales so the leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) if *l != Rat::from_integer(1.into()) => {
                let inv = Rat::from_integer(1.into()) / l;
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Rat::default() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                _ => {
                    if *c != Rat::from_integer(1.into()) {
                        write!(f, "{}*", c)?;
                    }
                    if i == 1 {
                        write!(f, "e")?;
                    } else {
                        write!(f, "e^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let q = Poly::from_coeffs(vec![rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(q.degree(), Some(0));
        assert!(Poly::from_coeffs(vec![rat_int(0)]).is_zero());
    }

    #[test]
    fn division_recovers_quotient_and_remainder() {
        let a = p(&[-1, 0, 0, 1]); // e^3 - 1
        let b = p(&[-1, 1]); // e - 1
        let (q, r) = a.divrem(&b);
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());

        let a = p(&[1, 2, 3]);
        let b = p(&[1, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(b.mul(&q).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_finds_common_factors() {
        let common = p(&[1, 1]); // e + 1
        let a = common.mul(&p(&[2, 0, 1]));
        let b = common.mul(&p(&[-3, 1]));
        assert_eq!(a.gcd(&b), common);
        assert_eq!(p(&[2]).gcd(&p(&[0, 3])), Poly::one());
    }

    #[test]
    fn trailing_order_counts_root_multiplicity_at_zero() {
        assert_eq!(p(&[0, 0, 5, 1]).trailing_order(), Some(2));
        assert_eq!(p(&[7]).trailing_order(), Some(0));
        assert_eq!(Poly::zero().trailing_order(), None);
    }

    #[test]
    fn evaluation_uses_horner() {
        let q = p(&[1, -2, 1]); // (e-1)^2
        assert_eq!(q.eval(&rat_int(3)), rat_int(4));
        assert_eq!(q.eval(&rat(1, 2)), rat(1, 4));
    }
}
