//! Exact continuous piecewise-linear functions of one rational variable,
//! closed under max, pointwise sum and difference, and integer scaling.
//!
//! A function is stored as its value at the origin, strictly ascending
//! breakpoints, and one slope per piece (`slopes.len() == breakpoints.len()
//! + 1`). The form is canonical: adjacent pieces always have distinct
//! slopes, so structural equality is function equality and every stored
//! breakpoint is a genuine kink.

use crate::maxplus::{EvalError, TropDomain, TropicalValue};
use crate::rat::Rat;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    value_at_zero: Rat,
    breakpoints: Vec<Rat>,
    slopes: Vec<Rat>,
}

/// Points where a piecewise-linear orbit coordinate fails to be smooth in
/// the initial value: its kinks, plus the lower boundary of the line when
/// the function is not eventually constant towards it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdPoints {
    pub minus_infinity: bool,
    pub finite: Vec<Rat>,
}

impl NdPoints {
    pub fn is_empty(&self) -> bool {
        !self.minus_infinity && self.finite.is_empty()
    }
}

impl fmt::Display for NdPoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        let mut first = true;
        if self.minus_infinity {
            write!(f, "-inf")?;
            first = false;
        }
        for p in &self.finite {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{}", p)?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl PiecewiseLinearFn {
    pub fn constant(c: Rat) -> Self {
        PiecewiseLinearFn {
            value_at_zero: c,
            breakpoints: Vec::new(),
            slopes: vec![Rat::default()],
        }
    }

    pub fn identity() -> Self {
        PiecewiseLinearFn {
            value_at_zero: Rat::default(),
            breakpoints: Vec::new(),
            slopes: vec![Rat::from_integer(1.into())],
        }
    }

    /// Builds from parts and canonicalizes. Breakpoints must be strictly
    /// ascending with one more slope than breakpoints.
    pub fn new(value_at_zero: Rat, breakpoints: Vec<Rat>, slopes: Vec<Rat>) -> Self {
        assert_eq!(slopes.len(), breakpoints.len() + 1, "one slope per piece");
        assert!(
            breakpoints.windows(2).all(|w| w[0] < w[1]),
            "breakpoints must be strictly ascending"
        );
        let mut f = PiecewiseLinearFn {
            value_at_zero,
            breakpoints,
            slopes,
        };
        f.canonicalize();
        f
    }

    fn canonicalize(&mut self) {
        let mut i = 0;
        while i < self.breakpoints.len() {
            if self.slopes[i] == self.slopes[i + 1] {
                self.breakpoints.remove(i);
                self.slopes.remove(i + 1);
            } else {
                i += 1;
            }
        }
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rat] {
        &self.slopes
    }

    pub fn is_constant(&self) -> bool {
        self.breakpoints.is_empty() && self.slopes[0] == Rat::default()
    }

    /// Piece index containing `(x, x + h)` for small positive `h`.
    fn piece_right_of(&self, x: &Rat) -> usize {
        self.breakpoints.partition_point(|b| b <= x)
    }

    /// Piece index containing `(x - h, x)` for small positive `h`.
    fn piece_left_of(&self, x: &Rat) -> usize {
        self.breakpoints.partition_point(|b| b < x)
    }

    pub fn slope_right(&self, x: &Rat) -> &Rat {
        &self.slopes[self.piece_right_of(x)]
    }

    pub fn slope_left(&self, x: &Rat) -> &Rat {
        &self.slopes[self.piece_left_of(x)]
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let zero = Rat::default();
        let mut val = self.value_at_zero.clone();
        let mut pos = zero.clone();
        if *x >= zero {
            let mut i = self.piece_right_of(&zero);
            while i < self.breakpoints.len() && self.breakpoints[i] < *x {
                val += &self.slopes[i] * (&self.breakpoints[i] - &pos);
                pos = self.breakpoints[i].clone();
                i += 1;
            }
            val += &self.slopes[i] * (x - &pos);
        } else {
            let mut i = self.piece_left_of(&zero);
            while i > 0 && self.breakpoints[i - 1] > *x {
                val += &self.slopes[i] * (&self.breakpoints[i - 1] - &pos);
                pos = self.breakpoints[i - 1].clone();
                i -= 1;
            }
            val += &self.slopes[i] * (x - &pos);
        }
        val
    }

    pub fn negate(&self) -> Self {
        PiecewiseLinearFn {
            value_at_zero: -&self.value_at_zero,
            breakpoints: self.breakpoints.clone(),
            slopes: self.slopes.iter().map(|s| -s).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let kr = Rat::from_integer(k.into());
        PiecewiseLinearFn::new(
            &self.value_at_zero * &kr,
            if k == 0 {
                Vec::new()
            } else {
                self.breakpoints.clone()
            },
            if k == 0 {
                vec![Rat::default()]
            } else {
                self.slopes.iter().map(|s| s * &kr).collect()
            },
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let cuts = merge_cuts(&self.breakpoints, &other.breakpoints);
        let mut slopes = Vec::with_capacity(cuts.len() + 1);
        let (mut i, mut j) = (0usize, 0usize);
        slopes.push(&self.slopes[0] + &other.slopes[0]);
        for c in &cuts {
            if self.breakpoints.get(i) == Some(c) {
                i += 1;
            }
            if other.breakpoints.get(j) == Some(c) {
                j += 1;
            }
            slopes.push(&self.slopes[i] + &other.slopes[j]);
        }
        PiecewiseLinearFn::new(&self.value_at_zero + &other.value_at_zero, cuts, slopes)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negate())
    }

    /// Pointwise maximum: the exact upper envelope. Cuts are the union of
    /// both kink sets plus every crossing of the two graphs; on each
    /// refined piece the winner is decided at an interior rational point.
    pub fn max(&self, other: &Self) -> Self {
        let diff = self.sub(other);
        let mut cuts = merge_cuts(&self.breakpoints, &other.breakpoints);
        for r in diff.zero_crossings() {
            match cuts.binary_search(&r) {
                Ok(_) => {}
                Err(pos) => cuts.insert(pos, r),
            }
        }
        let one = Rat::from_integer(1.into());
        let mut slopes = Vec::with_capacity(cuts.len() + 1);
        for piece in 0..=cuts.len() {
            let probe = if cuts.is_empty() {
                Rat::default()
            } else if piece == 0 {
                &cuts[0] - &one
            } else if piece == cuts.len() {
                &cuts[piece - 1] + &one
            } else {
                (&cuts[piece - 1] + &cuts[piece]) / Rat::from_integer(2.into())
            };
            let winner = if self.eval(&probe) >= other.eval(&probe) {
                self
            } else {
                other
            };
            slopes.push(winner.slope_right(&probe).clone());
        }
        let anchor = self.eval(&Rat::default()).max(other.eval(&Rat::default()));
        PiecewiseLinearFn::new(anchor, cuts, slopes)
    }

    /// Exact roots where the function changes sign within a piece; kinks
    /// that merely touch zero are not included.
    fn zero_crossings(&self) -> Vec<Rat> {
        let zero = Rat::default();
        let mut out = Vec::new();
        // Knot values at every breakpoint.
        let knot_vals: Vec<Rat> = self.breakpoints.iter().map(|b| self.eval(b)).collect();
        if let (Some(first_bp), Some(first_val)) = (self.breakpoints.first(), knot_vals.first()) {
            let s = &self.slopes[0];
            if *s != zero {
                let r = first_bp - first_val / s;
                if r < *first_bp {
                    out.push(r);
                }
            }
        }
        for w in 0..self.breakpoints.len().saturating_sub(1) {
            let (va, vb) = (&knot_vals[w], &knot_vals[w + 1]);
            if (va < &zero && vb > &zero) || (va > &zero && vb < &zero) {
                let s = &self.slopes[w + 1];
                let r = &self.breakpoints[w] - va / s;
                out.push(r);
            }
        }
        if let (Some(last_bp), Some(last_val)) = (self.breakpoints.last(), knot_vals.last()) {
            let s = self.slopes.last().expect("at least one slope");
            if *s != zero {
                let r = last_bp - last_val / s;
                if r > *last_bp {
                    out.push(r);
                }
            }
        }
        if self.breakpoints.is_empty() && self.slopes[0] != zero {
            out.push(-&self.value_at_zero / &self.slopes[0]);
        }
        out
    }

    /// Kinks plus the lower boundary when the leftmost slope is nonzero.
    pub fn nd_points(&self) -> NdPoints {
        NdPoints {
            minus_infinity: self.slopes[0] != Rat::default(),
            finite: self.breakpoints.clone(),
        }
    }
}

fn merge_cuts(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out: Vec<Rat> = a.iter().chain(b.iter()).cloned().collect();
    out.sort();
    out.dedup();
    out
}

impl fmt::Display for PiecewiseLinearFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pl(value(0)={}", self.value_at_zero)?;
        if !self.breakpoints.is_empty() {
            write!(f, ", kinks [")?;
            for (i, b) in self.breakpoints.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", b)?;
            }
            write!(f, "]")?;
        }
        write!(f, ", slopes [")?;
        for (i, s) in self.slopes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", s)?;
        }
        write!(f, "])")
    }
}

/// A max-plus value that is either bottom or a piecewise-linear function of
/// the free initial coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlValue {
    Bottom,
    Fn(PiecewiseLinearFn),
}

impl PlValue {
    pub fn eval(&self, x: &Rat) -> TropicalValue {
        match self {
            PlValue::Bottom => TropicalValue::NegInf,
            PlValue::Fn(f) => TropicalValue::finite(f.eval(x)),
        }
    }
}

impl fmt::Display for PlValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlValue::Bottom => write!(f, "-inf"),
            PlValue::Fn(g) => write!(f, "{}", g),
        }
    }
}

/// Piecewise-linear functions as a max-plus evaluation domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlFunctions;

impl TropDomain for PlFunctions {
    type Value = PlValue;

    fn literal(&self, v: &TropicalValue) -> PlValue {
        match v {
            TropicalValue::NegInf => PlValue::Bottom,
            TropicalValue::Finite(r) => PlValue::Fn(PiecewiseLinearFn::constant(r.clone())),
        }
    }

    fn maximum(&self, a: &PlValue, b: &PlValue) -> Result<PlValue, EvalError> {
        Ok(match (a, b) {
            (PlValue::Bottom, _) => b.clone(),
            (_, PlValue::Bottom) => a.clone(),
            (PlValue::Fn(f), PlValue::Fn(g)) => PlValue::Fn(f.max(g)),
        })
    }

    fn sum(&self, a: &PlValue, b: &PlValue) -> Result<PlValue, EvalError> {
        Ok(match (a, b) {
            (PlValue::Fn(f), PlValue::Fn(g)) => PlValue::Fn(f.add(g)),
            _ => PlValue::Bottom,
        })
    }

    fn difference(&self, a: &PlValue, b: &PlValue) -> Result<PlValue, EvalError> {
        match (a, b) {
            (_, PlValue::Bottom) => Err(EvalError::DivisionByBottom),
            (PlValue::Bottom, _) => Ok(PlValue::Bottom),
            (PlValue::Fn(f), PlValue::Fn(g)) => Ok(PlValue::Fn(f.sub(g))),
        }
    }

    fn scale(&self, k: i64, a: &PlValue) -> Result<PlValue, EvalError> {
        if k == 0 {
            return Ok(PlValue::Fn(PiecewiseLinearFn::constant(Rat::default())));
        }
        match a {
            PlValue::Bottom => {
                if k < 0 {
                    Err(EvalError::DivisionByBottom)
                } else {
                    Ok(PlValue::Bottom)
                }
            }
            PlValue::Fn(f) => Ok(PlValue::Fn(f.scale(k))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn pl(v0: i64, bps: &[(i64, i64)], slopes: &[(i64, i64)]) -> PiecewiseLinearFn {
        PiecewiseLinearFn::new(
            rat_int(v0),
            bps.iter().map(|&(n, d)| rat(n, d)).collect(),
            slopes.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
    }

    #[test]
    fn evaluation_walks_pieces_in_both_directions() {
        // Kinks at -1 and 2; slopes -1, 0, 3 left to right; f(0) = 5.
        let f = pl(5, &[(-1, 1), (2, 1)], &[(-1, 1), (0, 1), (3, 1)]);
        assert_eq!(f.eval(&rat_int(0)), rat_int(5));
        assert_eq!(f.eval(&rat_int(2)), rat_int(5));
        assert_eq!(f.eval(&rat_int(4)), rat_int(11));
        assert_eq!(f.eval(&rat_int(-1)), rat_int(5));
        assert_eq!(f.eval(&rat_int(-3)), rat_int(7));
        assert_eq!(f.eval(&rat(5, 2)), rat(13, 2));
    }

    #[test]
    fn canonical_form_drops_false_kinks() {
        let f = PiecewiseLinearFn::new(
            rat_int(0),
            vec![rat_int(1)],
            vec![rat_int(2), rat_int(2)],
        );
        assert!(f.breakpoints().is_empty());
        assert_eq!(f, PiecewiseLinearFn::identity().scale(2));
    }

    #[test]
    fn addition_merges_kink_sets() {
        let f = pl(0, &[(0, 1)], &[(0, 1), (1, 1)]); // max(x, 0)
        let g = pl(0, &[(1, 1)], &[(0, 1), (1, 1)]); // max(x - 1, 0) shape
        let sum = f.add(&g);
        assert_eq!(sum.breakpoints(), &[rat_int(0), rat_int(1)]);
        assert_eq!(sum.slopes(), &[rat_int(0), rat_int(1), rat_int(2)]);
        assert_eq!(sum.eval(&rat_int(3)), rat_int(5));
    }

    #[test]
    fn max_finds_exact_crossings() {
        // 3x - 1 against -x: cross at 1/4.
        let f = PiecewiseLinearFn::new(rat_int(-1), vec![], vec![rat_int(3)]);
        let g = PiecewiseLinearFn::identity().scale(-1);
        let m = f.max(&g);
        assert_eq!(m.breakpoints(), &[rat(1, 4)]);
        assert_eq!(m.slopes(), &[rat_int(-1), rat_int(3)]);
        assert_eq!(m.eval(&rat(1, 4)), rat(-1, 4));
        assert_eq!(m.eval(&rat_int(-2)), rat_int(2));
        assert_eq!(m.eval(&rat_int(1)), rat_int(2));
    }

    #[test]
    fn max_of_touching_graphs_has_no_spurious_kinks() {
        // |x| touches 0 only at the origin; the envelope is |x| itself.
        let vee = PiecewiseLinearFn::identity().max(&PiecewiseLinearFn::identity().scale(-1));
        assert_eq!(vee.breakpoints(), &[rat_int(0)]);
        let m = vee.max(&PiecewiseLinearFn::constant(rat_int(0)));
        assert_eq!(m, vee);
    }

    #[test]
    fn max_handles_multiple_crossings() {
        // A vee against a constant: two crossings, at -2 and 2.
        let vee = PiecewiseLinearFn::identity().max(&PiecewiseLinearFn::identity().scale(-1));
        let m = vee.max(&PiecewiseLinearFn::constant(rat_int(2)));
        assert_eq!(m.breakpoints(), &[rat_int(-2), rat_int(2)]);
        assert_eq!(m.slopes(), &[rat_int(-1), rat_int(0), rat_int(1)]);
        assert_eq!(m.eval(&rat_int(0)), rat_int(2));
        assert_eq!(m.eval(&rat_int(-5)), rat_int(5));
    }

    #[test]
    fn one_sided_slopes_at_a_kink() {
        let vee = PiecewiseLinearFn::identity().max(&PiecewiseLinearFn::identity().scale(-1));
        assert_eq!(vee.slope_left(&rat_int(0)), &rat_int(-1));
        assert_eq!(vee.slope_right(&rat_int(0)), &rat_int(1));
        assert_eq!(vee.slope_left(&rat_int(3)), &rat_int(1));
        assert_eq!(vee.slope_right(&rat_int(3)), &rat_int(1));
    }

    #[test]
    fn nd_points_are_kinks_plus_the_lower_boundary() {
        assert!(PiecewiseLinearFn::constant(rat_int(2)).nd_points().is_empty());
        let id = PiecewiseLinearFn::identity().nd_points();
        assert!(id.minus_infinity && id.finite.is_empty());
        let hinge = PiecewiseLinearFn::identity()
            .max(&PiecewiseLinearFn::constant(rat_int(0)))
            .nd_points();
        assert!(!hinge.minus_infinity);
        assert_eq!(hinge.finite, vec![rat_int(0)]);
    }

    #[test]
    fn subtraction_is_pointwise() {
        let f = pl(0, &[(0, 1)], &[(0, 1), (1, 1)]); // max(x, 0)
        let d = f.sub(&PiecewiseLinearFn::identity());
        // max(x, 0) - x = max(0, -x).
        assert_eq!(d.eval(&rat_int(-4)), rat_int(4));
        assert_eq!(d.eval(&rat_int(4)), rat_int(0));
        assert_eq!(d.breakpoints(), &[rat_int(0)]);
    }
}
