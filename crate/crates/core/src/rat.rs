//! Exact rational numbers used throughout the crate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::ToPrimitive;

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// The rational `n`.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The rational `n / d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p` or `p/q` (optional leading sign, no whitespace).
pub fn parse_rat(s: &str) -> Option<Rat> {
    s.parse::<Rat>().ok()
}

/// Nearest `f64`; used only for diagnostics and plotting.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
