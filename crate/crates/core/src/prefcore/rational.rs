//! Exact rational arithmetic. Every real-valued quantity in the math core
//! (the endowment, peaks, allotments, water-filling levels, individual
//! endowments) is a [`Rational`]; nothing is ever rounded.

use alloc::string::String;
use alloc::string::ToString;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator. Parsing and display use the `num/den` form with the
/// `/1` suffix elided (`"3/4"`, `"-2"`, `"0"`).
pub type Rational = num_rational::BigRational;

/// Shorthand for `num/den` from machine integers.
///
/// Panics when `den == 0`; use [`parse_rational`] for untrusted input.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A whole rational.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Error for a malformed or zero-denominator rational literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalParseError {
    input: String,
}

impl RationalParseError {
    pub fn input(&self) -> &str {
        &self.input
    }
}

impl fmt::Display for RationalParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal `{}`", self.input)
    }
}

/// Parses a `"num/den"` or `"num"` literal into a [`Rational`].
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let trimmed = s.trim();
    let err = || RationalParseError {
        input: s.to_string(),
    };
    match trimmed.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| err())?;
            let den: BigInt = den.trim().parse().map_err(|_| err())?;
            if den.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(num, den))
        }
        None => {
            let num: BigInt = trimmed.parse().map_err(|_| err())?;
            Ok(Rational::from_integer(num))
        }
    }
}

/// Canonical `num/den` rendering (integers without the `/1` suffix).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        let mut s = r.numer().to_string();
        s.push('/');
        s.push_str(&r.denom().to_string());
        s
    }
}

/// True when `r` lies in the closed interval `[lo, hi]`.
pub fn in_closed_interval(r: &Rational, lo: &Rational, hi: &Rational) -> bool {
    r >= lo && r <= hi
}

/// True when `r` is strictly positive.
pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}
