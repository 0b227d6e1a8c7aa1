//! Exact and high-precision scalar arithmetic.
//!
//! Everything downstream of this module computes with two scalar types:
//!
//! * [`Rational`] — arbitrary-precision rationals, always in lowest terms
//!   with positive denominator (the backing implementation canonicalizes on
//!   construction). All partition-function values, matrix entries, and
//!   recurrence coefficients are `Rational`; no floating point ever enters
//!   the exact evaluation path.
//! * [`HighPrecReal`] — a software binary float with explicit precision,
//!   used only by the eigenvalue-based interpolation mode. Operations never
//!   silently reduce precision below the operands' maximum.

pub mod eigen;
pub mod matrix;
pub mod real;
pub mod recurrence;
pub mod vandermonde;

pub use eigen::{sym_eigen, sym_eigen_hp, EigenDecomposition};
pub use matrix::RationalMatrix;
pub use real::HighPrecReal;
pub use recurrence::{extrapolate_back, min_recurrence, LinearRecurrence};
pub use vandermonde::{
    default_merge_tol, solve_vandermonde, vandermonde_condition_bits, VandermondeSolution,
};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, canonical (lowest terms, positive
/// denominator, zero is 0/1).
pub type Rational = num_rational::BigRational;

/// Rational from a machine integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `num/den`; panics on zero denominator (programmer error).
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p"` or `"p/q"` with optional sign, reducing to lowest terms.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = |t: &str| Error::Contract(format!("cannot parse rational from {t:?}"));
    match text.split_once('/') {
        None => {
            let n: BigInt = text.parse().map_err(|_| bad(text))?;
            Ok(Rational::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad(text))?;
            let q: BigInt = q.trim().parse().map_err(|_| bad(text))?;
            if q.is_zero() {
                return Err(bad(text));
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r^k` for a nonnegative machine exponent (0^0 = 1).
pub fn rat_pow(r: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut base = r.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// |r| as a fresh value.
pub fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "22/7", "-22/7", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_reduces_to_lowest_terms() {
        let r = parse_rational("6/4").unwrap();
        assert_eq!(format_rational(&r), "3/2");
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        let r = parse_rational("0/5").unwrap();
        assert_eq!(format_rational(&r), "0");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn pow_small_cases() {
        assert_eq!(rat_pow(&rat(2, 3), 0), rat_int(1));
        assert_eq!(rat_pow(&rat(2, 3), 3), rat(8, 27));
        assert_eq!(rat_pow(&rat_int(0), 0), rat_int(1));
        assert_eq!(rat_pow(&rat_int(-2), 5), rat_int(-32));
    }
}
