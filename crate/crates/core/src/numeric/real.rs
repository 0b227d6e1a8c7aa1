//! Software binary floating point with explicit, caller-chosen precision.
//!
//! A [`HighPrecReal`] is `mantissa * 2^exp` with an arbitrary-precision
//! integer mantissa kept to at most `precision` significant bits. The type
//! exists for one purpose: the eigenvalue-based interpolation mode, which
//! needs square roots and therefore cannot stay inside the rationals.
//!
//! Invariants:
//! * precision is at least [`MIN_PRECISION`] bits (constructors clamp);
//! * the result of a binary operation carries the maximum of the operand
//!   precisions — arithmetic never silently reduces precision;
//! * comparisons are exact on the represented values, independent of
//!   precision;
//! * the representation is canonical (trailing zero bits stripped, zero is
//!   `0 * 2^0`), so equal values compare equal structurally as well.
//!
//! Each operation rounds once, to nearest (ties away from zero), except
//! `sqrt` and the decimal formatter which truncate; either way the result is
//! within one unit in the last place at the working precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Smallest precision this type will operate at.
pub const MIN_PRECISION: u32 = 64;

/// Arbitrary-precision dyadic float: `mantissa * 2^exp` at `precision` bits.
#[derive(Debug, Clone)]
pub struct HighPrecReal {
    mantissa: BigInt,
    exp: i64,
    precision: u32,
}

impl HighPrecReal {
    // ---- Constructors ----

    pub fn zero(precision: u32) -> Self {
        Self {
            mantissa: BigInt::zero(),
            exp: 0,
            precision: precision.max(MIN_PRECISION),
        }
    }

    pub fn one(precision: u32) -> Self {
        Self::from_i64(1, precision)
    }

    /// Exact power of two `2^e`.
    pub fn pow2(e: i64, precision: u32) -> Self {
        Self::from_parts(BigInt::one(), e, precision)
    }

    pub fn from_i64(v: i64, precision: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, precision)
    }

    pub fn from_bigint(v: BigInt, precision: u32) -> Self {
        Self::from_parts(v, 0, precision)
    }

    /// Round a rational to the working precision.
    pub fn from_rational(r: &Rational, precision: u32) -> Self {
        let precision = precision.max(MIN_PRECISION);
        if r.is_zero() {
            return Self::zero(precision);
        }
        let n = r.numer();
        let d = r.denom(); // positive by canonicity
        let bits_n = n.magnitude().bits() as i64;
        let bits_d = d.magnitude().bits() as i64;
        let shift = precision as i64 + 2 + (bits_d - bits_n).max(0);
        let scaled = n << shift;
        let m = div_round_nearest(&scaled, d);
        Self::from_parts(m, -shift, precision)
    }

    /// Canonicalize: strip trailing zero bits, round to `precision` bits.
    fn from_parts(mantissa: BigInt, exp: i64, precision: u32) -> Self {
        let precision = precision.max(MIN_PRECISION);
        let (mantissa, exp) = round_mantissa(mantissa, exp, precision);
        Self {
            mantissa,
            exp,
            precision,
        }
    }

    // ---- Accessors ----

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Position of the leading bit: `floor(log2 |x|) + 1`, `None` for zero.
    /// Cheap magnitude probe for conditioning estimates.
    pub fn log2_magnitude(&self) -> Option<i64> {
        if self.mantissa.is_zero() {
            return None;
        }
        Some(self.mantissa.magnitude().bits() as i64 + self.exp)
    }

    /// Exact rational value of the representation.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mantissa << self.exp)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exp))
        }
    }

    /// Smallest `k` with `|self| < 2^k`, or `None` for zero.
    pub fn mag2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mantissa.magnitude().bits() as i64)
        }
    }

    /// Best-effort `f64` approximation (diagnostics only).
    pub fn to_f64(&self) -> f64 {
        let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi(self.exp.clamp(-2000, 2000) as i32)
    }

    /// Re-round to a (possibly different) precision.
    pub fn with_precision(&self, precision: u32) -> Self {
        Self::from_parts(self.mantissa.clone(), self.exp, precision)
    }

    // ---- Arithmetic ----

    pub fn neg(&self) -> Self {
        Self {
            mantissa: -self.mantissa.clone(),
            exp: self.exp,
            precision: self.precision,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exp: self.exp,
            precision: self.precision,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let precision = self.precision.max(other.precision);
        if self.is_zero() {
            return other.with_precision(precision);
        }
        if other.is_zero() {
            return self.with_precision(precision);
        }
        let mag_a = self.mag2().unwrap();
        let mag_b = other.mag2().unwrap();
        // A term more than precision+8 binary orders below the other only
        // perturbs the last bit; skip the (possibly enormous) exact shift.
        let guard = precision as i64 + 8;
        if mag_a - mag_b > guard {
            return self.with_precision(precision);
        }
        if mag_b - mag_a > guard {
            return other.with_precision(precision);
        }
        let e = self.exp.min(other.exp);
        let m = (&self.mantissa << (self.exp - e)) + (&other.mantissa << (other.exp - e));
        Self::from_parts(m, e, precision)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let precision = self.precision.max(other.precision);
        Self::from_parts(
            &self.mantissa * &other.mantissa,
            self.exp + other.exp,
            precision,
        )
    }

    /// Division; panics on a zero divisor (callers check first).
    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero HighPrecReal");
        let precision = self.precision.max(other.precision);
        if self.is_zero() {
            return Self::zero(precision);
        }
        let bits_a = self.mantissa.magnitude().bits() as i64;
        let bits_b = other.mantissa.magnitude().bits() as i64;
        let shift = precision as i64 + 2 + (bits_b - bits_a).max(0);
        let scaled = &self.mantissa << shift;
        let q = div_round_nearest(&scaled, &other.mantissa);
        Self::from_parts(q, self.exp - other.exp - shift, precision)
    }

    /// Truncated square root; panics on negative input (callers check first).
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative HighPrecReal");
        if self.is_zero() {
            return self.clone();
        }
        let bits = self.mantissa.magnitude().bits() as i64;
        let mut shift = (2 * (self.precision as i64 + 2) - bits).max(0);
        if (self.exp - shift) & 1 != 0 {
            shift += 1;
        }
        let scaled: BigInt = &self.mantissa << shift;
        let root = scaled.sqrt();
        Self::from_parts(root, (self.exp - shift) / 2, self.precision)
    }

    /// `self^k` by repeated squaring (`0^0 = 1`).
    pub fn powi(&self, k: u64) -> Self {
        let mut acc = Self::one(self.precision);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    // ---- Comparison ----

    /// Exact comparison of represented values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let sa = sign_i(&self.mantissa);
        let sb = sign_i(&other.mantissa);
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitude intervals first.
        let mag_a = self.mag2().unwrap();
        let mag_b = other.mag2().unwrap();
        if mag_a != mag_b {
            let by_mag = mag_a.cmp(&mag_b);
            return if sa > 0 { by_mag } else { by_mag.reverse() };
        }
        // Overlapping magnitude: exact aligned comparison. The shift here is
        // bounded by the mantissa widths because the magnitudes agree.
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - e);
        let b = &other.mantissa << (other.exp - e);
        a.cmp(&b)
    }

    /// Decimal string in scientific notation with `sig` significant digits
    /// (truncated toward zero). Exact integers print without an exponent.
    pub fn decimal_string(&self, sig: usize) -> String {
        decimal_of_rational(&self.to_rational(), sig.max(1))
    }
}

impl PartialEq for HighPrecReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl Eq for HighPrecReal {}

impl PartialOrd for HighPrecReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl Ord for HighPrecReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Display for HighPrecReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decimal_string(12))
    }
}

fn sign_i(v: &BigInt) -> i32 {
    match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Round-to-nearest (ties away from zero) integer division.
fn div_round_nearest(num: &BigInt, den: &BigInt) -> BigInt {
    let (neg, num_mag, den_mag) = match (num.is_negative(), den.is_negative()) {
        (false, false) => (false, num.clone(), den.clone()),
        (true, true) => (false, -num, -den),
        (true, false) => (true, -num, den.clone()),
        (false, true) => (true, num.clone(), -den),
    };
    let (q, r) = num_mag.div_rem(&den_mag);
    let q = if &r * 2 >= den_mag { q + 1 } else { q };
    if neg {
        -q
    } else {
        q
    }
}

/// Round a mantissa down to `precision` bits and strip trailing zeros.
fn round_mantissa(mut m: BigInt, mut e: i64, precision: u32) -> (BigInt, i64) {
    if m.is_zero() {
        return (m, 0);
    }
    let bits = m.magnitude().bits();
    if bits > precision as u64 {
        let shift = bits - precision as u64;
        let neg = m.is_negative();
        let mut mag = m.abs();
        let half = BigInt::one() << (shift - 1);
        mag = (mag + half) >> shift;
        m = if neg { -mag } else { mag };
        e += shift as i64;
    }
    if let Some(tz) = m.trailing_zeros() {
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
    }
    (m, e)
}

/// `sig` significant decimal digits of a rational, scientific notation,
/// truncated toward zero. Integers that fit in `sig` digits print exactly.
fn decimal_of_rational(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().clone();
    if d.is_one() && n.to_string().len() <= sig {
        return r.numer().to_string();
    }
    // e10 = floor(log10(n/d)), found by digit counts then corrected.
    let mut e10 = n.to_string().len() as i64 - d.to_string().len() as i64;
    let ten = BigInt::from(10);
    let lo = num_traits::pow(ten.clone(), sig - 1);
    let hi = &lo * &ten;
    loop {
        let shift = sig as i64 - 1 - e10;
        let scaled = if shift >= 0 {
            (&n * num_traits::pow(ten.clone(), shift as usize)) / &d
        } else {
            &n / (&d * num_traits::pow(ten.clone(), (-shift) as usize))
        };
        if scaled < lo {
            e10 -= 1;
        } else if scaled >= hi {
            e10 += 1;
        } else {
            let digits = scaled.to_string();
            let (head, tail) = digits.split_at(1);
            let sign = if neg { "-" } else { "" };
            return format!("{sign}{head}.{tail}e{e10}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rat_int};

    fn hp(v: i64) -> HighPrecReal {
        HighPrecReal::from_i64(v, 128)
    }

    #[test]
    fn integer_arithmetic_is_exact() {
        let a = hp(6);
        let b = hp(7);
        assert_eq!(a.mul(&b), hp(42));
        assert_eq!(a.add(&b), hp(13));
        assert_eq!(a.sub(&b), hp(-1));
        assert_eq!(hp(42).div(&a), b);
    }

    #[test]
    fn precision_never_shrinks() {
        let a = HighPrecReal::from_i64(3, 64);
        let b = HighPrecReal::from_i64(5, 256);
        assert_eq!(a.mul(&b).precision(), 256);
        assert_eq!(b.add(&a).precision(), 256);
        assert_eq!(a.div(&b).precision(), 256);
    }

    #[test]
    fn precision_clamps_to_minimum() {
        let a = HighPrecReal::from_i64(3, 8);
        assert_eq!(a.precision(), MIN_PRECISION);
    }

    #[test]
    fn from_rational_error_is_bounded() {
        let r = rat(1, 3);
        let x = HighPrecReal::from_rational(&r, 128);
        let err = (x.to_rational() - r).abs();
        // relative error <= 2^-128 means absolute error <= 2^-128 here
        let bound = rat_int(1) / rat_pow2(128);
        assert!(err <= bound, "error {err} too large");
    }

    fn rat_pow2(k: u32) -> crate::numeric::Rational {
        crate::numeric::rat_pow(&rat_int(2), k as u64)
    }

    #[test]
    fn sqrt_squares_back() {
        let x = HighPrecReal::from_i64(2, 192).sqrt();
        let err = (x.mul(&x).to_rational() - rat_int(2)).abs();
        assert!(err <= rat_int(4) / rat_pow2(190));
        assert_eq!(HighPrecReal::from_i64(49, 64).sqrt(), hp(7));
        assert!(HighPrecReal::zero(64).sqrt().is_zero());
    }

    #[test]
    fn comparison_is_exact_across_precisions() {
        let a = HighPrecReal::from_rational(&rat(1, 3), 64);
        let b = HighPrecReal::from_rational(&rat(1, 3), 256);
        // Different roundings of 1/3 differ, and the comparison sees it.
        assert_ne!(a, b);
        let two_a = HighPrecReal::from_i64(2, 64);
        let two_b = HighPrecReal::from_i64(2, 512);
        assert_eq!(two_a, two_b);
        assert!(hp(-3) < hp(2));
        assert!(hp(3) > hp(2));
        // Same magnitude interval, different values.
        assert!(hp(5) < hp(6));
    }

    #[test]
    fn huge_exponent_gap_addition_keeps_dominant_term() {
        let big = HighPrecReal::pow2(10_000, 64);
        let tiny = HighPrecReal::pow2(-10_000, 64);
        assert_eq!(big.add(&tiny), big);
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = HighPrecReal::from_rational(&rat(3, 2), 128);
        let mut acc = HighPrecReal::one(128);
        for _ in 0..7 {
            acc = acc.mul(&x);
        }
        let err = acc.sub(&x.powi(7)).abs();
        assert!(err.to_rational() <= rat_int(1) / rat_pow2(100));
        assert_eq!(x.powi(0), HighPrecReal::one(128));
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(hp(0).decimal_string(10), "0");
        assert_eq!(hp(42).decimal_string(10), "42");
        assert_eq!(hp(-42).decimal_string(10), "-42");
        let third = HighPrecReal::from_rational(&rat(1, 3), 128);
        assert_eq!(third.decimal_string(6), "3.33333e-1");
        let big = HighPrecReal::from_i64(123456, 128);
        assert_eq!(big.decimal_string(3), "1.23e5");
        let neg = HighPrecReal::from_rational(&rat(-1, 8), 64);
        assert_eq!(neg.decimal_string(4), "-1.250e-1");
    }

    #[test]
    fn mag2_bounds_value() {
        let x = HighPrecReal::from_i64(5, 64); // 4 <= 5 < 8
        assert_eq!(x.mag2(), Some(3));
        assert_eq!(HighPrecReal::zero(64).mag2(), None);
    }
}
