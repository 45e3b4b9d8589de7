//! Number types shared by every geometric routine.
//!
//! Two arithmetic modes are supported: exact arbitrary-precision rationals
//! and `f64` with tolerance-aware sign tests. Algorithms are written once,
//! generic over [`Scalar`], and the mode only changes how a sign is decided.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// Arithmetic mode of a [`Scalar`] type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// A field element usable by the polytope kernel.
///
/// Arithmetic takes the left operand by value and the right one by
/// reference, which lets `BigRational` avoid a clone per operation.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion for rationals (every finite `f64` is a dyadic rational).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Sign relative to zero; in float mode values with `|x| <= tol` count as zero.
    fn sign_tol(&self, tol: f64) -> Ordering;
    /// Total order used for lexicographic canonicalization.
    fn total_cmp(&self, other: &Self) -> Ordering;
    /// Bits needed to store numerator and denominator (0 in float mode).
    fn bit_size(&self) -> u64;

    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self>;

    fn abs(&self) -> Self {
        if self.sign_tol(0.0) == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.sign_tol(tol) == Ordering::Equal
    }

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self;
        }
        acc
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a.total_cmp(&b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a.total_cmp(&b) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn sign_tol(&self, _tol: f64) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_i64(i))
                } else {
                    Err(GeomError::Parse(format!(
                        "exact coordinates must be integers or fraction strings, got {n}"
                    )))
                }
            }
            other => Err(GeomError::Parse(format!("expected a fraction string, got {other}"))),
        }
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sign_tol(&self, tol: f64) -> Ordering {
        if f64::abs(*self) <= tol {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
    fn bit_size(&self) -> u64 {
        0
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| GeomError::Parse(format!("not a finite number: {n}"))),
            serde_json::Value::String(s) => parse_rational(s).map(|r| Scalar::to_f64(&r)),
            other => Err(GeomError::Parse(format!("expected a number, got {other}"))),
        }
    }
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || GeomError::Parse(format!("invalid rational literal {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(GeomError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Huge numerator/denominator: shift both down to keep the leading bits.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Binomial coefficient as a scalar.
pub fn binomial<S: Scalar>(n: u32, k: u32) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    let mut acc = S::one();
    for i in 0..k {
        acc = acc * &S::from_i64((n - i) as i64) / &S::from_i64((i + 1) as i64);
    }
    acc
}

/// `n!` as a scalar.
pub fn factorial<S: Scalar>(n: u32) -> S {
    (1..=n).fold(S::one(), |acc, i| acc * &S::from_i64(i as i64))
}

/// Converts a scalar between modes (exact conversion when the target is rational).
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    match (A::MODE, B::MODE) {
        (Mode::Exact, Mode::Exact) | (Mode::Float, Mode::Exact) => {
            B::from_json(&a.to_json()).unwrap_or_else(|_| B::from_f64(a.to_f64()))
        }
        _ => B::from_f64(a.to_f64()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("0.25").unwrap(), Rational::from_ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::from_ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), Rational::from_i64(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn canonical_fraction() {
        let r = Rational::from_ratio(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn float_sign_tolerance() {
        assert_eq!(1e-14f64.sign_tol(1e-12), Ordering::Equal);
        assert_eq!((-1e-10f64).sign_tol(1e-12), Ordering::Less);
        assert_eq!(Rational::from_ratio(1, 1_000_000_000).sign_tol(1.0), Ordering::Greater);
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial::<Rational>(4, 2), Rational::from_i64(6));
        assert_eq!(binomial::<Rational>(8, 4), Rational::from_i64(70));
        assert_eq!(binomial::<Rational>(3, 5), Rational::from_i64(0));
        assert_eq!(factorial::<Rational>(5), Rational::from_i64(120));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * BigInt::from(3), big);
        assert!((Scalar::to_f64(&r) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn float_to_exact_is_exact() {
        let r: Rational = convert(&0.1f64);
        assert_eq!(Scalar::to_f64(&r), 0.1);
        assert_ne!(r, Rational::from_ratio(1, 10));
    }
}
