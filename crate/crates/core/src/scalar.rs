//! Numeric backends for kernel evaluation.
//!
//! Every kernel is generic over [`Scalar`]. [`BigRational`] gives exact
//! probabilities when `q` is rational and is the only backend used by the
//! identity checks; `f64` exists for large Monte Carlo comparisons.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True for backends that represent every value exactly.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn from_count(n: &BigUint) -> Self;
    /// Integer power; negative exponents allowed for non-zero bases.
    fn powi(&self, e: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// `num/den` for rationals, shortest round-trip decimal for floats.
    fn render(&self) -> String;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_count(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }

    fn powi(&self, e: i64) -> Self {
        let e = i32::try_from(e).expect("exponent out of i32 range");
        self.pow(e)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_count(n: &BigUint) -> Self {
        ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY)
    }

    fn powi(&self, e: i64) -> Self {
        f64::powi(*self, e as i32)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

/// Always `num/den`, including `0/1` and `1/1`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den`, an integer, or a decimal string such as `0.125` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s:?}: zero denominator")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let neg = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("{s:?} is not a number")));
    }
    let mut n = BigInt::from_str(&digits).map_err(|e| Error::Parse(e.to_string()))?;
    if neg {
        n = -n;
    }
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(n, d))
}

/// A value of `q` as given by a user: `num/den` selects exact arithmetic,
/// a decimal selects floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum QValue {
    Exact(BigRational),
    Float(f64),
}

impl QValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            QValue::Exact(r) => Scalar::to_f64(r),
            QValue::Float(x) => *x,
        }
    }

    /// Exact value; decimals are converted digit-for-digit.
    pub fn to_exact(&self) -> Result<BigRational> {
        match self {
            QValue::Exact(r) => Ok(r.clone()),
            QValue::Float(x) => parse_rational(&format!("{x}")),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, QValue::Exact(_))
    }
}

impl FromStr for QValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains('/') {
            Ok(QValue::Exact(parse_rational(s)?))
        } else {
            s.trim()
                .parse::<f64>()
                .map(QValue::Float)
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        }
    }
}

impl std::fmt::Display for QValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QValue::Exact(r) => f.write_str(&format_rational(r)),
            QValue::Float(x) => write!(f, "{x}"),
        }
    }
}

/// The jump parameter `q ∈ (0,1)` together with the two derived constants
/// every kernel needs.
#[derive(Clone, Debug)]
pub struct JumpParam<S> {
    q: S,
    one_minus_q: S,
    one_plus_q: S,
}

impl<S: Scalar> JumpParam<S> {
    pub fn new(q: S) -> Result<Self> {
        if !(q > S::zero() && q < S::one()) {
            return Err(Error::Contract(format!("q must lie in (0,1), got {}", q.render())));
        }
        Ok(JumpParam {
            one_minus_q: S::one() - q.clone(),
            one_plus_q: S::one() + q.clone(),
            q,
        })
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn one_minus_q(&self) -> &S {
        &self.one_minus_q
    }

    pub fn one_plus_q(&self) -> &S {
        &self.one_plus_q
    }

    /// `q^e`.
    pub fn pow(&self, e: i64) -> S {
        self.q.powi(e)
    }

    pub fn to_f64(&self) -> JumpParam<f64> {
        JumpParam::new(self.q.to_f64()).expect("q in (0,1) stays in (0,1)")
    }
}

impl JumpParam<BigRational> {
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        JumpParam::new(BigRational::new(num.into(), den.into()))
    }
}

/// Shorthand for an exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn q_value_mode_follows_syntax() {
        assert!("2/3".parse::<QValue>().unwrap().is_exact());
        assert!(!"0.5".parse::<QValue>().unwrap().is_exact());
        assert_eq!("0.5".parse::<QValue>().unwrap().to_exact().unwrap(), ratio(1, 2));
    }

    #[test]
    fn jump_param_rejects_out_of_range() {
        assert!(JumpParam::new(ratio(0, 1)).is_err());
        assert!(JumpParam::new(ratio(1, 1)).is_err());
        assert!(JumpParam::new(1.5_f64).is_err());
        let q = JumpParam::exact(1, 3).unwrap();
        assert_eq!(q.pow(-2), ratio(9, 1));
        assert_eq!(q.one_plus_q().clone(), ratio(4, 3));
    }

    #[test]
    fn renders_zero_as_fraction() {
        assert_eq!(format_rational(&BigRational::zero()), "0/1");
    }
}
