//! Scalar backends and exact sixth-root-of-unity arithmetic.
//!
//! Everything downstream is generic over [`Scalar`], implemented here for
//! [`BigRational`] (exact) and `f64`/`f32` (floating point). The exact
//! backend is what turns formula checks into machine-checked identities:
//! wherever two routes to the same quantity exist, the rational backend must
//! agree bit-for-bit, while the float backends agree to a relative tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default relative tolerance for float-backend comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty numeric literal")]
    Empty,
    #[error("malformed numeric literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("non-finite value `{0}` rejected")]
    NonFinite(String),
}

/// Numeric backend for orbits, coefficients, and closed-form values.
///
/// `Signed` brings the field operations, `abs`, and zero/one constants from
/// `num-traits`; the rest is the small surface the algorithms need to stay
/// backend-agnostic: an exactness marker, tolerance-aware equality, overflow
/// detection, and parsing/formatting for the CLI layer.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Signed + FromPrimitive + ToPrimitive
{
    /// Whether arithmetic in this backend is exact (no rounding).
    const EXACT: bool;
    /// Backend name used in reports.
    const BACKEND: &'static str;

    /// Equality up to `rel_tol`. Exact backends ignore the tolerance and
    /// compare exactly; float backends compare `|a - b| <= rel_tol * max(|a|, |b|)`.
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool;

    /// False when an operation overflowed or produced NaN. Always true for
    /// exact backends.
    fn is_finite_value(&self) -> bool;

    /// Parse from the textual forms accepted on the command line:
    /// `p/q`, integers, decimals (`0.2` is exact in the rational backend),
    /// and scientific notation.
    fn parse_str(s: &str) -> Result<Self, ParseScalarError>;

    /// Round-trippable textual form: `p/q` for rationals, 17 significant
    /// digits for floats.
    fn display_full(&self) -> String;

    /// Best-effort `f64` view for diagnostics and fitting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("i64 embeds in every scalar backend")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "rational";

    fn approx_eq(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn parse_str(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s)
    }

    fn display_full(&self) -> String {
        self.to_string()
    }
}

macro_rules! impl_scalar_float {
    ($t:ty, $name:literal, $round_trip_prec:literal) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const BACKEND: &'static str = $name;

            fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
                if self == other {
                    return true;
                }
                let diff = (self - other).abs() as f64;
                let scale = (self.abs() as f64).max(other.abs() as f64);
                diff <= rel_tol * scale
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn parse_str(s: &str) -> Result<Self, ParseScalarError> {
                let t = s.trim();
                if t.is_empty() {
                    return Err(ParseScalarError::Empty);
                }
                // accept p/q in float mode too
                if let Some((num, den)) = t.split_once('/') {
                    let n: $t = num
                        .trim()
                        .parse()
                        .map_err(|_| ParseScalarError::Malformed(t.to_string()))?;
                    let d: $t = den
                        .trim()
                        .parse()
                        .map_err(|_| ParseScalarError::Malformed(t.to_string()))?;
                    if d == 0.0 {
                        return Err(ParseScalarError::ZeroDenominator(t.to_string()));
                    }
                    let v = n / d;
                    if !v.is_finite() {
                        return Err(ParseScalarError::NonFinite(t.to_string()));
                    }
                    return Ok(v);
                }
                let v: $t = t
                    .parse()
                    .map_err(|_| ParseScalarError::Malformed(t.to_string()))?;
                if !v.is_finite() {
                    return Err(ParseScalarError::NonFinite(t.to_string()));
                }
                Ok(v)
            }

            fn display_full(&self) -> String {
                // one more significant digit than DIGITS guarantees an exact
                // round trip (17 for f64, 9 for f32)
                format!("{:.*e}", $round_trip_prec, self)
            }
        }
    };
}

impl_scalar_float!(f64, "float64", 16);
impl_scalar_float!(f32, "float32", 8);

/// Exact rational from `p/q`, integer, decimal, or scientific notation.
/// `0.2` parses to `1/5` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseScalarError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|_| ParseScalarError::Malformed(t.to_string()))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|_| ParseScalarError::Malformed(t.to_string()))?;
        if d.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(t.to_string()));
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(t).ok_or_else(|| ParseScalarError::Malformed(t.to_string()))
}

/// `[+-]digits[.digits][eE[+-]digits]` as an exact rational.
fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e).ok()?),
        None => (t, 0i64),
    };
    let (sign, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: String = [int_part, frac_part].concat();
    let mut numer = BigInt::from_str(&digits).ok()? * BigInt::from(sign);
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut denom = BigInt::one();
    if scale >= 0 {
        numer *= ten.pow(scale as u32);
    } else {
        denom = ten.pow(-scale as u32);
    }
    Some(BigRational::new(numer, denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked exact arithmetic on canonical rationals. Results are canonical
/// (reduced, positive denominator) by construction.
pub fn rational_arith(
    lhs: &BigRational,
    op: ArithOp,
    rhs: &BigRational,
) -> Result<BigRational, NumericError> {
    match op {
        ArithOp::Add => Ok(lhs + rhs),
        ArithOp::Sub => Ok(lhs - rhs),
        ArithOp::Mul => Ok(lhs * rhs),
        ArithOp::Div => {
            if rhs.is_zero() {
                Err(NumericError::DivisionByZero)
            } else {
                Ok(lhs / rhs)
            }
        }
    }
}

/// sqrt(3)/2, correctly rounded.
const SQRT3_HALF: f64 = 0.866_025_403_784_438_6;

/// The six exact values of `beta^n`, `beta = exp(i*pi/3)`, indexed by `n mod 6`.
const BETA_TABLE: [(f64, f64); 6] = [
    (1.0, 0.0),
    (0.5, SQRT3_HALF),
    (-0.5, SQRT3_HALF),
    (-1.0, 0.0),
    (-0.5, -SQRT3_HALF),
    (0.5, -SQRT3_HALF),
];

/// `beta^n = exp(n*i*pi/3)` by table lookup, exact up to float rounding of
/// sqrt(3)/2. Negative exponents wrap; no drift accumulates for large `n`.
pub fn beta_power(n: i64) -> Complex64 {
    let (re, im) = BETA_TABLE[n.rem_euclid(6) as usize];
    Complex64::new(re, im)
}
