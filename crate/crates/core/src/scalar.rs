//! Scalar abstractions shared by the numeric and exact layers.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Zero};

/// Floating point type used by the Minkowski primitives.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only for non-representable input.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used by the simplex solver. Exact for `BigRational`.
pub trait LpScalar: Clone + Num + Neg<Output = Self> + PartialOrd + Debug {
    fn is_pos(&self) -> bool {
        *self > Self::zero()
    }
    fn is_neg(&self) -> bool {
        *self < Self::zero()
    }
}

impl LpScalar for BigRational {}
impl LpScalar for f64 {
    fn is_pos(&self) -> bool {
        *self > 1e-12
    }
    fn is_neg(&self) -> bool {
        *self < -1e-12
    }
}

/// Shorthand for building an exact rational `p/q`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Lossy conversion of an exact rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    match r.to_f64() {
        Some(x) => x,
        None => {
            // numerator or denominator overflowed; scale down first
            let n = r.numer().to_f64().unwrap_or(f64::MAX);
            let d = r.denom().to_f64().unwrap_or(f64::MAX);
            n / d
        }
    }
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Formats a rational as `"p/q"` in lowest terms (`"p"` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Dyadic rational closest below `x` with the given number of bits.
pub fn dyadic(x: f64, bits: u32) -> BigRational {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).floor() as i64;
    BigRational::new(BigInt::from(n), BigInt::from(1i64 << bits))
}

