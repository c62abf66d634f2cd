//! Scalar values that are either exact rationals or floats, and the small
//! numeric trait the solvers and matchers are generic over.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Absolute tolerance for sign tests on the float path.
pub const FLOAT_TOL: f64 = 1e-10;

/// The edge-weighted scaling constant `2√2 − 2`, as the nearest double.
pub const C_EDGE: f64 = 0.828_427_124_746_190_1;

/// Interval known to contain `2√2 − 2`.
pub const C_EDGE_LO: f64 = 0.828_427_124_746_19;
pub const C_EDGE_HI: f64 = 0.828_427_124_746_190_4;

/// Arithmetic over either `f64` (with tolerance) or exact rationals.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    const EXACT: bool;

    /// Strictly positive beyond the tolerance of the representation.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond the tolerance of the representation.
    fn is_neg(&self) -> bool;
    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn to_f64(&self) -> f64;
    /// Converts a scalar; `None` when an inexact scalar meets an exact field.
    fn from_scalar(s: &Scalar) -> Option<Self>;
    fn into_scalar(self) -> Scalar;
    fn from_int(v: i64) -> Self;
}

impl Field for f64 {
    const EXACT: bool = false;

    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        Some(s.to_f64())
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Field for Rational {
    const EXACT: bool = true;

    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Exact(q) => Some(q.clone()),
            Scalar::Float(_) => None,
        }
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(q) {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator and denominator: scale both down first.
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
    let n = q.numer() >> shift;
    let d = q.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A number in an instance or solution: exact when the data allows it.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one())
    }

    pub fn int(v: i64) -> Self {
        Scalar::Exact(Rational::from_int(v))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::Exact(ratio(n, d))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Float(v) => *v < 0.0,
        }
    }

    /// Exact decimal value of the shortest round-trip representation of `v`.
    ///
    /// `0.1` becomes `1/10`, not the binary expansion of the double.
    pub fn from_decimal_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        parse_decimal(&format!("{v}")).map(Scalar::Exact)
    }

    /// Text for a plain JSON number when the value survives the trip through
    /// `f64` unchanged; `None` means the value needs a fraction.
    pub fn decimal_f64(&self) -> Option<f64> {
        match self {
            Scalar::Float(v) => Some(*v),
            Scalar::Exact(q) => {
                let v = rational_to_f64(q);
                match Scalar::from_decimal_f64(v) {
                    Some(Scalar::Exact(back)) if &back == q => Some(v),
                    _ => None,
                }
            }
        }
    }

    /// Numerator and denominator when they fit in `i64`.
    pub fn as_i64_fraction(&self) -> Option<(i64, i64)> {
        let q = self.as_exact()?;
        Some((q.numer().to_i64()?, q.denom().to_i64()?))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

/// Parses `[-]digits[.digits][e[+-]digits]` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Exact element `a + b√2` of the field `Q(√2)`. The representation is
/// unique because √2 is irrational, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSqrt2 {
    pub a: Rational,
    pub b: Rational,
}

impl QuadSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero() }
    }

    /// `2√2 − 2`.
    pub fn edge_constant() -> Self {
        Self::new(Rational::from_int(-2), Rational::from_int(2))
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sign = |q: &Rational| {
            if q.is_positive() {
                1
            } else if q.is_negative() {
                -1
            } else {
                0
            }
        };
        let (sa, sb) = (sign(&self.a), sign(&self.b));
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // Opposite signs: the larger of a² and 2b² decides.
        if &self.a * &self.a > Rational::from_int(2) * &self.b * &self.b {
            sa
        } else {
            sb
        }
    }

    fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone())
    }

    /// `a² − 2b²`, the product with the conjugate.
    fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_int(2) * &self.b * &self.b
    }
}

impl fmt::Display for QuadSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = |v: &Rational| Scalar::Exact(v.clone()).to_string();
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", q(&self.a)),
            (true, false) => write!(f, "{}*sqrt2", q(&self.b)),
            (false, false) if self.b.is_negative() => write!(f, "{}-{}*sqrt2", q(&self.a), q(&-self.b.clone())),
            (false, false) => write!(f, "{}+{}*sqrt2", q(&self.a), q(&self.b)),
        }
    }
}

impl PartialOrd for QuadSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some((self.clone() - other.clone()).signum().cmp(&0))
    }
}

impl Add for QuadSqrt2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for QuadSqrt2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for QuadSqrt2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = Rational::from_int(2);
        Self::new(
            &self.a * &rhs.a + two * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Div for QuadSqrt2 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let norm = rhs.norm();
        let top = self * rhs.conjugate();
        Self::new(top.a / &norm, top.b / norm)
    }
}

impl Neg for QuadSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Zero for QuadSqrt2 {
    fn zero() -> Self {
        Self::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadSqrt2 {
    fn one() -> Self {
        Self::rational(Rational::one())
    }
}

impl Field for QuadSqrt2 {
    const EXACT: bool = true;

    fn is_pos(&self) -> bool {
        self.signum() > 0
    }
    fn is_neg(&self) -> bool {
        self.signum() < 0
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * std::f64::consts::SQRT_2
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        s.as_exact().map(|q| Self::rational(q.clone()))
    }
    /// Rational elements stay exact; others fall back to the nearest float.
    fn into_scalar(self) -> Scalar {
        if self.b.is_zero() {
            Scalar::Exact(self.a)
        } else {
            Scalar::Float(self.to_f64())
        }
    }
    fn from_int(v: i64) -> Self {
        Self::rational(Rational::from_int(v))
    }
}
