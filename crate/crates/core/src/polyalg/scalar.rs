//! Exact and floating scalar fields.
//!
//! A [`Scalar`] is one of
//! * a reduced big-integer rational,
//! * an element `a + b·√d` of the quadratic extension `Q(√d)` for a rational `d`,
//! * an IEEE double (numeric path only).
//!
//! Values from different fields never mix silently: the fallible `try_*`
//! methods return [`FieldError::IncompatibleField`], and the operator impls
//! panic with the same message. Rationals are lifted explicitly with
//! [`Field::embed`].
//!
//! `√d` is treated as a formal symbol `s` with `s² = d`, so identities are
//! checked in `Q[s]/(s² − d)`. When `d` happens to be a rational square this
//! ring has zero divisors; inverting one reports [`FieldError::DivisionByZero`].

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero (or by a zero divisor)")]
    DivisionByZero,
    #[error("incompatible scalar fields: {left} vs {right}")]
    IncompatibleField { left: Field, right: Field },
}

/// The field a [`Scalar`] lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// `Q(√d)`, identified by its discriminant.
    Quad(BigRational),
    Float,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Quad(d) => write!(f, "Q(√({d}))"),
            Field::Float => write!(f, "f64"),
        }
    }
}

impl Field {
    pub fn zero(&self) -> Scalar {
        self.from_rational(BigRational::zero())
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Scalar {
        self.from_rational(rat(num, den))
    }

    pub fn from_rational(&self, r: BigRational) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(r),
            Field::Quad(d) => Scalar::Quad(QuadExt::new(r, BigRational::zero(), d.clone())),
            Field::Float => Scalar::Float(rational_to_f64(&r)),
        }
    }

    /// Lift `x` into this field. Rationals embed everywhere; anything else
    /// must already belong to this field.
    pub fn embed(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        match x {
            Scalar::Rational(r) => Ok(self.from_rational(r.clone())),
            other if other.field() == *self => Ok(other.clone()),
            other => Err(FieldError::IncompatibleField {
                left: other.field(),
                right: self.clone(),
            }),
        }
    }

    /// The generator `√d` of a quadratic field, or `sqrt(d)` on the float path.
    pub fn sqrt_generator(&self) -> Option<Scalar> {
        match self {
            Field::Quad(d) => Some(Scalar::Quad(QuadExt::new(
                BigRational::zero(),
                BigRational::one(),
                d.clone(),
            ))),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Field::Float)
    }
}

/// `a + b·√d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    d: BigRational,
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, d: BigRational) -> Self {
        Self { a, b, d }
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn d(&self) -> &BigRational {
        &self.d
    }

    /// `a² − b²d`
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * &self.d
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.d.clone())
    }

    fn same_d(&self, other: &Self) -> Result<(), FieldError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(FieldError::IncompatibleField {
                left: Field::Quad(self.d.clone()),
                right: Field::Quad(other.d.clone()),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Quad(QuadExt),
    Float(f64),
}

/// Scalar field operations addressed by tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

/// Apply `op` to `x` (and `y` for the binary operations; unary ones ignore it).
pub fn scalar_field_op(op: FieldOp, x: &Scalar, y: &Scalar) -> Result<Scalar, FieldError> {
    match op {
        FieldOp::Add => x.try_add(y),
        FieldOp::Sub => x.try_sub(y),
        FieldOp::Mul => x.try_mul(y),
        FieldOp::Div => x.try_div(y),
        FieldOp::Neg => Ok(-x),
        FieldOp::Inv => x.try_inv(),
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar {
    pub fn rational(num: i64, den: i64) -> Self {
        Scalar::Rational(rat(num, den))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn quad(a: BigRational, b: BigRational, d: BigRational) -> Self {
        Scalar::Quad(QuadExt::new(a, b, d))
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Quad(q) => Field::Quad(q.d.clone()),
            Scalar::Float(_) => Field::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Quad(q) => q.a.is_zero() && q.b.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Quad(q) => q.a.is_one() && q.b.is_zero(),
            Scalar::Float(x) => *x == 1.0,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Rational value when the scalar has no irrational part.
    pub fn rational_part_if_pure(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Quad(q) if q.b.is_zero() => Some(q.a.clone()),
            _ => None,
        }
    }

    /// Rational value of `a + b√d` when `b = 0` or `d` is a rational square
    /// (positive root).
    pub fn rational_value(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Quad(q) if q.b.is_zero() => Some(q.a.clone()),
            Scalar::Quad(q) => rational_sqrt(&q.d).map(|s| &q.a + &q.b * s),
            Scalar::Float(_) => None,
        }
    }

    /// Numeric value, taking `√d` as the positive root.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => rational_to_f64(r),
            Scalar::Quad(q) => {
                rational_to_f64(&q.a) + rational_to_f64(&q.b) * Float::sqrt(rational_to_f64(&q.d))
            }
            Scalar::Float(x) => *x,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Galois conjugate `a − b√d`; identity on the other fields.
    pub fn conjugate(&self) -> Scalar {
        match self {
            Scalar::Quad(q) => Scalar::Quad(q.conjugate()),
            other => other.clone(),
        }
    }

    fn incompatible(&self, other: &Scalar) -> FieldError {
        FieldError::IncompatibleField {
            left: self.field(),
            right: other.field(),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(Scalar::Rational(x + y)),
            (Scalar::Quad(x), Scalar::Quad(y)) => {
                x.same_d(y)?;
                Ok(Scalar::quad(&x.a + &y.a, &x.b + &y.b, x.d.clone()))
            }
            (Scalar::Float(x), Scalar::Float(y)) => Ok(Scalar::Float(x + y)),
            _ => Err(self.incompatible(other)),
        }
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(Scalar::Rational(x * y)),
            (Scalar::Quad(x), Scalar::Quad(y)) => {
                x.same_d(y)?;
                let a = &x.a * &y.a + &x.b * &y.b * &x.d;
                let b = &x.a * &y.b + &x.b * &y.a;
                Ok(Scalar::quad(a, b, x.d.clone()))
            }
            (Scalar::Float(x), Scalar::Float(y)) => Ok(Scalar::Float(x * y)),
            _ => Err(self.incompatible(other)),
        }
    }

    pub fn try_inv(&self) -> Result<Scalar, FieldError> {
        match self {
            Scalar::Rational(x) => {
                if x.is_zero() {
                    Err(FieldError::DivisionByZero)
                } else {
                    Ok(Scalar::Rational(x.recip()))
                }
            }
            Scalar::Quad(x) => {
                let norm = x.norm();
                if norm.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::quad(&x.a / &norm, -(&x.b / &norm), x.d.clone()))
            }
            Scalar::Float(x) => {
                if *x == 0.0 {
                    Err(FieldError::DivisionByZero)
                } else {
                    Ok(Scalar::Float(1.0 / x))
                }
            }
        }
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        if self.field() != other.field() {
            return Err(self.incompatible(other));
        }
        self.try_mul(&other.try_inv()?)
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        let mut acc = self.field().one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

fn expect_field<T>(r: Result<T, FieldError>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => panic!("{e}"),
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(x) => Scalar::Rational(-x.clone()),
            Scalar::Quad(x) => Scalar::quad(-x.a.clone(), -x.b.clone(), x.d.clone()),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            /// Panics if the operands live in different fields (or on division by zero).
            fn $method(self, rhs: &Scalar) -> Scalar {
                expect_field(self.$try(rhs))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                expect_field((&self).$try(&rhs))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                expect_field((&self).$try(rhs))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                expect_field(self.$try(&rhs))
            }
        }
    };
}

scalar_binop!(Add, add, try_add);
scalar_binop!(Sub, sub, try_sub);
scalar_binop!(Mul, mul, try_mul);
scalar_binop!(Div, div, try_div);

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: `3/4`, `-2`, `(-1/2)+(1/2)√(16/25)`, or the shortest
/// round-tripping decimal for floats.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => f.write_str(&fmt_rational(r)),
            Scalar::Quad(q) => write!(
                f,
                "({})+({})√({})",
                fmt_rational(&q.a),
                fmt_rational(&q.b),
                fmt_rational(&q.d)
            ),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as an exact number")]
pub struct ParseScalarError(pub String);

/// Parse `p/q`, an integer, or a finite decimal (`0.3`, `-1.25e-2`) into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseScalarError> {
    let err = || ParseScalarError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if neg { -value } else { value })
}

/// Format a rational canonically (`3/4`, `-2`).
pub fn format_rational(r: &BigRational) -> String {
    fmt_rational(r)
}

/// Exact square root of a nonnegative rational when both numerator and
/// denominator are perfect squares.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Best rational approximations of `x` (continued-fraction convergents) up
/// to denominator `max_den`.
pub fn convergents(x: f64, max_den: i64) -> alloc::vec::Vec<BigRational> {
    let mut out = alloc::vec::Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut v = x;
    let max_den = BigInt::from(max_den);
    for _ in 0..64 {
        let a = Float::floor(v);
        let ai = match BigInt::from_str(&format!("{a:.0}")) {
            Ok(ai) => ai,
            Err(_) => break,
        };
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = core::mem::replace(&mut h1, h2);
        k0 = core::mem::replace(&mut k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-300 {
            break;
        }
        v = 1.0 / frac;
        if !v.is_finite() {
            break;
        }
    }
    // keep gcd-normalised denominators positive
    out.iter_mut().for_each(|r| {
        let g = r.numer().gcd(r.denom());
        if !g.is_one() {
            *r = BigRational::new(r.numer() / &g, r.denom() / &g);
        }
    });
    out
}
