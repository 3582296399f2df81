use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use super::scalar::{Field, FieldError, Scalar};

/// Dense univariate polynomial; `coeffs[k]` multiplies `z^k`.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and `degree() == None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

fn common_field<'a, I: IntoIterator<Item = &'a Scalar>>(items: I) -> Result<Option<Field>, FieldError> {
    let mut field: Option<Field> = None;
    for c in items {
        let f = c.field();
        match &field {
            None => field = Some(f),
            Some(existing) if *existing == f => {}
            Some(existing) => {
                return Err(FieldError::IncompatibleField {
                    left: existing.clone(),
                    right: f,
                })
            }
        }
    }
    Ok(field)
}

impl Polynomial {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self, FieldError> {
        common_field(&coeffs)?;
        let mut p = Self { coeffs };
        p.trim();
        Ok(p)
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<Scalar>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_vec_unchecked(vec![c])
    }

    /// `c·z^k`
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut coeffs = vec![c.field().zero(); k];
        coeffs.push(c);
        Self::from_vec_unchecked(coeffs)
    }

    /// The variable `z` over `field`.
    pub fn z(field: &Field) -> Self {
        Self::monomial(field.one(), 1)
    }

    /// Build from rational pairs `(num, den)` in ascending order of power.
    pub fn from_ratios(field: &Field, coeffs: &[(i64, i64)]) -> Self {
        Self::from_vec_unchecked(coeffs.iter().map(|&(n, d)| field.from_ratio(n, d)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&Scalar> {
        self.coeffs.get(k)
    }

    /// Coefficient of `z^k` in `field` (zero past the degree).
    pub fn coeff_in(&self, k: usize, field: &Field) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// `None` for the zero polynomial.
    pub fn field(&self) -> Option<Field> {
        self.coeffs.first().map(Scalar::field)
    }

    fn check_compat(&self, other: &Self) -> Result<(), FieldError> {
        match (self.field(), other.field()) {
            (Some(a), Some(b)) if a != b => Err(FieldError::IncompatibleField { left: a, right: b }),
            _ => Ok(()),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_compat(other)?;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = c.try_add(s)?;
        }
        Ok(Self::from_vec_unchecked(coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_compat(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let field = self.field().unwrap_or(Field::Rational);
        let mut coeffs = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].try_add(&a.try_mul(b)?)?;
            }
        }
        Ok(Self::from_vec_unchecked(coeffs))
    }

    pub fn try_scale(&self, c: &Scalar) -> Result<Self, FieldError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_vec_unchecked(coeffs))
    }

    /// `order`-th formal derivative.
    pub fn derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= order {
            return Self::zero();
        }
        let field = self.field().unwrap_or(Field::Rational);
        let coeffs = (order..self.coeffs.len())
            .map(|k| {
                // k!/(k−order)!
                let falling: i64 = ((k - order + 1)..=k).map(|v| v as i64).product();
                &self.coeffs[k] * &field.from_int(falling)
            })
            .collect();
        Self::from_vec_unchecked(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        let mut acc = match self.field() {
            Some(f) => f.zero(),
            None => return Ok(x.field().zero()),
        };
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(x)?.try_add(c)?;
        }
        Ok(acc)
    }

    /// Evaluate the numeric embedding at a float point.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn to_float(&self) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(Scalar::to_float).collect())
    }

    /// Coefficient-wise Galois conjugate (quadratic fields only).
    pub fn conjugate(&self) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(Scalar::conjugate).collect())
    }

    /// Largest coefficient magnitude of the numeric embedding.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    /// Euclidean division; the divisor's leading coefficient must be invertible.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), FieldError> {
        self.check_compat(divisor)?;
        let lead = divisor.leading().ok_or(FieldError::DivisionByZero)?;
        let lead_inv = lead.try_inv()?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let field = lead.field();
        let mut quot = vec![field.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].try_mul(&lead_inv)?;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].try_sub(&c.try_mul(dc)?)?;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::from_vec_unchecked(quot), Self::from_vec_unchecked(rem)))
    }

    /// Division that must leave no remainder; otherwise `DivisionByZero`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, FieldError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(FieldError::DivisionByZero)
        }
    }
}

fn expect_field<T>(r: Result<T, FieldError>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => panic!("{e}"),
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics when the coefficient fields differ.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                expect_field(self.$try(rhs))
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                expect_field(self.$try(&rhs))
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::rat;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn difference_of_squares() {
        let a = Polynomial::from_ratios(&q(), &[(-1, 1), (1, 1)]);
        let b = Polynomial::from_ratios(&q(), &[(1, 1), (1, 1)]);
        assert_eq!(&a * &b, Polynomial::from_ratios(&q(), &[(-1, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn cancellation_gives_sentinel_degree() {
        let a = Polynomial::monomial(Scalar::int(1), 2);
        let s = &a + &(-&a);
        assert!(s.is_zero());
        assert_eq!(s.degree(), None);
    }

    #[test]
    fn rabi_leading_coefficient() {
        // (ωz − g)(ωz + g) at ω = 1, g = 1/2
        let a = Polynomial::from_ratios(&q(), &[(-1, 2), (1, 1)]);
        let b = Polynomial::from_ratios(&q(), &[(1, 2), (1, 1)]);
        assert_eq!(&a * &b, Polynomial::from_ratios(&q(), &[(-1, 4), (0, 1), (1, 1)]));
    }

    #[test]
    fn derivatives() {
        let z3 = Polynomial::monomial(Scalar::int(1), 3);
        assert_eq!(z3.derivative(1), Polynomial::monomial(Scalar::int(3), 2));
        assert!(Polynomial::z(&q()).derivative(2).is_zero());
        // 2g z + c0 with g = 1/2
        let p = Polynomial::from_ratios(&q(), &[(7, 3), (1, 1)]);
        assert_eq!(p.derivative(1), Polynomial::constant(Scalar::int(1)));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Polynomial::constant(Scalar::int(1));
        let b = Polynomial::constant(Scalar::Float(1.0));
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
        assert!(Polynomial::new(vec![Scalar::int(1), Scalar::Float(2.0)]).is_err());
    }

    #[test]
    fn division() {
        let p = Polynomial::from_ratios(&q(), &[(-1, 1), (0, 1), (1, 1)]);
        let d = Polynomial::from_ratios(&q(), &[(-1, 1), (1, 1)]);
        let (quot, rem) = p.div_rem(&d).unwrap();
        assert_eq!(quot, Polynomial::from_ratios(&q(), &[(1, 1), (1, 1)]));
        assert!(rem.is_zero());
        let (_, rem) = p.div_rem(&Polynomial::from_ratios(&q(), &[(0, 1), (2, 1)])).unwrap();
        assert_eq!(rem, Polynomial::constant(Scalar::int(-1)));
    }

    #[test]
    fn horner() {
        let p = Polynomial::from_ratios(&q(), &[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(p.eval(&Scalar::Rational(rat(1, 2))).unwrap(), Scalar::rational(11, 4));
        assert_eq!(p.eval_f64(0.5), 2.75);
    }
}
