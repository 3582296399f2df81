//! Linear differential operators with polynomial coefficients.
//!
//! An operator is kept in normal form `p₀(z) + p₁(z)·d + p₂(z)·d² + …`
//! (derivatives to the right), so equality is coefficient equality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;


use crate::polyalg::{Field, FieldError, Matrix, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiffOpError {
    #[error(transparent)]
    Field(#[from] FieldError),
    /// `L z^monomial` has degree `degree`, outside `span{1, …, z^n}`.
    #[error("operator maps z^{monomial} to degree {degree}, outside P_{{{bound}}}")]
    SpaceNotPreserved {
        monomial: usize,
        degree: usize,
        bound: usize,
    },
    #[error("not a Heun operator: {0}")]
    NotHeun(&'static str),
}

/// Relative size below which float coefficients past the invariant degree
/// are treated as rounding noise.
pub const FLOAT_SPACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearDiffOp {
    coeffs: Vec<Polynomial>,
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl LinearDiffOp {
    pub fn new(coeffs: Vec<Polynomial>) -> Result<Self, FieldError> {
        let mut field: Option<Field> = None;
        for p in &coeffs {
            if let Some(f) = p.field() {
                match &field {
                    Some(existing) if *existing != f => {
                        return Err(FieldError::IncompatibleField {
                            left: existing.clone(),
                            right: f,
                        })
                    }
                    _ => field = Some(f),
                }
            }
        }
        let mut op = Self { coeffs };
        op.trim();
        Ok(op)
    }

    fn from_vec_unchecked(coeffs: Vec<Polynomial>) -> Self {
        let mut op = Self { coeffs };
        op.trim();
        op
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Polynomial::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Multiplication by `p`.
    pub fn multiplication(p: Polynomial) -> Self {
        Self::from_vec_unchecked(vec![p])
    }

    pub fn scalar(c: Scalar) -> Self {
        Self::multiplication(Polynomial::constant(c))
    }

    /// `d^k/dz^k`
    pub fn derivative(field: &Field, k: usize) -> Self {
        let mut coeffs = vec![Polynomial::zero(); k];
        coeffs.push(Polynomial::constant(field.one()));
        Self::from_vec_unchecked(coeffs)
    }

    /// `p(z)·d^k`
    pub fn term(p: Polynomial, k: usize) -> Self {
        let mut coeffs = vec![Polynomial::zero(); k];
        coeffs.push(p);
        Self::from_vec_unchecked(coeffs)
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    /// Coefficient of `d^k` (zero past the order).
    pub fn coeff(&self, k: usize) -> Polynomial {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn field(&self) -> Option<Field> {
        self.coeffs.iter().find_map(Polynomial::field)
    }

    fn check_compat(&self, other: &Self) -> Result<(), FieldError> {
        match (self.field(), other.field()) {
            (Some(a), Some(b)) if a != b => Err(FieldError::IncompatibleField { left: a, right: b }),
            _ => Ok(()),
        }
    }

    fn check_poly(&self, p: &Polynomial) -> Result<(), FieldError> {
        match (self.field(), p.field()) {
            (Some(a), Some(b)) if a != b => Err(FieldError::IncompatibleField { left: a, right: b }),
            _ => Ok(()),
        }
    }

    /// `Σ_k coeffs[k] · p^(k)`
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, FieldError> {
        self.check_poly(p)?;
        let mut acc = Polynomial::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let dk = p.derivative(k);
            if dk.is_zero() {
                break;
            }
            acc = acc.try_add(&c.try_mul(&dk)?)?;
        }
        Ok(acc)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_compat(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeff(k).try_add(&other.coeff(k)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_vec_unchecked(coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|p| -p).collect())
    }

    pub fn try_scale(&self, c: &Scalar) -> Result<Self, FieldError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|p| p.try_scale(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_vec_unchecked(coeffs))
    }

    /// `self ∘ other`, normalised by the Leibniz rule
    /// `d^i ∘ b = Σ_k C(i,k) b^(k) d^(i−k)`.
    pub fn compose(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_compat(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let field = self.field().or_else(|| other.field()).unwrap_or(Field::Rational);
        let mut out = vec![Polynomial::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for k in 0..=i {
                    let bk = b.derivative(k);
                    if bk.is_zero() {
                        break;
                    }
                    let term = a.try_mul(&bk)?.try_scale(&field.from_int(binomial(i, k)))?;
                    let slot = i - k + j;
                    out[slot] = out[slot].try_add(&term)?;
                }
            }
        }
        Ok(Self::from_vec_unchecked(out))
    }

    /// `[self, other] = self∘other − other∘self`
    pub fn commutator(&self, other: &Self) -> Result<Self, FieldError> {
        self.compose(other)?.try_sub(&other.compose(self)?)
    }

    /// Conjugation by a gauge factor: `e^{−αz} ∘ L ∘ e^{αz}`, i.e. `d ↦ d + α`.
    pub fn gauge_shift(&self, alpha: &Scalar) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let field = self.field().unwrap_or(Field::Rational);
        let alpha = field.embed(alpha)?;
        let mut powers = vec![field.one()];
        for _ in 1..self.coeffs.len() {
            let next = powers.last().unwrap().try_mul(&alpha)?;
            powers.push(next);
        }
        let mut out = vec![Polynomial::zero(); self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            for k in 0..=i {
                let factor = powers[i - k].try_mul(&field.from_int(binomial(i, k)))?;
                out[k] = out[k].try_add(&a.try_scale(&factor)?)?;
            }
        }
        Ok(Self::from_vec_unchecked(out))
    }

    /// Images of `1, z, …, z^n`, with float noise above degree `n` dropped.
    fn images(&self, n: usize) -> Result<Vec<Polynomial>, FieldError> {
        let field = self.field().unwrap_or(Field::Rational);
        (0..=n)
            .map(|k| self.apply(&Polynomial::monomial(field.one(), k)))
            .collect()
    }

    /// Highest degree above `n` that is not float noise; noise is judged
    /// against `scale` (the operator's own magnitude) as well as the image.
    fn overflow(image: &Polynomial, n: usize, scale: f64) -> Option<usize> {
        let deg = image.degree()?;
        if deg <= n {
            return None;
        }
        match image.field() {
            Some(Field::Float) => {
                let scale = image.max_abs().max(scale);
                (n + 1..=deg)
                    .rev()
                    .find(|&k| image.coeffs()[k].abs_f64() > FLOAT_SPACE_TOL * scale)
            }
            _ => Some(deg),
        }
    }

    /// Whether `span{1, z, …, z^n}` is invariant.
    pub fn preserves_space(&self, n: usize) -> bool {
        match self.images(n) {
            Ok(images) => images.iter().all(|img| Self::overflow(img, n, self.max_abs()).is_none()),
            Err(_) => false,
        }
    }

    /// Matrix on the monomial basis `{1, z, …, z^n}`; column `j` holds the
    /// coordinates of `L z^j`.
    pub fn restriction_matrix(&self, n: usize) -> Result<Matrix, DiffOpError> {
        let field = self.field().unwrap_or(Field::Rational);
        let images = self.images(n)?;
        let mut m = Matrix::zeros(&field, n + 1, n + 1);
        for (j, img) in images.iter().enumerate() {
            if let Some(degree) = Self::overflow(img, n, self.max_abs()) {
                return Err(DiffOpError::SpaceNotPreserved {
                    monomial: j,
                    degree,
                    bound: n + 1,
                });
            }
            for i in 0..=n {
                if let Some(c) = img.coeff(i) {
                    m.set(i, j, c.clone())?;
                }
            }
        }
        Ok(m)
    }

    pub fn to_float(&self) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(Polynomial::to_float).collect())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(Polynomial::conjugate).collect())
    }

    /// Largest coefficient magnitude of the numeric embedding.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Polynomial::max_abs).fold(0.0, f64::max)
    }
}

impl fmt::Display for LinearDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, p) in self.coeffs.iter().enumerate().rev() {
            if p.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "[{p}]")?,
                1 => write!(f, "[{p}] d")?,
                _ => write!(f, "[{p}] d^{k}")?,
            }
        }
        Ok(())
    }
}

/// Coefficients of `X(z) d² + Y(z) d + Z(z)` with `deg X ≤ 4`, `deg Y ≤ 3`,
/// `deg Z ≤ 2`; `a[k]`, `b[k]`, `c[k]` multiply `z^k` in `X`, `Y`, `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunCoefficients {
    field: Field,
    a: [Scalar; 5],
    b: [Scalar; 4],
    c: [Scalar; 3],
}

impl HeunCoefficients {
    pub fn new(field: &Field, a: [Scalar; 5], b: [Scalar; 4], c: [Scalar; 3]) -> Result<Self, FieldError> {
        let embed = |x: &Scalar| field.embed(x);
        Ok(Self {
            field: field.clone(),
            a: [embed(&a[0])?, embed(&a[1])?, embed(&a[2])?, embed(&a[3])?, embed(&a[4])?],
            b: [embed(&b[0])?, embed(&b[1])?, embed(&b[2])?, embed(&b[3])?],
            c: [embed(&c[0])?, embed(&c[1])?, embed(&c[2])?],
        })
    }

    pub fn zero(field: &Field) -> Self {
        Self {
            field: field.clone(),
            a: core::array::from_fn(|_| field.zero()),
            b: core::array::from_fn(|_| field.zero()),
            c: core::array::from_fn(|_| field.zero()),
        }
    }

    /// Read the coefficients off an operator of order ≤ 2, enforcing the
    /// degree bounds.
    pub fn from_operator(op: &LinearDiffOp) -> Result<Self, DiffOpError> {
        let field = op.field().unwrap_or(Field::Rational);
        Self::from_polys(&field, &op.coeff(2), &op.coeff(1), &op.coeff(0))
    }

    pub fn from_polys(field: &Field, x: &Polynomial, y: &Polynomial, z: &Polynomial) -> Result<Self, DiffOpError> {
        if x.degree().is_some_and(|d| d > 4) {
            return Err(DiffOpError::NotHeun("deg X > 4"));
        }
        if y.degree().is_some_and(|d| d > 3) {
            return Err(DiffOpError::NotHeun("deg Y > 3"));
        }
        if z.degree().is_some_and(|d| d > 2) {
            return Err(DiffOpError::NotHeun("deg Z > 2"));
        }
        let mut h = Self::zero(field);
        for (k, slot) in h.a.iter_mut().enumerate() {
            *slot = field.embed(&x.coeff_in(k, field))?;
        }
        for (k, slot) in h.b.iter_mut().enumerate() {
            *slot = field.embed(&y.coeff_in(k, field))?;
        }
        for (k, slot) in h.c.iter_mut().enumerate() {
            *slot = field.embed(&z.coeff_in(k, field))?;
        }
        Ok(h)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self, k: usize) -> &Scalar {
        &self.a[k]
    }

    pub fn b(&self, k: usize) -> &Scalar {
        &self.b[k]
    }

    pub fn c(&self, k: usize) -> &Scalar {
        &self.c[k]
    }

    pub fn x(&self) -> Polynomial {
        Polynomial::from_vec_unchecked(self.a.to_vec())
    }

    pub fn y(&self) -> Polynomial {
        Polynomial::from_vec_unchecked(self.b.to_vec())
    }

    pub fn z(&self) -> Polynomial {
        Polynomial::from_vec_unchecked(self.c.to_vec())
    }

    pub fn to_operator(&self) -> LinearDiffOp {
        LinearDiffOp::from_vec_unchecked(vec![self.z(), self.y(), self.x()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn z_pow(k: usize) -> Polynomial {
        Polynomial::monomial(Scalar::int(1), k)
    }

    /// `J⁺ = z²d − nz` written out by hand.
    fn j_plus(n: i64) -> LinearDiffOp {
        LinearDiffOp::new(vec![Polynomial::monomial(Scalar::int(-n), 1), z_pow(2)]).unwrap()
    }

    fn j_zero(n: i64) -> LinearDiffOp {
        LinearDiffOp::new(vec![Polynomial::constant(Scalar::rational(-n, 2)), z_pow(1)]).unwrap()
    }

    #[test]
    fn apply_j_plus() {
        assert_eq!(j_plus(2).apply(&z_pow(1)).unwrap(), Polynomial::monomial(Scalar::int(-1), 2));
        assert!(LinearDiffOp::derivative(&q(), 1)
            .apply(&Polynomial::constant(Scalar::int(1)))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn canonical_commutation() {
        let d = LinearDiffOp::derivative(&q(), 1);
        let z = LinearDiffOp::multiplication(z_pow(1));
        let expected = LinearDiffOp::new(vec![Polynomial::constant(Scalar::int(1)), z_pow(1)]).unwrap();
        assert_eq!(d.compose(&z).unwrap(), expected);
        assert_eq!(d.compose(&d).unwrap(), LinearDiffOp::derivative(&q(), 2));
    }

    #[test]
    fn j_plus_after_j_minus_checked_on_basis() {
        let d = LinearDiffOp::derivative(&q(), 1);
        let composed = j_plus(1).compose(&d).unwrap();
        let expected = LinearDiffOp::new(vec![
            Polynomial::zero(),
            Polynomial::monomial(Scalar::int(-1), 1),
            z_pow(2),
        ])
        .unwrap();
        assert_eq!(composed, expected);
        for k in 0..3 {
            let lhs = composed.apply(&z_pow(k)).unwrap();
            let rhs = j_plus(1).apply(&d.apply(&z_pow(k)).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn commutator_of_d_with_z2d() {
        let d = LinearDiffOp::derivative(&q(), 1);
        let z2d = LinearDiffOp::term(z_pow(2), 1);
        assert_eq!(d.commutator(&z2d).unwrap(), LinearDiffOp::term(Polynomial::monomial(Scalar::int(2), 1), 1));
    }

    #[test]
    fn space_preservation() {
        assert!(j_plus(2).preserves_space(2));
        assert!(!j_plus(2).preserves_space(1));
        assert_eq!(
            j_plus(2).restriction_matrix(1),
            Err(DiffOpError::SpaceNotPreserved {
                monomial: 1,
                degree: 2,
                bound: 2
            })
        );
    }

    #[test]
    fn j_zero_restriction_is_diagonal() {
        let m = j_zero(2).restriction_matrix(2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { Scalar::int(i as i64 - 1) } else { Scalar::int(0) };
                assert_eq!(m.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn zero_operator_restriction() {
        assert!(LinearDiffOp::zero().restriction_matrix(3).unwrap().is_zero());
    }

    #[test]
    fn gauge_shift_is_conjugation() {
        // e^{-αz} d e^{αz} = d + α
        let d = LinearDiffOp::derivative(&q(), 1);
        let shifted = d.gauge_shift(&Scalar::rational(-1, 2)).unwrap();
        let expected = LinearDiffOp::new(vec![Polynomial::constant(Scalar::rational(-1, 2)), Polynomial::constant(Scalar::int(1))]).unwrap();
        assert_eq!(shifted, expected);
    }

    #[test]
    fn heun_degree_bounds() {
        let bad = LinearDiffOp::term(z_pow(5), 2);
        assert!(matches!(HeunCoefficients::from_operator(&bad), Err(DiffOpError::NotHeun(_))));
        let ok = LinearDiffOp::term(z_pow(4), 2);
        let h = HeunCoefficients::from_operator(&ok).unwrap();
        assert_eq!(h.a(4), &Scalar::int(1));
        assert_eq!(h.to_operator(), ok);
    }
}
