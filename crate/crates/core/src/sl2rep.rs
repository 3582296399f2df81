//! The `sl(2)` realization by first-order operators
//!
//! ```text
//! J⁺ = z² d − n z,   J⁰ = z d − n/2,   J⁻ = d
//! ```
//!
//! and both directions of the algebraization criterion for Heun operators:
//! expanding a generator combination into a differential operator, and
//! decomposing an operator back into generators with an exact certificate.
//!
//! For a nonnegative integer `n` every polynomial in the generators leaves
//! `P_{n+1} = span{1, z, …, z^n}` invariant. The Heun operator
//! `X d² + Y d + Z` is such a quadratic combination at `n` iff
//!
//! ```text
//! b₃ = −2(n−1)a₄,   c₂ = n(n−1)a₄,   c₁ = −n[(n−1)a₃ + b₂].
//! ```

use alloc::vec::Vec;

use crate::diffop::{DiffOpError, HeunCoefficients, LinearDiffOp};
use crate::polyalg::{Field, FieldError, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Sl2Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operator is not an sl(2) combination at this n; residuals ({}, {}, {})", .residuals[0], .residuals[1], .residuals[2])]
    NotAlgebraizable { residuals: [Scalar; 3] },
    #[error("unexpected leading shape: {0}")]
    WrongLeadingShape(&'static str),
    #[error(transparent)]
    NotHeun(#[from] DiffOpError),
    #[error("recomposed operator differs from the input")]
    RoundTripMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sl2Generators {
    pub plus: LinearDiffOp,
    pub zero: LinearDiffOp,
    pub minus: LinearDiffOp,
}

/// The generators for parameter `n` (any scalar; the commutation relations
/// do not need `n` to be an integer).
pub fn sl2_generators(n: &Scalar) -> Sl2Generators {
    let field = n.field();
    let z = |k| Polynomial::monomial(field.one(), k);
    Sl2Generators {
        plus: LinearDiffOp::multiplication(Polynomial::monomial(-n, 1))
            .try_add(&LinearDiffOp::term(z(2), 1))
            .expect("same field"),
        zero: LinearDiffOp::scalar(-(n * &field.from_ratio(1, 2)))
            .try_add(&LinearDiffOp::term(z(1), 1))
            .expect("same field"),
        minus: LinearDiffOp::derivative(&field, 1),
    }
}

/// Coefficients of the ordered monomials `J⁺(J⁻)³`, `J⁺(J⁻)²`, `J⁰(J⁻)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticTerms {
    pub plus_minus3: Scalar,
    pub plus_minus2: Scalar,
    pub zero_minus2: Scalar,
}

/// `Σ A_{..} J J + Σ A_. J + A✱` in the ordered basis
/// `J⁺J⁺, J⁺J⁰, J⁰J⁰, J⁰J⁻, J⁻J⁻, J⁺, J⁰, J⁻, 1`, optionally extended by
/// [`QuarticTerms`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sl2Combination {
    pub n: Scalar,
    pub plus_plus: Scalar,
    pub plus_zero: Scalar,
    pub zero_zero: Scalar,
    pub zero_minus: Scalar,
    pub minus_minus: Scalar,
    pub plus: Scalar,
    pub zero: Scalar,
    pub minus: Scalar,
    pub constant: Scalar,
    pub quartic: Option<QuarticTerms>,
}

impl Sl2Combination {
    /// All-zero combination at parameter `n`.
    pub fn zero(n: Scalar) -> Self {
        let z = n.field().zero();
        Self {
            plus_plus: z.clone(),
            plus_zero: z.clone(),
            zero_zero: z.clone(),
            zero_minus: z.clone(),
            minus_minus: z.clone(),
            plus: z.clone(),
            zero: z.clone(),
            minus: z.clone(),
            constant: z,
            n,
            quartic: None,
        }
    }

    pub fn field(&self) -> Field {
        self.n.field()
    }

    /// Quadratic coefficients in basis order.
    pub fn quadratic_coeffs(&self) -> [&Scalar; 5] {
        [&self.plus_plus, &self.plus_zero, &self.zero_zero, &self.zero_minus, &self.minus_minus]
    }

    pub fn linear_coeffs(&self) -> [&Scalar; 3] {
        [&self.plus, &self.zero, &self.minus]
    }
}

/// Expand a generator combination into a differential operator.
pub fn sl2_compose(c: &Sl2Combination) -> Result<LinearDiffOp, FieldError> {
    let g = sl2_generators(&c.n);
    let field = c.field();
    let pm2 = g.minus.compose(&g.minus)?;
    let mut terms: Vec<(&Scalar, LinearDiffOp)> = Vec::with_capacity(12);
    terms.push((&c.plus_plus, g.plus.compose(&g.plus)?));
    terms.push((&c.plus_zero, g.plus.compose(&g.zero)?));
    terms.push((&c.zero_zero, g.zero.compose(&g.zero)?));
    terms.push((&c.zero_minus, g.zero.compose(&g.minus)?));
    terms.push((&c.minus_minus, pm2.clone()));
    terms.push((&c.plus, g.plus.clone()));
    terms.push((&c.zero, g.zero.clone()));
    terms.push((&c.minus, g.minus.clone()));
    if let Some(q) = &c.quartic {
        let m3 = pm2.compose(&g.minus)?;
        terms.push((&q.plus_minus3, g.plus.compose(&m3)?));
        terms.push((&q.plus_minus2, g.plus.compose(&pm2)?));
        terms.push((&q.zero_minus2, g.zero.compose(&pm2)?));
    }
    let mut acc = LinearDiffOp::scalar(field.embed(&c.constant)?);
    for (coef, op) in terms {
        if !coef.is_zero() {
            acc = acc.try_add(&op.try_scale(coef)?)?;
        }
    }
    Ok(acc)
}

/// `(b₃ + 2(n−1)a₄,  c₂ − n(n−1)a₄,  c₁ + n[(n−1)a₃ + b₂])`; all zero iff
/// the operator is a quadratic generator combination at `n`.
pub fn algebraization_residuals(h: &HeunCoefficients, n: &Scalar) -> Result<[Scalar; 3], FieldError> {
    let f = h.field();
    let n = f.embed(n)?;
    let one = f.one();
    let two = f.from_int(2);
    let n1 = n.try_sub(&one)?;
    let r1 = h.b(3).try_add(&two.try_mul(&n1)?.try_mul(h.a(4))?)?;
    let r2 = h.c(2).try_sub(&n.try_mul(&n1)?.try_mul(h.a(4))?)?;
    let r3 = h.c(1).try_add(&n.try_mul(&n1.try_mul(h.a(3))?.try_add(h.b(2))?)?)?;
    Ok([r1, r2, r3])
}

/// Read the generator coefficients off a Heun operator satisfying the
/// algebraization conditions at `n`.
pub fn sl2_decompose_quadratic(h: &HeunCoefficients, n: &Scalar) -> Result<Sl2Combination, Sl2Error> {
    let f = h.field().clone();
    let n = f.embed(n)?;
    let residuals = algebraization_residuals(h, &n)?;
    if residuals.iter().any(|r| !r.is_zero()) {
        return Err(Sl2Error::NotAlgebraizable { residuals });
    }
    let half = f.from_ratio(1, 2);
    let one = f.one();
    let n_half = &n * &half;
    let c = Sl2Combination {
        plus_plus: h.a(4).clone(),
        plus_zero: h.a(3).clone(),
        zero_zero: h.a(2).clone(),
        zero_minus: h.a(1).clone(),
        minus_minus: h.a(0).clone(),
        // (3n−2)/2 · a₃ + b₂
        plus: &(&(&(&f.from_int(3) * &n) - &f.from_int(2)) * &half) * h.a(3) + h.b(2),
        // (n−1)a₂ + b₁
        zero: &(&n - &one) * h.a(2) + h.b(1),
        // (n/2)a₁ + b₀
        minus: &n_half * h.a(1) + h.b(0),
        // (n/2)[(n/2 − 1)a₂ + b₁] + c₀
        constant: &n_half * &(&(&n_half - &one) * h.a(2) + h.b(1)) + h.c(0),
        n,
        quartic: None,
    };
    if sl2_compose(&c)? != h.to_operator() {
        return Err(Sl2Error::RoundTripMismatch);
    }
    Ok(c)
}

/// Decompose a fourth-order operator whose top part reads
/// `α z² d⁴ + (β z² + γ z) d³`.
///
/// The top is peeled off with
///
/// ```text
/// z² d⁴ = J⁺(J⁻)³ + n z d³,   z² d³ = J⁺(J⁻)² + n z d²,   z d³ = J⁰(J⁻)² + (n/2) d²,
/// ```
///
/// and the second-order remainder goes through [`sl2_decompose_quadratic`].
pub fn sl2_decompose_quartic(op: &LinearDiffOp, n: &Scalar) -> Result<Sl2Combination, Sl2Error> {
    if op.order() != Some(4) {
        return Err(Sl2Error::WrongLeadingShape("operator order is not 4"));
    }
    let f = op.field().unwrap_or(Field::Rational);
    let n = f.embed(n)?;
    let top = op.coeff(4);
    if top.degree() != Some(2) || !top.coeff_in(0, &f).is_zero() || !top.coeff_in(1, &f).is_zero() {
        return Err(Sl2Error::WrongLeadingShape("d⁴ coefficient is not a multiple of z²"));
    }
    let third = op.coeff(3);
    if third.degree().is_some_and(|d| d > 2) || !third.coeff_in(0, &f).is_zero() {
        return Err(Sl2Error::WrongLeadingShape("d³ coefficient is not of the form βz² + γz"));
    }
    let alpha = top.coeff_in(2, &f);
    let beta = third.coeff_in(2, &f);
    let gamma = third.coeff_in(1, &f);
    let quartic = QuarticTerms {
        zero_minus2: &gamma + &(&n * &alpha),
        plus_minus3: alpha,
        plus_minus2: beta,
    };
    let mut top_only = Sl2Combination::zero(n.clone());
    top_only.quartic = Some(quartic.clone());
    let remainder = op.try_sub(&sl2_compose(&top_only)?)?;
    if remainder.order().is_some_and(|o| o > 2) {
        return Err(Sl2Error::WrongLeadingShape("remainder has order above 2"));
    }
    let heun = HeunCoefficients::from_operator(&remainder)?;
    let mut c = sl2_decompose_quadratic(&heun, &n)?;
    c.quartic = Some(quartic);
    if sl2_compose(&c)? != *op {
        return Err(Sl2Error::RoundTripMismatch);
    }
    Ok(c)
}
