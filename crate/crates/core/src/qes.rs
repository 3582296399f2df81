//! Quasi-exact spectra: at an exceptional energy the eliminated operator
//! leaves `P_{n+1} = span{1, …, z^n}` invariant, its restriction `M_n` is an
//! `(n+1)×(n+1)` matrix, and `det(M_n − λI)` constrains `λ = ±Δ²`.
//!
//! Exact fields give the constraint as an exact polynomial with exact roots
//! where they exist in the field; the float path (root finding over `g`,
//! cross-checks) uses companion-matrix roots with Newton polishing.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};
use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, One, Signed, Zero};

use crate::diffop::{DiffOpError, LinearDiffOp};
use crate::models::{Branch, Component, CoupledSystem, Model, ModelError, ModelKind};
use crate::polyalg::{convergents, float_determinant, Field, FieldError, Matrix, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QesError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error("λ = {0} is not an eigenvalue of the restricted operator")]
    NotAnEigenvalue(String),
    #[error("Δ = 0 decouples the two spin components")]
    DecoupledModel,
    /// The requested coupling range cannot be scanned (an empty result is
    /// not an error).
    #[error("invalid coupling range: {0}")]
    NoRootInRange(&'static str),
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),
}

/// Roots closer than this (relative) are one root.
pub const ROOT_CLUSTER_TOL: f64 = 1e-9;
/// Newton steps stop below this relative size.
pub const ROOT_POLISH_TOL: f64 = 1e-12;
/// Relative residual accepted for float eigenpolynomials.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 512;

/// `det(M_n − λI)` at the level-`n` exceptional energy. Leading coefficient
/// `(−1)^{n+1}`; admissible `Δ²` are `target_sign · λ` for its roots `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintPolynomial {
    pub kind: ModelKind,
    pub branch: Branch,
    pub n: usize,
    pub energy: Scalar,
    pub target_sign: i8,
    pub matrix: Matrix,
    pub poly: Polynomial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRoot {
    pub value: Scalar,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericRoot {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl NumericRoot {
    pub fn is_real(&self) -> bool {
        self.im.abs() <= 1e-9 * (1.0 + self.re.abs())
    }
}

pub fn constraint_polynomial(model: &Model, n: usize) -> Result<ConstraintPolynomial, QesError> {
    let energy = model.exceptional_energy(n);
    let el = model.spectral_operator(&energy)?;
    let matrix = el.operator.restriction_matrix(n)?;
    let poly = matrix.characteristic_polynomial()?;
    Ok(ConstraintPolynomial {
        kind: model.kind(),
        branch: model.branch(),
        n,
        energy,
        target_sign: el.target_sign,
        matrix,
        poly,
    })
}

impl ConstraintPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// On the float path these are the eigenvalues of the matrix, which are
    /// better conditioned than the roots of its float characteristic
    /// polynomial.
    pub fn numeric_roots(&self) -> Vec<NumericRoot> {
        if self.matrix.field().is_exact() {
            return polynomial_roots(&self.poly);
        }
        let raw: Vec<Complex<f64>> = self.matrix.to_f64().complex_eigenvalues().iter().copied().collect();
        let c: Vec<f64> = self.poly.coeffs().iter().map(Scalar::to_f64).collect();
        cluster_roots(raw, &c, 0, false)
    }

    /// Roots lying in the working field, plus the cofactor that carries the
    /// remaining roots. Empty on the float path.
    pub fn exact_roots(&self) -> Result<(Vec<ExactRoot>, Polynomial), QesError> {
        exact_roots(&self.poly)
    }

    /// Nonnegative real `Δ` with `target_sign · Δ² = λ` for a real root `λ`,
    /// ascending.
    pub fn delta_values(&self) -> Vec<f64> {
        let t = f64::from(self.target_sign);
        let mut out: Vec<f64> = self
            .numeric_roots()
            .iter()
            .filter(|r| r.is_real())
            .filter_map(|r| {
                let d2 = t * r.re;
                if d2 >= -1e-12 * (1.0 + r.re.abs()) {
                    Some(d2.max(0.0).sqrt())
                } else {
                    None
                }
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= ROOT_CLUSTER_TOL * (1.0 + b.abs()));
        out
    }
}

fn cabs(z: impl core::borrow::Borrow<Complex<f64>>) -> f64 {
    let z = z.borrow();
    Float::hypot(z.re, z.im)
}

fn horner(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(a, 0.0);
    }
    (p, dp)
}

/// Rounding-level size of `p(z)`.
fn horner_scale(c: &[f64], z: Complex<f64>) -> f64 {
    let r = cabs(z);
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.abs())
}

/// Parlett–Reinsch diagonal balancing.
fn balance(m: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn polish(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let start = cabs(horner(c, z).0);
    let orig = z;
    for _ in 0..100 {
        let (p, dp) = horner(c, z);
        if cabs(p) == 0.0 || cabs(dp) == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if cabs(step) <= ROOT_POLISH_TOL * (1.0 + cabs(z)) {
            break;
        }
    }
    if cabs(horner(c, z).0) <= start {
        z
    } else {
        orig
    }
}

fn derivative_coeffs(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

/// All complex roots with multiplicities, sorted by `(re, im)`.
///
/// Companion matrix of the balanced monic polynomial, Newton polish on the
/// original coefficients, clustering at [`ROOT_CLUSTER_TOL`]. Near pairs that
/// are a numerically common root of `p` and `p′` are merged as well, since a
/// double root only resolves to about `√ε`.
pub fn polynomial_roots(p: &Polynomial) -> Vec<NumericRoot> {
    let c: Vec<f64> = p.coeffs().iter().map(Scalar::to_f64).collect();
    roots_of_coeffs(&c)
}

pub(crate) fn roots_of_coeffs(c: &[f64]) -> Vec<NumericRoot> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let zeros = c.iter().take_while(|x| **x == 0.0).count();
    let reduced = &c[zeros..];
    let m = reduced.len() - 1;
    let mut raw: Vec<Complex<f64>> = Vec::with_capacity(m);
    if m >= 1 {
        let lead = reduced[m];
        let mut comp = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            comp[(0, j)] = -reduced[m - 1 - j] / lead;
        }
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        balance(&mut comp);
        for z in comp.complex_eigenvalues().iter() {
            raw.push(polish(reduced, *z));
        }
    }
    cluster_roots(raw, reduced, zeros, true)
}

/// Merge raw roots into clusters. `reduced` are the coefficients with the
/// `zeros` vanishing low-order ones stripped; they drive the common-root
/// test with `p′` and, if `polish_multiple`, the polish of merged roots.
fn cluster_roots(mut raw: Vec<Complex<f64>>, reduced: &[f64], zeros: usize, polish_multiple: bool) -> Vec<NumericRoot> {
    raw.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<(Complex<f64>, usize)> = Vec::new();
    if zeros > 0 {
        out.push((Complex::new(0.0, 0.0), zeros));
    }
    let dc = derivative_coeffs(reduced);
    for z in raw {
        let merged = out.iter_mut().find(|(w, _)| {
            let d = cabs(*w - z);
            let scale = 1.0 + cabs(*w);
            if d <= ROOT_CLUSTER_TOL * scale {
                return true;
            }
            if d > 1e-5 * scale {
                return false;
            }
            let mid = polish(&dc, (*w + z) * 0.5);
            cabs(horner(reduced, mid).0) <= 1e3 * f64::EPSILON * horner_scale(reduced, mid)
        });
        match merged {
            Some((w, k)) => {
                *w = (*w * (*k as f64) + z) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => out.push((z, 1)),
        }
    }
    let mut roots: Vec<NumericRoot> = out
        .into_iter()
        .map(|(z, k)| {
            let z = if k > 1 && polish_multiple {
                let mut d = reduced.to_vec();
                for _ in 1..k {
                    d = derivative_coeffs(&d);
                }
                if cabs(z) == 0.0 {
                    z
                } else {
                    polish(&d, z)
                }
            } else {
                z
            };
            let im = if z.im.abs() <= 1e-14 * (1.0 + z.re.abs()) { 0.0 } else { z.im };
            NumericRoot {
                re: z.re,
                im,
                multiplicity: k,
            }
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn rational_candidates(x: f64) -> Vec<BigRational> {
    let tol = 1e-6 * (1.0 + x.abs());
    let mut out: Vec<BigRational> = convergents(x, 1_000_000_000_000)
        .into_iter()
        .filter(|r| (crate::polyalg::Scalar::Rational(r.clone()).to_f64() - x).abs() <= tol)
        .collect();
    out.reverse();
    out.truncate(12);
    out
}

/// `p` with denominators cleared, split as `u_k + v_k √D` over the integers
/// (`D = num(d)·den(d)` in `Q(√d)`). Zero tests then need no rational
/// normalisation.
struct ClearedPoly {
    coeffs: Vec<(BigInt, BigInt)>,
}

fn split_quad(s: &Scalar) -> (BigRational, BigRational) {
    match s {
        Scalar::Quad(q) => (q.a().clone(), q.b() / BigRational::from_integer(q.d().denom().clone())),
        other => (other.rational_value().unwrap_or_default(), BigRational::zero()),
    }
}

fn clear_denominators(rs: &[(BigRational, BigRational)]) -> Vec<(BigInt, BigInt)> {
    let l = rs.iter().fold(BigInt::one(), |l, (a, b)| l.lcm(a.denom()).lcm(b.denom()));
    let l = BigRational::from_integer(l);
    rs.iter()
        .map(|(a, b)| ((a * &l).to_integer(), (b * &l).to_integer()))
        .collect()
}

impl ClearedPoly {
    fn new(p: &Polynomial) -> Self {
        let split: Vec<_> = p.coeffs().iter().map(split_quad).collect();
        Self {
            coeffs: clear_denominators(&split),
        }
    }

    /// Evaluates `Σ c_k X^k Q^{n−k}` for `x = X/Q` by Horner.
    fn vanishes_at(&self, x: &Scalar) -> bool {
        let big_d = match x {
            Scalar::Quad(q) => q.d().numer() * q.d().denom(),
            _ => BigInt::zero(),
        };
        let (xa, xb) = split_quad(x);
        let q = xa.denom().lcm(xb.denom());
        let x = clear_denominators(&[(xa, xb)]).remove(0);
        let mut acc = (BigInt::zero(), BigInt::zero());
        let mut q_pow = BigInt::one();
        for (k, (a, b)) in self.coeffs.iter().enumerate().rev() {
            if k + 1 < self.coeffs.len() {
                acc = (&acc.0 * &x.0 + &acc.1 * &x.1 * &big_d, &acc.0 * &x.1 + &acc.1 * &x.0);
                q_pow *= &q;
            }
            acc.0 += a * &q_pow;
            acc.1 += b * &q_pow;
        }
        acc.0.is_zero() && acc.1.is_zero()
    }
}

fn divide_out(p: &mut Polynomial, root: &Scalar) -> Result<usize, FieldError> {
    let f = root.field();
    let linear = Polynomial::new(vec![-root, f.one()])?;
    let mut k = 0;
    while !p.is_zero() && ClearedPoly::new(p).vanishes_at(root) {
        *p = p.div_exact(&linear)?;
        k += 1;
    }
    Ok(k)
}

/// Roots of `p` that lie in its (exact) coefficient field, with
/// multiplicities, and the cofactor left after dividing them out.
///
/// Candidates come from the numeric roots via continued fractions and are
/// confirmed by exact evaluation. In `Q(√d)` a root `a + b√d` of `p` is
/// paired with the root `a − b√d` of the conjugate polynomial.
pub fn exact_roots(p: &Polynomial) -> Result<(Vec<ExactRoot>, Polynomial), QesError> {
    let Some(field) = p.field() else {
        return Ok((Vec::new(), p.clone()));
    };
    if !field.is_exact() {
        return Ok((Vec::new(), p.clone()));
    }
    let mut rest = p.clone();
    let mut found: Vec<ExactRoot> = Vec::new();
    let zero = field.zero();
    let k = divide_out(&mut rest, &zero)?;
    if k > 0 {
        found.push(ExactRoot { value: zero, multiplicity: k });
    }
    loop {
        if rest.degree().unwrap_or(0) == 0 {
            break;
        }
        let plus: Vec<NumericRoot> = polynomial_roots(&rest).into_iter().filter(|r| r.is_real()).collect();
        let mut progress = false;
        let cleared = ClearedPoly::new(&rest);
        match &field {
            Field::Rational => {
                'roots: for r in &plus {
                    for cand in rational_candidates(r.re) {
                        let value = Scalar::Rational(cand);
                        if !cleared.vanishes_at(&value) {
                            continue;
                        }
                        let k = divide_out(&mut rest, &value)?;
                        if k > 0 {
                            found.push(ExactRoot { value, multiplicity: k });
                            progress = true;
                            break 'roots;
                        }
                    }
                }
            }
            Field::Quad(d) => {
                let minus: Vec<NumericRoot> =
                    polynomial_roots(&rest.conjugate()).into_iter().filter(|r| r.is_real()).collect();
                let sd = Scalar::Rational(d.clone()).to_f64().sqrt();
                'pairs: for r1 in &plus {
                    for r2 in &minus {
                        let a = 0.5 * (r1.re + r2.re);
                        let b = 0.5 * (r1.re - r2.re) / sd;
                        let cbs = rational_candidates(b);
                        for ca in rational_candidates(a) {
                            for cb in &cbs {
                                let (fa, fb) = (Scalar::Rational(ca.clone()).to_f64(), Scalar::Rational(cb.clone()).to_f64());
                                let near = |x: f64, y: f64| (x - y).abs() <= 1e-6 * (1.0 + y.abs());
                                if !(near(fa + fb * sd, r1.re) && near(fa - fb * sd, r2.re)) {
                                    continue;
                                }
                                let cb = cb.clone();
                                let value = Scalar::quad(ca.clone(), cb, d.clone());
                                if !cleared.vanishes_at(&value) {
                                    continue;
                                }
                                let k = divide_out(&mut rest, &value)?;
                                if k > 0 {
                                    found.push(ExactRoot { value, multiplicity: k });
                                    progress = true;
                                    break 'pairs;
                                }
                            }
                        }
                    }
                }
            }
            Field::Float => unreachable!(),
        }
        if !progress {
            break;
        }
    }
    found.sort_by(|a, b| a.value.to_f64().total_cmp(&b.value.to_f64()));
    Ok((found, rest))
}

/// A polynomial solution at an exceptional energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalSolution {
    pub kind: ModelKind,
    pub branch: Branch,
    pub n: usize,
    pub energy: Scalar,
    pub delta_sq: Scalar,
    /// `√(Δ²)` when it lies in the working field.
    pub delta: Option<Scalar>,
    /// Component the eliminated equation acts on.
    pub keep: Component,
    pub target_sign: i8,
    /// `α` in `ψ = e^{αz} φ`.
    pub gauge_exponent: Scalar,
    pub phi: Polynomial,
    /// `Δ · φ_other`, exact even when `Δ` itself is irrational.
    pub scaled_companion: Polynomial,
    /// `φ_other` itself when `delta` is known.
    pub companion: Option<Polynomial>,
    /// Algebraic multiplicity of `target_sign · Δ²` as a root of the constraint.
    pub multiplicity: usize,
    /// Dimension of the kernel this solution belongs to.
    pub kernel_dim: usize,
    /// `max|residual| / (max|H| · max|φ|)`; zero on the exact path.
    pub relative_residual: f64,
}

/// Right singular vectors with `σ ≤ 1e-8 σ_max`, and always the smallest
/// one: callers have already established that the matrix is singular.
fn float_kernel(m: &DMatrix<f64>) -> Vec<Vec<Scalar>> {
    let svd = m.clone().svd(false, true);
    let Some(v_t) = svd.v_t else {
        return Vec::new();
    };
    let sigma = &svd.singular_values;
    let top = sigma.iter().copied().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));
    order
        .iter()
        .enumerate()
        .take_while(|&(k, &i)| k == 0 || sigma[i] <= 1e-8 * top)
        .map(|(_, &i)| v_t.row(i).iter().map(|&x| Scalar::Float(x)).collect())
        .collect()
}

fn field_sqrt(x: &Scalar) -> Option<Scalar> {
    match x {
        Scalar::Float(v) if *v >= 0.0 => Some(Scalar::Float(v.sqrt())),
        Scalar::Float(_) => None,
        other => {
            let r = other.rational_part_if_pure()?;
            crate::polyalg::rational_sqrt(&r).map(|s| other.field().from_rational(s))
        }
    }
}

fn normalize(phi: Polynomial) -> Result<Polynomial, FieldError> {
    let pivot = if phi.field().is_some_and(|f| !f.is_exact()) {
        let m = phi.max_abs();
        phi.coeffs()
            .iter()
            .find(|c| c.abs_f64() >= 0.5 * m)
            .cloned()
    } else {
        phi.coeffs().iter().find(|c| !c.is_zero() && c.try_inv().is_ok()).cloned()
    };
    match pivot {
        Some(p) => phi.try_scale(&p.try_inv()?),
        None => Ok(phi),
    }
}

fn signed(s: i8, x: &Scalar) -> Scalar {
    if s < 0 {
        -x
    } else {
        x.clone()
    }
}

/// Polynomial solutions of `H φ = target_sign · Δ² φ` at the level-`n`
/// exceptional energy, one per kernel basis vector.
pub fn eigenpolynomials(model: &Model, n: usize, delta_sq: &Scalar) -> Result<Vec<ExceptionalSolution>, QesError> {
    let cp = constraint_polynomial(model, n)?;
    let f = model.field().clone();
    let dsq = f.embed(delta_sq)?;
    let lambda = signed(cp.target_sign, &dsq);
    let shifted = cp.matrix.shift_diagonal(&lambda)?;
    let (multiplicity, kernel) = if f.is_exact() {
        let mut rest = cp.poly.clone();
        let k = divide_out(&mut rest, &lambda)?;
        if k == 0 {
            return Err(QesError::NotAnEigenvalue(lambda.to_string()));
        }
        (k, shifted.nullspace(0.0)?)
    } else {
        let l = lambda.to_f64();
        let eig = cp.matrix.to_f64().complex_eigenvalues();
        let dist = |z: &Complex<f64>| cabs(z - Complex::new(l, 0.0));
        let nearest = eig.iter().map(dist).fold(f64::INFINITY, f64::min);
        if nearest > 1e-10 * (1.0 + l.abs()) {
            return Err(QesError::NotAnEigenvalue(lambda.to_string()));
        }
        let k = eig.iter().filter(|z| dist(z) <= 1e-6 * (1.0 + l.abs())).count();
        (k, float_kernel(&shifted.to_f64()))
    };
    if kernel.is_empty() {
        return Err(QesError::NumericalFailure("empty kernel at an eigenvalue"));
    }
    let system = model.gauged_system(&cp.energy)?;
    let el = crate::models::eliminate(&system, model.kept_component())?;
    let (lk, sk) = match model.kept_component() {
        Component::Plus => (&system.plus, system.plus_sign),
        Component::Minus => (&system.minus, system.minus_sign),
    };
    let delta = field_sqrt(&dsq);
    let op_scale = el.operator.max_abs().max(f64::MIN_POSITIVE);
    let kernel_dim = kernel.len();
    let mut out = Vec::with_capacity(kernel_dim);
    for v in kernel {
        let phi = normalize(Polynomial::new(v)?)?;
        let residual = el.operator.apply(&phi)?.try_sub(&phi.try_scale(&lambda)?)?;
        let relative_residual = if f.is_exact() {
            if !residual.is_zero() {
                return Err(QesError::NumericalFailure("exact eigenpolynomial with nonzero residual"));
            }
            0.0
        } else {
            let rel = residual.max_abs() / (op_scale * phi.max_abs().max(f64::MIN_POSITIVE));
            if rel >= FLOAT_RESIDUAL_TOL {
                return Err(QesError::NumericalFailure("float eigenpolynomial residual above tolerance"));
            }
            rel
        };
        // L_k φ + s_k χ = 0
        let scaled_companion = lk.apply(&phi)?.try_scale(&signed(-sk, &f.one()))?;
        let companion = match &delta {
            Some(d) if !d.is_zero() => Some(scaled_companion.try_scale(&d.try_inv()?)?),
            _ => None,
        };
        out.push(ExceptionalSolution {
            kind: model.kind(),
            branch: model.branch(),
            n,
            energy: cp.energy.clone(),
            delta_sq: dsq.clone(),
            delta: delta.clone(),
            keep: model.kept_component(),
            target_sign: cp.target_sign,
            gauge_exponent: system.gauge_exponent.clone(),
            phi,
            scaled_companion,
            companion,
            multiplicity,
            kernel_dim,
            relative_residual,
        });
    }
    Ok(out)
}

/// The other spin component, `−(L_keep φ) / (s_keep Δ)`, using the `Δ` of
/// `system`.
pub fn companion_component(sol: &ExceptionalSolution, system: &CoupledSystem) -> Result<Polynomial, QesError> {
    if system.delta.is_zero() {
        return Err(QesError::DecoupledModel);
    }
    let (lk, sk) = match sol.keep {
        Component::Plus => (&system.plus, system.plus_sign),
        Component::Minus => (&system.minus, system.minus_sign),
    };
    let denom = signed(sk, &system.delta);
    Ok(lk.apply(&sol.phi)?.try_scale(&(-&denom.try_inv()?))?)
}

/// `H φ − target_sign · Δ² φ` for the eliminated operator at `energy`.
pub fn verify_solution(model: &Model, energy: &Scalar, delta_sq: &Scalar, phi: &Polynomial) -> Result<Polynomial, QesError> {
    let el = model.spectral_operator(energy)?;
    let f = model.field();
    let lambda = signed(el.target_sign, &f.embed(delta_sq)?);
    let phi = match phi.field() {
        Some(pf) if pf != *f => Polynomial::new(phi.coeffs().iter().map(|c| f.embed(c)).collect::<Result<_, _>>()?)?,
        _ => phi.clone(),
    };
    Ok(el.operator.apply(&phi)?.try_sub(&phi.try_scale(&lambda)?)?)
}

/// A root `g*` of the level-`n` constraint at fixed `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceptionalPoint {
    pub g: f64,
    pub n: usize,
    pub energy: f64,
    /// Found from an extremum of the constraint rather than a sign change.
    pub tangential: bool,
}

/// Scan of `f(g) = det(M_n(g) − target_sign·Δ²·I)` over a uniform grid.
///
/// [`grid`](Self::grid) and [`evaluate`](Self::evaluate) are independent per
/// point, so callers may evaluate in any order or in parallel;
/// [`finish`](Self::finish) refines brackets serially and returns points
/// sorted by `g`.
#[derive(Debug, Clone)]
pub struct ExceptionalScan {
    base: Model,
    n: usize,
    lambda: f64,
    grid: Vec<f64>,
}

impl ExceptionalScan {
    pub fn new(base: &Model, n: usize, delta: f64, g_range: (f64, f64), points: usize) -> Result<Self, QesError> {
        if points < 2 {
            return Err(QesError::NoRootInRange("grid needs at least two points"));
        }
        if !delta.is_finite() {
            return Err(QesError::NoRootInRange("Δ must be finite"));
        }
        if delta == 0.0 {
            return Err(QesError::DecoupledModel);
        }
        let (lo, hi) = g_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(QesError::NoRootInRange("need finite lo < hi"));
        }
        if base.kind() != ModelKind::Rabi && lo <= 0.0 && hi >= 0.0 {
            return Err(QesError::Model(ModelError::ZeroCoupling));
        }
        let base = base.to_float();
        base.with_coupling(Scalar::Float(lo))?;
        base.with_coupling(Scalar::Float(hi))?;
        let step = (hi - lo) / (points - 1) as f64;
        let mut grid: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
        grid[points - 1] = hi;
        let t = f64::from(base.target_sign());
        Ok(Self {
            base,
            n,
            lambda: t * delta * delta,
            grid,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn model_at(&self, g: f64) -> Result<Model, QesError> {
        Ok(self.base.with_coupling(Scalar::Float(g))?)
    }

    pub fn evaluate(&self, g: f64) -> Result<f64, QesError> {
        let m = self.model_at(g)?;
        let e = m.exceptional_energy(self.n);
        let op: LinearDiffOp = m.spectral_operator(&e)?.operator;
        let mut mat = op.restriction_matrix(self.n)?.to_f64();
        for i in 0..mat.nrows() {
            mat[(i, i)] -= self.lambda;
        }
        Ok(float_determinant(&mat))
    }

    fn point(&self, g: f64, tangential: bool) -> Result<ExceptionalPoint, QesError> {
        Ok(ExceptionalPoint {
            g,
            n: self.n,
            energy: self.model_at(g)?.exceptional_energy(self.n).to_f64(),
            tangential,
        })
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64, QesError> {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = self.evaluate(mid)?;
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn golden_min(&self, mut a: f64, mut b: f64) -> Result<(f64, f64), QesError> {
        let r = 0.5 * (5.0_f64.sqrt() - 1.0);
        let mut x1 = b - r * (b - a);
        let mut x2 = a + r * (b - a);
        let mut f1 = self.evaluate(x1)?.abs();
        let mut f2 = self.evaluate(x2)?.abs();
        for _ in 0..120 {
            if b - a <= 4.0 * f64::EPSILON * (1.0 + a.abs()) {
                break;
            }
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = self.evaluate(x1)?.abs();
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = self.evaluate(x2)?.abs();
            }
        }
        Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
    }

    /// Turn grid values (in grid order) into refined roots.
    pub fn finish(&self, values: &[f64]) -> Result<Vec<ExceptionalPoint>, QesError> {
        if values.len() != self.grid.len() {
            return Err(QesError::NumericalFailure("value count does not match the grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(QesError::NumericalFailure("non-finite constraint value"));
        }
        let g = &self.grid;
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut out = Vec::new();
        for i in 0..g.len() {
            if values[i] == 0.0 {
                out.push(self.point(g[i], false)?);
                continue;
            }
            if i + 1 < g.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
                let root = self.bisect(g[i], g[i + 1], values[i])?;
                out.push(self.point(root, false)?);
            }
        }
        // touching roots: |f| has a local minimum without a sign change
        for i in 1..g.len().saturating_sub(1) {
            let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
            let same_sign = a != 0.0 && b != 0.0 && c != 0.0 && (a < 0.0) == (b < 0.0) && (b < 0.0) == (c < 0.0);
            if !same_sign || (b - a) * (c - b) >= 0.0 || b.abs() > a.abs() || b.abs() > c.abs() {
                continue;
            }
            let (x, fx) = self.golden_min(g[i - 1], g[i + 1])?;
            if fx <= 1e-9 * scale.max(f64::MIN_POSITIVE) {
                out.push(self.point(x, true)?);
            }
        }
        out.sort_by(|a, b| a.g.total_cmp(&b.g));
        out.dedup_by(|a, b| (a.g - b.g).abs() <= 1e-12 * (1.0 + b.g.abs()));
        Ok(out)
    }
}

/// Serial scan over `points` grid values of `g` in `g_range` (endpoints
/// included) at fixed `Δ`; the coupling in `base` is ignored.
pub fn exceptional_points(
    base: &Model,
    n: usize,
    delta: f64,
    g_range: (f64, f64),
    points: usize,
) -> Result<Vec<ExceptionalPoint>, QesError> {
    let scan = ExceptionalScan::new(base, n, delta, g_range, points)?;
    let values = scan.grid().iter().map(|&g| scan.evaluate(g)).collect::<Result<Vec<_>, _>>()?;
    scan.finish(&values)
}
