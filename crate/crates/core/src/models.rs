//! Bargmann-space forms of the driven Rabi, two-photon Rabi and two-mode Rabi
//! Hamiltonians.
//!
//! In the `σ_x`-diagonal basis each model becomes a pair of coupled
//! equations
//!
//! ```text
//! L₊ φ₊ + s₊ Δ φ₋ = 0,    L₋ φ₋ + s₋ Δ φ₊ = 0,
//! ```
//!
//! after the gauge `ψ± = e^{αz} φ±`. Eliminating one component gives a single
//! polynomial-coefficient operator `H` with `H φ = s₊ s₋ Δ² φ`: `+Δ²` for Rabi,
//! `−Δ²` for the two su(1,1) models.
//!
//! Exact parameters must be rational. For the two su(1,1) models the working
//! field is `Q(√d)` with `d = 1 − 4g²/ω²` (two-photon) or `d = 1 − g²/ω²`
//! (two-mode), so `Ω` resp. `Λ` is the formal generator `√d`. When `d` is a
//! rational square the field is plain `Q` and the root is rational.

use alloc::string::{String, ToString};
use alloc::vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_traits::{Float, Signed, Zero};

use crate::diffop::{HeunCoefficients, LinearDiffOp};
use crate::polyalg::{rational_sqrt, Field, FieldError, Polynomial, Scalar};
use crate::sl2rep::Sl2Combination;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("Δ = 0 decouples the two spin components")]
    DecoupledModel,
    #[error("coupling outside the validity range: {0}")]
    CouplingOutOfRange(&'static str),
    #[error("g = 0 is excluded for this model")]
    ZeroCoupling,
    #[error("invalid Bargmann index {0}")]
    InvalidBargmannIndex(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("operation needs a {expected} model, got {found}")]
    WrongModel { expected: ModelKind, found: ModelKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Rabi,
    TwoPhoton,
    TwoMode,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rabi => "rabi",
            ModelKind::TwoPhoton => "2photon",
            ModelKind::TwoMode => "2mode",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rabi" | "driven-rabi" => Ok(ModelKind::Rabi),
            "2photon" | "two-photon" => Ok(ModelKind::TwoPhoton),
            "2mode" | "two-mode" => Ok(ModelKind::TwoMode),
            _ => Err(ModelError::InvalidParameter("unknown model name")),
        }
    }
}

/// Sign of the Rabi gauge exponent: `e^{−gz/ω}` (`Minus`) or `e^{+gz/ω}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Branch {
    #[default]
    Minus,
    Plus,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Branch {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minus" | "-" => Ok(Branch::Minus),
            "plus" | "+" => Ok(Branch::Plus),
            _ => Err(ModelError::InvalidParameter("branch must be minus or plus")),
        }
    }
}

/// Spin component in the `σ_x`-diagonal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega: Scalar,
    pub g: Scalar,
    /// `Δ`.
    pub delta_level: Scalar,
    /// `δ`, the driving term (Rabi only).
    pub drive: Scalar,
    /// `q` (two-photon) or `κ` (two-mode).
    pub bargmann_index: Option<Scalar>,
    pub branch: Branch,
}

impl ModelParams {
    pub fn rabi(omega: Scalar, g: Scalar, delta_level: Scalar) -> Self {
        Self {
            omega,
            g,
            delta_level,
            drive: Scalar::int(0),
            bargmann_index: None,
            branch: Branch::Minus,
        }
    }

    pub fn driven_rabi(omega: Scalar, g: Scalar, delta_level: Scalar, drive: Scalar, branch: Branch) -> Self {
        Self {
            drive,
            branch,
            ..Self::rabi(omega, g, delta_level)
        }
    }

    pub fn two_photon(omega: Scalar, g: Scalar, delta_level: Scalar, q: Scalar) -> Self {
        Self {
            bargmann_index: Some(q),
            ..Self::rabi(omega, g, delta_level)
        }
    }

    pub fn two_mode(omega: Scalar, g: Scalar, delta_level: Scalar, kappa: Scalar) -> Self {
        Self::two_photon(omega, g, delta_level, kappa)
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    fn scalars(&self) -> impl Iterator<Item = &Scalar> {
        [&self.omega, &self.g, &self.delta_level, &self.drive]
            .into_iter()
            .chain(self.bargmann_index.as_ref())
    }
}

/// `Ω` (two-photon) or `Λ` (two-mode) together with the spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedScales {
    pub omega_root: Option<Scalar>,
    pub lambda_root: Option<Scalar>,
    pub energy: Scalar,
}

/// A validated model with its parameters embedded in the working field.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    kind: ModelKind,
    params: ModelParams,
    field: Field,
    omega: Scalar,
    g: Scalar,
    delta: Scalar,
    drive: Scalar,
    index: Scalar,
    root: Option<Scalar>,
}

fn sign(x: &Scalar) -> Ordering {
    match x {
        Scalar::Float(v) => v.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        other => match other.rational_part_if_pure() {
            Some(r) if r.is_zero() => Ordering::Equal,
            Some(r) if r.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
            None => other.to_f64().partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        },
    }
}

fn approx_eq(x: &Scalar, num: i64, den: i64) -> bool {
    match x {
        Scalar::Float(v) => (v - num as f64 / den as f64).abs() < 1e-12,
        other => *other == Scalar::rational(num, den),
    }
}

impl Model {
    /// Validate `params` for `kind`. Any float parameter switches the whole
    /// model to the float path.
    pub fn new(kind: ModelKind, params: ModelParams) -> Result<Self, ModelError> {
        if params.scalars().any(|s| matches!(s, Scalar::Quad(_))) {
            return Err(ModelError::InvalidParameter("parameters must be rational or float"));
        }
        let float = params.scalars().any(|s| matches!(s, Scalar::Float(_)));
        if float && params.scalars().any(|s| !s.to_f64().is_finite()) {
            return Err(ModelError::InvalidParameter("non-finite parameter"));
        }
        let lift = |s: &Scalar| if float { s.to_float() } else { s.clone() };
        let omega = lift(&params.omega);
        let g = lift(&params.g);
        if sign(&omega) != Ordering::Greater {
            return Err(ModelError::InvalidParameter("ω must be positive"));
        }
        let index = match (kind, &params.bargmann_index) {
            (ModelKind::Rabi, None) => Scalar::int(0),
            (ModelKind::Rabi, Some(_)) => {
                return Err(ModelError::InvalidParameter("the Rabi model takes no Bargmann index"))
            }
            (_, None) => return Err(ModelError::InvalidBargmannIndex("missing".to_string())),
            (ModelKind::TwoPhoton, Some(q)) => {
                if !(approx_eq(q, 1, 4) || approx_eq(q, 3, 4)) {
                    return Err(ModelError::InvalidBargmannIndex(q.to_string()));
                }
                lift(q)
            }
            (ModelKind::TwoMode, Some(k)) => {
                let twice = k.to_f64() * 2.0;
                let half_integer = match k {
                    Scalar::Float(_) => (twice - Float::round(twice)).abs() < 1e-12,
                    other => other.as_rational().is_some_and(|r| (r * num_bigint::BigInt::from(2)).is_integer()),
                };
                if !half_integer || twice < 0.5 {
                    return Err(ModelError::InvalidBargmannIndex(k.to_string()));
                }
                lift(k)
            }
        };
        if kind != ModelKind::Rabi && !params.drive.is_zero() {
            return Err(ModelError::InvalidParameter("the driving term applies to the Rabi model only"));
        }
        // d = 1 − (c g/ω)² with c = 2 (two-photon) or 1 (two-mode)
        let ratio_factor = match kind {
            ModelKind::Rabi => None,
            ModelKind::TwoPhoton => Some(4),
            ModelKind::TwoMode => Some(1),
        };
        let (field, root) = match ratio_factor {
            None => (if float { Field::Float } else { Field::Rational }, None),
            Some(c) => {
                let r = &(&lift(&Scalar::int(c)) * &g.pow(2)) / &omega.pow(2);
                let one = if float { Scalar::Float(1.0) } else { Scalar::int(1) };
                let d = &one - &r;
                if sign(&d) != Ordering::Greater {
                    return Err(ModelError::CouplingOutOfRange(if c == 4 {
                        "|2g/ω| must be below 1"
                    } else {
                        "|g/ω| must be below 1"
                    }));
                }
                match d {
                    Scalar::Float(v) => (Field::Float, Some(Scalar::Float(Float::sqrt(v)))),
                    // Q(√d) is Q itself when d is a rational square
                    Scalar::Rational(d) => match rational_sqrt(&d) {
                        Some(root) => (Field::Rational, Some(Scalar::Rational(root))),
                        None => {
                            let f = Field::Quad(d);
                            let s = f.sqrt_generator();
                            (f, s)
                        }
                    },
                    Scalar::Quad(_) => unreachable!("parameters are rational"),
                }
            }
        };
        let emb = |s: &Scalar| field.embed(&lift(s));
        Ok(Self {
            omega: emb(&params.omega)?,
            g: emb(&params.g)?,
            delta: emb(&params.delta_level)?,
            drive: emb(&params.drive)?,
            index: emb(&index)?,
            kind,
            params,
            field,
            root,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_exact(&self) -> bool {
        self.field.is_exact()
    }

    pub fn branch(&self) -> Branch {
        self.params.branch
    }

    pub fn omega(&self) -> &Scalar {
        &self.omega
    }

    pub fn g(&self) -> &Scalar {
        &self.g
    }

    pub fn delta_level(&self) -> &Scalar {
        &self.delta
    }

    pub fn drive(&self) -> &Scalar {
        &self.drive
    }

    /// `q` or `κ` in the working field; `None` for Rabi.
    pub fn bargmann_index(&self) -> Option<&Scalar> {
        (self.kind != ModelKind::Rabi).then_some(&self.index)
    }

    /// `Ω` (two-photon) or `Λ` (two-mode).
    pub fn root_scale(&self) -> Option<&Scalar> {
        self.root.as_ref()
    }

    pub fn scales(&self, energy: &Scalar) -> Result<DerivedScales, ModelError> {
        let energy = self.field.embed(energy)?;
        Ok(DerivedScales {
            omega_root: (self.kind == ModelKind::TwoPhoton).then(|| self.root.clone()).flatten(),
            lambda_root: (self.kind == ModelKind::TwoMode).then(|| self.root.clone()).flatten(),
            energy,
        })
    }

    /// Same model on the float path.
    pub fn to_float(&self) -> Model {
        let p = &self.params;
        let params = ModelParams {
            omega: p.omega.to_float(),
            g: p.g.to_float(),
            delta_level: p.delta_level.to_float(),
            drive: p.drive.to_float(),
            bargmann_index: p.bargmann_index.as_ref().map(Scalar::to_float),
            branch: p.branch,
        };
        Model::new(self.kind, params).expect("a valid exact model stays valid on the float path")
    }

    pub fn with_coupling(&self, g: Scalar) -> Result<Model, ModelError> {
        Model::new(self.kind, ModelParams { g, ..self.params.clone() })
    }

    pub fn with_delta_level(&self, delta_level: Scalar) -> Result<Model, ModelError> {
        Model::new(self.kind, ModelParams { delta_level, ..self.params.clone() })
    }

    fn c(&self, num: i64, den: i64) -> Scalar {
        self.field.from_ratio(num, den)
    }

    fn g_inv(&self) -> Result<Scalar, ModelError> {
        if self.g.is_zero() {
            return Err(ModelError::ZeroCoupling);
        }
        Ok(self.g.try_inv()?)
    }

    fn expect_kind(&self, expected: ModelKind) -> Result<(), ModelError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(ModelError::WrongModel { expected, found: self.kind })
        }
    }

    fn poly(&self, cs: &[Scalar]) -> Polynomial {
        Polynomial::new(cs.to_vec()).expect("coefficients share the working field")
    }

    /// `+1` if the eliminated equation reads `H φ = Δ² φ`, `−1` for `−Δ²`.
    pub fn target_sign(&self) -> i8 {
        match self.kind {
            ModelKind::Rabi => 1,
            _ => -1,
        }
    }

    /// The component whose equation carries the polynomial solutions.
    pub fn kept_component(&self) -> Component {
        match (self.kind, self.params.branch) {
            (ModelKind::Rabi, Branch::Plus) => Component::Minus,
            _ => Component::Plus,
        }
    }

    /// `α` in `ψ± = e^{αz} φ±`.
    pub fn gauge_exponent(&self) -> Result<Scalar, ModelError> {
        let one = self.field.one();
        Ok(match self.kind {
            ModelKind::Rabi => {
                let a = self.g.try_div(&self.omega)?;
                match self.params.branch {
                    Branch::Minus => -a,
                    Branch::Plus => a,
                }
            }
            ModelKind::TwoPhoton => {
                let root = self.root.as_ref().expect("two-photon model has Ω");
                -(&(&(&self.omega * &self.c(1, 4)) * &self.g_inv()?) * &(&one - root))
            }
            ModelKind::TwoMode => {
                let root = self.root.as_ref().expect("two-mode model has Λ");
                -(&(&self.omega * &self.g_inv()?) * &(&one - root))
            }
        })
    }

    /// Un-gauged Bargmann system for `ψ±` (gauge exponent 0). The second row
    /// of the su(1,1) models is negated so that both rows share the leading
    /// coefficient; that flips `s₋` to `−1`.
    pub fn bargmann_system(&self, energy: &Scalar) -> Result<CoupledSystem, ModelError> {
        let e = self.field.embed(energy)?;
        let f = &self.field;
        let (plus, minus, minus_sign) = match self.kind {
            ModelKind::Rabi => {
                // ω z d ± [g(z + d) + δ] − E
                let wz_d = LinearDiffOp::term(self.poly(&[f.zero(), self.omega.clone()]), 1);
                let coupling = LinearDiffOp::new(vec![
                    self.poly(&[self.drive.clone(), self.g.clone()]),
                    Polynomial::constant(self.g.clone()),
                ])?;
                let shift = LinearDiffOp::scalar(-&e);
                let plus = wz_d.try_add(&coupling)?.try_add(&shift)?;
                let minus = wz_d.try_sub(&coupling)?.try_add(&shift)?;
                (plus, minus, 1)
            }
            ModelKind::TwoPhoton | ModelKind::TwoMode => {
                let k = su11_realization(self.kind, &self.index)?;
                let (shift, coupling) = match self.kind {
                    ModelKind::TwoPhoton => (self.c(1, 4), &self.c(2, 1) * &self.g),
                    _ => (self.c(1, 2), self.g.clone()),
                };
                // 2ω(K₀ − shift) − E and c(K₊ + K₋)
                let free = k
                    .zero
                    .try_add(&LinearDiffOp::scalar(-&shift))?
                    .try_scale(&(&self.c(2, 1) * &self.omega))?
                    .try_add(&LinearDiffOp::scalar(-&e))?;
                let inter = k.plus.try_add(&k.minus)?.try_scale(&coupling)?;
                let plus = free.try_add(&inter)?;
                let minus = inter.try_sub(&free)?;
                (plus, minus, -1)
            }
        };
        Ok(CoupledSystem {
            plus,
            minus,
            plus_sign: 1,
            minus_sign: minus_sign,
            delta: self.delta.clone(),
            gauge_exponent: f.zero(),
        })
    }

    /// Gauged coupled system, built from the realization and the gauge
    /// exponent. Requires `Δ ≠ 0`.
    pub fn coupled_system(&self, energy: &Scalar) -> Result<CoupledSystem, ModelError> {
        if self.delta.is_zero() {
            return Err(ModelError::DecoupledModel);
        }
        self.gauged_system(energy)
    }

    /// Gauged system without the `Δ ≠ 0` check.
    pub fn gauged_system(&self, energy: &Scalar) -> Result<CoupledSystem, ModelError> {
        let alpha = self.gauge_exponent()?;
        let raw = self.bargmann_system(energy)?;
        Ok(CoupledSystem {
            plus: raw.plus.gauge_shift(&alpha)?,
            minus: raw.minus.gauge_shift(&alpha)?,
            gauge_exponent: alpha,
            ..raw
        })
    }

    /// Operator acting on the kept component, obtained by elimination. Does
    /// not depend on `Δ`, so `Δ = 0` is allowed here.
    pub fn spectral_operator(&self, energy: &Scalar) -> Result<EliminatedOperator, ModelError> {
        Ok(eliminate(&self.gauged_system(energy)?, self.kept_component())?)
    }

    /// Closed-form exceptional energy for level `n`.
    pub fn exceptional_energy(&self, n: usize) -> Scalar {
        let n = self.field.from_int(n as i64);
        let w = &self.omega;
        match self.kind {
            ModelKind::Rabi => {
                let base = &(w * &n) - &(&self.g.pow(2) / w);
                match self.params.branch {
                    Branch::Minus => &base + &self.drive,
                    Branch::Plus => &base - &self.drive,
                }
            }
            ModelKind::TwoPhoton => {
                // −ω/2 + [2n + 2(q − 1/4) + 1/2] ω Ω
                let root = self.root.as_ref().expect("Ω");
                let bracket = &(&(&self.c(2, 1) * &n) + &(&self.c(2, 1) * &(&self.index - &self.c(1, 4)))) + &self.c(1, 2);
                &(&bracket * &(w * root)) - &(w * &self.c(1, 2))
            }
            ModelKind::TwoMode => {
                // −ω + [2n + 2(κ − 1/2) + 1] ω Λ
                let root = self.root.as_ref().expect("Λ");
                let bracket = &(&(&self.c(2, 1) * &n) + &(&self.c(2, 1) * &(&self.index - &self.c(1, 2)))) + &self.c(1, 1);
                &(&bracket * &(w * root)) - w
            }
        }
    }

    /// The eliminated operator written out in closed form (Heun form for
    /// Rabi, fourth order for the su(1,1) models).
    pub fn closed_form_operator(&self, energy: &Scalar) -> Result<LinearDiffOp, ModelError> {
        match self.kind {
            ModelKind::Rabi => Ok(rabi_heun(self, energy)?.to_operator()),
            ModelKind::TwoPhoton => twophoton_operator(self, energy),
            ModelKind::TwoMode => twomode_operator(self, energy),
        }
    }
}

/// `L₊ φ₊ + s₊ Δ φ₋ = 0`, `L₋ φ₋ + s₋ Δ φ₊ = 0`, with `ψ± = e^{αz} φ±`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSystem {
    pub plus: LinearDiffOp,
    pub minus: LinearDiffOp,
    pub plus_sign: i8,
    pub minus_sign: i8,
    pub delta: Scalar,
    pub gauge_exponent: Scalar,
}

impl CoupledSystem {
    pub fn field(&self) -> Field {
        self.delta.field()
    }

    fn signed(&self, s: i8, x: &Scalar) -> Scalar {
        if s < 0 {
            -x
        } else {
            x.clone()
        }
    }

    /// Left-hand sides of both equations for the pair `(φ₊, φ₋)`.
    pub fn residuals(&self, phi_plus: &Polynomial, phi_minus: &Polynomial) -> Result<(Polynomial, Polynomial), FieldError> {
        let r_plus = self.plus.apply(phi_plus)?.try_add(&phi_minus.try_scale(&self.signed(self.plus_sign, &self.delta))?)?;
        let r_minus = self.minus.apply(phi_minus)?.try_add(&phi_plus.try_scale(&self.signed(self.minus_sign, &self.delta))?)?;
        Ok((r_plus, r_minus))
    }

    /// Residuals in terms of `Δ²` only, for `χ = Δ·φ_other`: with the kept
    /// component `φ` the equations become `L_k φ + s_k χ = 0` and
    /// `L_o χ + s_o Δ² φ = 0`.
    pub fn scaled_residuals(
        &self,
        keep: Component,
        phi: &Polynomial,
        chi: &Polynomial,
        delta_sq: &Scalar,
    ) -> Result<(Polynomial, Polynomial), FieldError> {
        let (lk, lo, sk, so) = match keep {
            Component::Plus => (&self.plus, &self.minus, self.plus_sign, self.minus_sign),
            Component::Minus => (&self.minus, &self.plus, self.minus_sign, self.plus_sign),
        };
        let one = self.field().one();
        let r1 = lk.apply(phi)?.try_add(&chi.try_scale(&self.signed(sk, &one))?)?;
        let r2 = lo.apply(chi)?.try_add(&phi.try_scale(&self.signed(so, delta_sq))?)?;
        Ok((r1, r2))
    }
}

/// Result of eliminating one component: `operator φ = target_sign · Δ² φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminatedOperator {
    pub operator: LinearDiffOp,
    pub target_sign: i8,
    pub keep: Component,
}

/// Eliminate the other component: keeping `φ₊` gives `L₋ ∘ L₊`, keeping
/// `φ₋` gives `L₊ ∘ L₋`; the target sign is `s₊ s₋`.
pub fn eliminate(system: &CoupledSystem, keep: Component) -> Result<EliminatedOperator, FieldError> {
    let operator = match keep {
        Component::Plus => system.minus.compose(&system.plus)?,
        Component::Minus => system.plus.compose(&system.minus)?,
    };
    Ok(EliminatedOperator {
        operator,
        target_sign: system.plus_sign * system.minus_sign,
        keep,
    })
}

pub fn rabi_coupled_system(model: &Model, energy: &Scalar) -> Result<CoupledSystem, ModelError> {
    model.expect_kind(ModelKind::Rabi)?;
    model.coupled_system(energy)
}

pub fn twophoton_coupled_system(model: &Model, energy: &Scalar) -> Result<CoupledSystem, ModelError> {
    model.expect_kind(ModelKind::TwoPhoton)?;
    model.coupled_system(energy)
}

pub fn twomode_coupled_system(model: &Model, energy: &Scalar) -> Result<CoupledSystem, ModelError> {
    model.expect_kind(ModelKind::TwoMode)?;
    model.coupled_system(energy)
}

/// Closed-form Heun coefficients of the eliminated Rabi operator
/// (`L₋∘L₊` on the `Minus` branch, `L₊∘L₋` on the `Plus` branch).
pub fn rabi_heun(model: &Model, energy: &Scalar) -> Result<HeunCoefficients, ModelError> {
    model.expect_kind(ModelKind::Rabi)?;
    let f = model.field();
    let e = f.embed(energy)?;
    let (w, g, d) = (&model.omega, &model.g, &model.drive);
    let two = model.c(2, 1);
    let g2_w = &g.pow(2) / w;
    let x = model.poly(&[-g.pow(2), f.zero(), w.pow(2)]);
    // (ω² − 2g² − 2Eω) z
    let y1 = &(&w.pow(2) - &(&two * &g.pow(2))) - &(&(&two * &e) * w);
    let (y, z) = match model.params.branch {
        Branch::Minus => {
            let shift = &g2_w - d;
            let y0 = &(&(&two * g) * &shift) - &(g * w);
            let y = model.poly(&[y0, y1, -(&(&two * w) * g)]);
            let z = model.poly(&[&e.pow(2) - &shift.pow(2), &(&two * g) * &(&shift + &e)]);
            (y, z)
        }
        Branch::Plus => {
            let shift = &g2_w + d;
            let y0 = &(g * w) - &(&(&two * g) * &shift);
            let y = model.poly(&[y0, y1, &(&two * w) * g]);
            let z = model.poly(&[&e.pow(2) - &shift.pow(2), -(&(&two * g) * &(&shift + &e))]);
            (y, z)
        }
    };
    Ok(HeunCoefficients::from_polys(f, &x, &y, &z).expect("degrees within the Heun bounds"))
}

pub fn rabi_exceptional_energy(model: &Model, n: usize) -> Result<Scalar, ModelError> {
    model.expect_kind(ModelKind::Rabi)?;
    Ok(model.exceptional_energy(n))
}

/// Generator coefficients of the eliminated Rabi operator at the level-`n`
/// exceptional energy, written out in closed form.
pub fn rabi_algebraization(model: &Model, n: usize) -> Result<Sl2Combination, ModelError> {
    model.expect_kind(ModelKind::Rabi)?;
    let e = model.exceptional_energy(n);
    let f = model.field();
    let nn = f.from_int(n as i64);
    let (w, g, d) = (&model.omega, &model.g, &model.drive);
    let two = model.c(2, 1);
    let g2_w = &g.pow(2) / w;
    let mut c = Sl2Combination::zero(nn.clone());
    c.zero_zero = w.pow(2);
    c.minus_minus = -g.pow(2);
    c.zero = &(&(&nn * &w.pow(2)) - &(&two * &g.pow(2))) - &(&(&two * w) * &e);
    // n(nω²/4 − g² − ωE)
    let head = &nn * &(&(&(&(&nn * &w.pow(2)) * &model.c(1, 4)) - &g.pow(2)) - &(w * &e));
    match model.params.branch {
        Branch::Minus => {
            let shift = d - &g2_w;
            c.plus = -(&(&two * g) * w);
            c.minus = -(g * &(w + &(&two * &shift)));
            c.constant = &(&head + &e.pow(2)) - &shift.pow(2);
        }
        Branch::Plus => {
            let shift = d + &g2_w;
            c.plus = &(&two * g) * w;
            c.minus = g * &(w - &(&two * &shift));
            c.constant = &(&head + &e.pow(2)) - &shift.pow(2);
        }
    }
    Ok(c)
}

fn quartic_model_operator(model: &Model, energy: &Scalar, photon: bool) -> Result<LinearDiffOp, ModelError> {
    model.expect_kind(if photon { ModelKind::TwoPhoton } else { ModelKind::TwoMode })?;
    if model.delta.is_zero() {
        return Err(ModelError::DecoupledModel);
    }
    let f = model.field();
    let e = f.embed(energy)?;
    let gi = model.g_inv()?;
    let (w, g, q) = (&model.omega, &model.g, &model.index);
    let r = model.root.as_ref().expect("su(1,1) model carries its root");
    let c = |num, den| model.c(num, den);
    let one = f.one();
    let one_m = &one - r;
    let q_half = q + &c(1, 2);
    let w2 = w.pow(2);
    let w3 = w.pow(3);
    // Coefficient layout shared by both models; the numeric prefactors and
    // the constant offsets differ.
    let (p4, p3z2, p3z, p2z, p2c, p1z2, p1c, p0, e_shift_1, e_shift_0, e_gap) = if photon {
        (
            &c(16, 1) * &g.pow(2),
            &(&c(16, 1) * &(g * w)) * &(r - &one),
            &(&c(64, 1) * &g.pow(2)) * &q_half,
            &c(16, 1) * &(w * g),
            &(&c(64, 1) * &g.pow(2)) * &(q * &q_half),
            &(&c(2, 1) * &(&w3 * &gi)) * &(r * &one_m),
            &(&c(32, 1) * &(&(w * g) * q)) * &(&(&q_half * r) - q),
            &(&w2 * &gi) * &one_m,
            &(&c(2, 1) * w) * &(q + &c(1, 4)),
            &(&(&c(2, 1) * q) * &(w * r)) - &(w * &c(1, 2)),
            &(&c(2, 1) * w) * &(q - &c(1, 4)),
        )
    } else {
        (
            g.pow(2),
            &(&c(4, 1) * &(g * w)) * &(r - &one),
            &(&c(4, 1) * &g.pow(2)) * &q_half,
            &c(4, 1) * &(w * g),
            &(&c(4, 1) * &g.pow(2)) * &(q * &q_half),
            &(&c(8, 1) * &(&w3 * &gi)) * &(r * &one_m),
            &(&c(8, 1) * &(&(w * g) * q)) * &(&(&q_half * r) - q),
            &(&c(4, 1) * &(&w2 * &gi)) * &one_m,
            &(&c(2, 1) * w) * q,
            &(&(&c(2, 1) * q) * &(w * r)) - w,
            &(&c(2, 1) * w) * &(q - &c(1, 2)),
        )
    };
    let three = c(3, 1);
    let d4 = model.poly(&[f.zero(), f.zero(), p4]);
    let d3 = model.poly(&[f.zero(), p3z, p3z2]);
    // [3(q + 1/2)Ω − 3q − 1]
    let d2_mid = &(&(&(&three * &q_half) * r) - &(&three * q)) - &one;
    let d2 = model.poly(&[p2c, &p2z * &d2_mid, &(&c(4, 1) * &w2) * &(&(&r.pow(2) - &(&three * r)) + &one)]);
    // 8ω²q(1−Ω) + 8ω²(q+1/2)(1−Ω)² + 4ω(E − shift)
    let d1_mid = &(&(&(&c(8, 1) * &w2) * &(q * &one_m)) + &(&(&c(8, 1) * &w2) * &(&q_half * &one_m.pow(2))))
        + &(&(&c(4, 1) * w) * &(&e - &e_shift_1));
    let d1 = model.poly(&[p1c, d1_mid, p1z2]);
    let d0 = model.poly(&[
        &(&(&c(4, 1) * &w2) * &(&q.pow(2) * &one_m.pow(2))) - &(&e - &e_gap).pow(2),
        &p0 * &(&e_shift_0 - &e),
    ]);
    Ok(LinearDiffOp::new(vec![d0, d1, d2, d3, d4])?)
}

/// Closed-form fourth-order two-photon operator acting on `φ₊`.
pub fn twophoton_operator(model: &Model, energy: &Scalar) -> Result<LinearDiffOp, ModelError> {
    quartic_model_operator(model, energy, true)
}

/// Closed-form fourth-order two-mode operator acting on `φ₊`.
pub fn twomode_operator(model: &Model, energy: &Scalar) -> Result<LinearDiffOp, ModelError> {
    quartic_model_operator(model, energy, false)
}

pub fn twophoton_exceptional_energy(model: &Model, n: usize) -> Result<Scalar, ModelError> {
    model.expect_kind(ModelKind::TwoPhoton)?;
    Ok(model.exceptional_energy(n))
}

pub fn twomode_exceptional_energy(model: &Model, n: usize) -> Result<Scalar, ModelError> {
    model.expect_kind(ModelKind::TwoMode)?;
    Ok(model.exceptional_energy(n))
}

/// Differential realization of su(1,1) on one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Su11Realization {
    pub zero: LinearDiffOp,
    pub plus: LinearDiffOp,
    pub minus: LinearDiffOp,
}

impl Su11Realization {
    /// `K₊K₋ − K₀(K₀ − 1)`.
    pub fn casimir(&self) -> Result<LinearDiffOp, FieldError> {
        let f = self.zero.field().unwrap_or(Field::Rational);
        let shifted = self.zero.try_sub(&LinearDiffOp::scalar(f.one()))?;
        self.plus.compose(&self.minus)?.try_sub(&self.zero.compose(&shifted)?)
    }
}

/// Two-photon: `K₀ = z d + q, K₊ = z/2, K₋ = 2z d² + 4q d`.
/// Two-mode: `K₀ = z d + κ, K₊ = z, K₋ = z d² + 2κ d`.
pub fn su11_realization(kind: ModelKind, index: &Scalar) -> Result<Su11Realization, ModelError> {
    let f = index.field();
    let z = Polynomial::z(&f);
    let (plus_scale, minus_scale) = match kind {
        ModelKind::TwoPhoton => (f.from_ratio(1, 2), f.from_int(2)),
        ModelKind::TwoMode => (f.one(), f.one()),
        ModelKind::Rabi => {
            return Err(ModelError::WrongModel {
                expected: ModelKind::TwoPhoton,
                found: ModelKind::Rabi,
            })
        }
    };
    let zero = LinearDiffOp::new(vec![Polynomial::constant(index.clone()), z.clone()])?;
    let plus = LinearDiffOp::multiplication(z.try_scale(&plus_scale)?);
    // K₋ = m (z d² + 2·index d)
    let minus = LinearDiffOp::new(vec![
        Polynomial::zero(),
        Polynomial::constant(&f.from_int(2) * index),
        z,
    ])?
    .try_scale(&minus_scale)?;
    Ok(Su11Realization { zero, plus, minus })
}
