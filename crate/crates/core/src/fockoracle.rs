//! Numerical cross-check: the original spin-boson Hamiltonians as dense
//! symmetric matrices in a truncated Fock (or discrete-series) basis.
//!
//! ```text
//! Rabi      ω a†a + Δσ_z + σ_x [g(a† + a) + δ]
//! 2-photon  2ω(K₀ − 1/4) + Δσ_z + 2g σ_x (K₊ + K₋)      on D⁺(q)
//! 2-mode    2ω(K₀ − 1/2) + Δσ_z +  g σ_x (K₊ + K₋)      on D⁺(κ)
//! ```
//!
//! Index layout is spin-major: basis state `|s⟩ ⊗ |m⟩` sits at
//! `s·(N+1) + m`, with `s = 0` the `σ_z = +1` state and `m = 0..=N`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;

use crate::models::{Model, ModelKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("truncation N = {n} is below the minimum {min}")]
    TruncationTooSmall { n: usize, min: usize },
    #[error("eigensolver did not converge")]
    NumericalFailure,
    #[error("input outside the validated range: {0}")]
    InputOutOfValidatedRange(&'static str),
    #[error("invalid oracle request: {0}")]
    InvalidRequest(&'static str),
}

pub const MIN_TRUNCATION: usize = 4;
pub const DEFAULT_SCHEDULE: [usize; 5] = [40, 60, 80, 120, 160];
pub const DEFAULT_TOL: f64 = 1e-8;
/// Largest `|2g/ω|` (two-photon) or `|g/ω|` (two-mode) the oracle accepts.
pub const MAX_COUPLING_RATIO: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    matrix: DMatrix<f64>,
    truncation: usize,
    kind: ModelKind,
}

impl TruncatedHamiltonian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Row of `|s⟩ ⊗ |m⟩`.
    pub fn index(&self, spin: usize, m: usize) -> usize {
        spin * (self.truncation + 1) + m
    }
}

fn set_sym(h: &mut DMatrix<f64>, i: usize, j: usize, v: f64) {
    h[(i, j)] = v;
    h[(j, i)] = v;
}

pub fn build_fock_matrix(model: &Model, truncation: usize) -> Result<TruncatedHamiltonian, OracleError> {
    if truncation < MIN_TRUNCATION {
        return Err(OracleError::TruncationTooSmall {
            n: truncation,
            min: MIN_TRUNCATION,
        });
    }
    let w = model.omega().to_f64();
    let g = model.g().to_f64();
    let delta = model.delta_level().to_f64();
    let drive = model.drive().to_f64();
    let idx = model.bargmann_index().map(|x| x.to_f64()).unwrap_or(0.0);
    match model.kind() {
        ModelKind::TwoPhoton if (2.0 * g / w).abs() > MAX_COUPLING_RATIO => {
            return Err(OracleError::InputOutOfValidatedRange("|2g/ω| above 0.95"))
        }
        ModelKind::TwoMode if (g / w).abs() > MAX_COUPLING_RATIO => {
            return Err(OracleError::InputOutOfValidatedRange("|g/ω| above 0.95"))
        }
        _ => {}
    }
    let size = truncation + 1;
    let mut h = DMatrix::<f64>::zeros(2 * size, 2 * size);
    for m in 0..size {
        let mf = m as f64;
        let diag = match model.kind() {
            ModelKind::Rabi => w * mf,
            ModelKind::TwoPhoton => 2.0 * w * (mf + idx - 0.25),
            ModelKind::TwoMode => 2.0 * w * (mf + idx - 0.5),
        };
        h[(m, m)] = diag + delta;
        h[(size + m, size + m)] = diag - delta;
        if drive != 0.0 {
            set_sym(&mut h, m, size + m, drive);
        }
        if m + 1 < size {
            // ⟨m+1| coupling |m⟩
            let raise = match model.kind() {
                ModelKind::Rabi => g * Float::sqrt(mf + 1.0),
                ModelKind::TwoPhoton => 2.0 * g * Float::sqrt((mf + 1.0) * (mf + 2.0 * idx)),
                ModelKind::TwoMode => g * Float::sqrt((mf + 2.0 * idx) * (mf + 1.0)),
            };
            set_sym(&mut h, m + 1, size + m, raise);
            set_sym(&mut h, m, size + m + 1, raise);
        }
    }
    Ok(TruncatedHamiltonian {
        matrix: h,
        truncation,
        kind: model.kind(),
    })
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>, OracleError> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(OracleError::InvalidRequest("matrix has non-finite entries"));
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(OracleError::NumericalFailure)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn spectrum(h: &TruncatedHamiltonian) -> Result<Vec<f64>, OracleError> {
    symmetric_spectrum(&h.matrix)
}

/// `P = σ_z ⊗ (−1)^{a†a}` in the same layout.
pub fn parity_matrix(truncation: usize) -> DMatrix<f64> {
    let size = truncation + 1;
    DMatrix::from_fn(2 * size, 2 * size, |i, j| {
        if i != j {
            return 0.0;
        }
        let (s, m) = (i / size, i % size);
        let boson = if m % 2 == 0 { 1.0 } else { -1.0 };
        if s == 0 {
            boson
        } else {
            -boson
        }
    })
}

/// Spectra of the `P = +1` and `P = −1` sectors.
pub fn parity_block_spectra(h: &TruncatedHamiltonian) -> Result<(Vec<f64>, Vec<f64>), OracleError> {
    let p = parity_matrix(h.truncation);
    let even: Vec<usize> = (0..h.dim()).filter(|&i| p[(i, i)] > 0.0).collect();
    let odd: Vec<usize> = (0..h.dim()).filter(|&i| p[(i, i)] < 0.0).collect();
    let block = |ix: &[usize]| DMatrix::from_fn(ix.len(), ix.len(), |a, b| h.matrix[(ix[a], ix[b])]);
    Ok((symmetric_spectrum(&block(&even))?, symmetric_spectrum(&block(&odd))?))
}

/// Top-left `k × k` block.
pub fn leading_block(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    m.view((0, 0), (k, k)).into_owned()
}

/// `K₀, K₊, K₋` on `|index, m⟩`, `m = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Su11Matrices {
    pub zero: DMatrix<f64>,
    pub plus: DMatrix<f64>,
    pub minus: DMatrix<f64>,
}

impl Su11Matrices {
    pub fn new(index: f64, truncation: usize) -> Self {
        let size = truncation + 1;
        let zero = DMatrix::from_fn(size, size, |i, j| if i == j { i as f64 + index } else { 0.0 });
        let plus = DMatrix::from_fn(size, size, |i, j| {
            if i == j + 1 {
                let m = j as f64;
                Float::sqrt((m + 1.0) * (m + 2.0 * index))
            } else {
                0.0
            }
        });
        let minus = plus.transpose();
        Self { zero, plus, minus }
    }

    /// `K₊K₋ − K₀(K₀ − 1)`.
    pub fn casimir(&self) -> DMatrix<f64> {
        let id = DMatrix::<f64>::identity(self.zero.nrows(), self.zero.ncols());
        &self.plus * &self.minus - &self.zero * (&self.zero - id)
    }
}

/// Bosonic annihilation operator on `|0⟩ … |N⟩`.
pub fn annihilation(truncation: usize) -> DMatrix<f64> {
    let size = truncation + 1;
    DMatrix::from_fn(size, size, |i, j| if j == i + 1 { Float::sqrt(j as f64) } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelProbe {
    pub truncation: usize,
    pub nearest: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelVerdict {
    Converged { energy: f64, truncation: usize },
    NotFound,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub verdict: LevelVerdict,
    pub probes: Vec<LevelProbe>,
}

/// Look for `e_target` in the spectrum at each truncation of `schedule`.
///
/// Converged when the nearest level is within `tol` at two consecutive
/// truncations and moved by less than `tol/10` between them (the first such
/// pair is reported); NotFound when no truncation has a level within `tol`.
pub fn locate_level(model: &Model, e_target: f64, schedule: &[usize], tol: f64) -> Result<LevelReport, OracleError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(OracleError::InvalidRequest("tolerance must be positive"));
    }
    if !e_target.is_finite() {
        return Err(OracleError::InvalidRequest("target must be finite"));
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OracleError::InvalidRequest("schedule must be strictly increasing"));
    }
    let mut probes = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let spec = spectrum(&build_fock_matrix(model, n)?)?;
        let nearest = spec
            .iter()
            .copied()
            .min_by(|a, b| (a - e_target).abs().total_cmp(&(b - e_target).abs()))
            .ok_or(OracleError::NumericalFailure)?;
        probes.push(LevelProbe {
            truncation: n,
            nearest,
            distance: (nearest - e_target).abs(),
        });
    }
    Ok(LevelReport {
        verdict: verdict_from_probes(&probes, tol),
        probes,
    })
}

/// Verdict for probes already ordered by truncation.
pub fn verdict_from_probes(probes: &[LevelProbe], tol: f64) -> LevelVerdict {
    for w in probes.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.distance <= tol && b.distance <= tol && (b.nearest - a.nearest).abs() < tol / 10.0 {
            return LevelVerdict::Converged {
                energy: b.nearest,
                truncation: b.truncation,
            };
        }
    }
    if probes.iter().any(|p| p.distance <= tol) {
        LevelVerdict::NotConverged
    } else {
        LevelVerdict::NotFound
    }
}
