//! Declarative run configuration. Exact parameters are kept as strings and
//! rewritten canonically (`0.5` becomes `1/2`), so a printed config parses
//! back to itself.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qes_core::fockoracle::{DEFAULT_SCHEDULE, DEFAULT_TOL, MIN_TRUNCATION};
use qes_core::models::{Branch, Model, ModelKind, ModelParams};
use qes_core::polyalg::{format_rational, parse_rational, Scalar};
use qes_core::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
pub enum ModelName {
    #[default]
    #[serde(rename = "rabi")]
    #[value(name = "rabi")]
    Rabi,
    #[serde(rename = "driven-rabi")]
    #[value(name = "driven-rabi")]
    DrivenRabi,
    #[serde(rename = "2photon")]
    #[value(name = "2photon")]
    TwoPhoton,
    #[serde(rename = "2mode")]
    #[value(name = "2mode")]
    TwoMode,
}

impl ModelName {
    pub fn kind(self) -> ModelKind {
        match self {
            ModelName::Rabi | ModelName::DrivenRabi => ModelKind::Rabi,
            ModelName::TwoPhoton => ModelKind::TwoPhoton,
            ModelName::TwoMode => ModelKind::TwoMode,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelName::Rabi => "rabi",
            ModelName::DrivenRabi => "driven-rabi",
            ModelName::TwoPhoton => "2photon",
            ModelName::TwoMode => "2mode",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    #[default]
    Minus,
    Plus,
}

impl From<BranchName> for Branch {
    fn from(b: BranchName) -> Self {
        match b {
            BranchName::Minus => Branch::Minus,
            BranchName::Plus => Branch::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sl2,
    Heun,
    Identities,
    Elimination,
    Quartic,
    Su11,
    #[default]
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Sl2 => "sl2",
            Suite::Heun => "heun",
            Suite::Identities => "identities",
            Suite::Elimination => "elimination",
            Suite::Quartic => "quartic",
            Suite::Su11 => "su11",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelName,
    pub omega: String,
    pub g: String,
    pub delta: String,
    pub drive: String,
    pub q: String,
    pub kappa: String,
    pub branch: BranchName,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            kind: ModelName::Rabi,
            omega: "1".into(),
            g: "3/10".into(),
            delta: "4/5".into(),
            drive: "0".into(),
            q: "1/4".into(),
            kappa: "1/2".into(),
            branch: BranchName::Minus,
        }
    }
}

impl ModelSection {
    /// Only the Rabi models have a branch; empty otherwise.
    pub fn branch_name(&self) -> &'static str {
        match (self.kind, self.branch) {
            (ModelName::TwoPhoton | ModelName::TwoMode, _) => "",
            (_, BranchName::Minus) => "minus",
            (_, BranchName::Plus) => "plus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// `k` or inclusive `a..b`.
    pub n: String,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { n: "0..3".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub suite: Suite,
    pub seed: u64,
    /// Random operators per `n` in the `heun` suite.
    pub samples: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: 2024,
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// `lo..hi`, endpoints included.
    pub g_range: String,
    pub points: usize,
    pub levels: usize,
    pub truncation: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            g_range: "0..1/2".into(),
            points: 101,
            levels: 8,
            truncation: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    /// Defaults to the closed-form energy at the first `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub schedule: Vec<usize>,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_n: Option<usize>,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            target: None,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            tol: DEFAULT_TOL,
            dump: None,
            dump_n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub run: RunSection,
    pub verify: VerifySection,
    pub sweep: SweepSection,
    pub oracle: OracleSection,
    pub output: OutputSection,
}

/// Inclusive range of levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelRange {
    pub lo: usize,
    pub hi: usize,
}

impl LevelRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl FromStr for LevelRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::Config(format!("bad level range `{s}` (expected `k` or `a..b`)"));
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if lo > hi {
            return Err(bad());
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

/// Exact closed interval `lo..hi` with `lo < hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRange {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl ExactRange {
    pub fn to_f64(&self) -> (f64, f64) {
        (Scalar::Rational(self.lo.clone()).to_f64(), Scalar::Rational(self.hi.clone()).to_f64())
    }
}

impl FromStr for ExactRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| CliError::Config(format!("bad range `{s}` (expected `lo..hi`)")))?;
        let lo = exact(a, "range start")?;
        let hi = exact(b, "range end")?;
        if lo >= hi {
            return Err(CliError::Config(format!("empty range `{s}`")));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for ExactRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", format_rational(&self.lo), format_rational(&self.hi))
    }
}

pub fn exact(s: &str, what: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn canonical(s: &str, what: &str) -> Result<String, CliError> {
    Ok(format_rational(&exact(s, what)?))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Validate every field and rewrite exact numbers and ranges canonically.
    pub fn canonicalize(mut self) -> Result<Self, CliError> {
        let m = &mut self.model;
        m.omega = canonical(&m.omega, "omega")?;
        m.g = canonical(&m.g, "g")?;
        m.delta = canonical(&m.delta, "delta")?;
        m.drive = canonical(&m.drive, "drive")?;
        m.q = canonical(&m.q, "q")?;
        m.kappa = canonical(&m.kappa, "kappa")?;
        self.run.n = self.run.n.parse::<LevelRange>()?.to_string();
        self.sweep.g_range = self.sweep.g_range.parse::<ExactRange>()?.to_string();
        if let Some(t) = &self.oracle.target {
            self.oracle.target = Some(canonical(t, "target")?);
        }
        if self.sweep.points < 2 {
            return Err(CliError::config("sweep needs at least two points"));
        }
        if self.sweep.levels == 0 {
            return Err(CliError::config("sweep needs at least one level"));
        }
        if self.sweep.truncation < MIN_TRUNCATION {
            return Err(CliError::Config(format!("truncation must be at least {MIN_TRUNCATION}")));
        }
        let s = &self.oracle.schedule;
        if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || s[0] < MIN_TRUNCATION {
            return Err(CliError::Config(format!(
                "schedule must be strictly increasing and start at {MIN_TRUNCATION} or more"
            )));
        }
        if self.oracle.dump_n.is_some_and(|n| n < MIN_TRUNCATION) {
            return Err(CliError::Config(format!("dump truncation must be at least {MIN_TRUNCATION}")));
        }
        if !(self.oracle.tol.is_finite() && self.oracle.tol > 0.0) {
            return Err(CliError::config("tolerance must be positive and finite"));
        }
        if self.output.jobs == Some(0) {
            return Err(CliError::config("--jobs must be at least 1"));
        }
        if self.model.kind == ModelName::Rabi && exact(&self.model.drive, "drive")? != BigRational::default() {
            return Err(CliError::config("a nonzero drive needs --model driven-rabi"));
        }
        Ok(self)
    }

    pub fn levels(&self) -> Result<LevelRange, CliError> {
        self.run.n.parse()
    }

    pub fn g_range(&self) -> Result<ExactRange, CliError> {
        self.sweep.g_range.parse()
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let m = &self.model;
        let s = |v: &str, what: &str| exact(v, what).map(Scalar::Rational);
        let (omega, g, delta) = (s(&m.omega, "omega")?, s(&m.g, "g")?, s(&m.delta, "delta")?);
        Ok(match m.kind {
            ModelName::Rabi | ModelName::DrivenRabi => {
                ModelParams::driven_rabi(omega, g, delta, s(&m.drive, "drive")?, m.branch.into())
            }
            ModelName::TwoPhoton => ModelParams::two_photon(omega, g, delta, s(&m.q, "q")?),
            ModelName::TwoMode => ModelParams::two_mode(omega, g, delta, s(&m.kappa, "kappa")?),
        })
    }

    /// The exact model described by the `[model]` section.
    pub fn model(&self) -> Result<Model, CliError> {
        Model::new(self.model.kind.kind(), self.params()?).map_err(CliError::config)
    }
}
