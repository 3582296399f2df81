use std::fs::File;
use std::io::BufWriter;

use qes_core::fockoracle::{
    build_fock_matrix, locate_level, spectrum, LevelVerdict, OracleError, MAX_COUPLING_RATIO,
};
use qes_core::models::{Model, ModelKind};
use qes_core::polyalg::Scalar;
use qes_core::qes::{constraint_polynomial, ExceptionalPoint, ExceptionalScan, QesError};
use rayon::prelude::*;

use crate::config::{exact, RunConfig};
use crate::dump;
use crate::error::CliError;
use crate::format::{complex, join, scalar, sig12};
use crate::output::{Cell, Table};
use crate::verify::{self, VerifyRequest};

fn oracle_error(e: OracleError) -> CliError {
    match e {
        OracleError::NumericalFailure => CliError::runtime(e),
        _ => CliError::config(e),
    }
}

/// Invalid parameters surface from the core as model errors; those are
/// configuration problems, everything else is a runtime failure.
fn qes_error(e: QesError) -> CliError {
    match e {
        QesError::Model(_) | QesError::DecoupledModel | QesError::NoRootInRange(_) => CliError::config(e),
        _ => CliError::runtime(e),
    }
}

fn num(x: f64) -> Cell {
    Cell::Number(sig12(x))
}

pub fn verify(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let model = cfg.model()?;
    let checks = verify::run(&VerifyRequest {
        suite: cfg.verify.suite,
        levels: cfg.levels()?,
        model: &model,
        seed: cfg.verify.seed,
        samples: cfg.verify.samples,
    })?;
    let ok = checks.iter().all(|c| c.passed);
    Ok((verify::table(&checks), ok))
}

/// One row per level: closed-form energy, roots `λ` of the constraint
/// (exact where they lie in the working field) and the real `Δ ≥ 0`.
pub fn exceptional(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.model()?;
    let mut t = Table::new(&["model", "branch", "n", "E_exact", "E_float", "lambda_roots", "delta_values"]);
    for n in cfg.levels()?.iter() {
        let cp = constraint_polynomial(&model, n).map_err(qes_error)?;
        let (roots, rest) = cp.exact_roots().map_err(CliError::runtime)?;
        let mut lambdas: Vec<(f64, String)> = roots
            .iter()
            .flat_map(|r| std::iter::repeat_n((r.value.to_f64(), scalar(&r.value)), r.multiplicity))
            .collect();
        if rest.degree().is_some_and(|d| d > 0) {
            for r in qes_core::qes::polynomial_roots(&rest) {
                lambdas.extend(std::iter::repeat_n((r.re, complex(&r)), r.multiplicity));
            }
        }
        lambdas.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        t.push(vec![
            cfg.model.kind.name().into(),
            cfg.model.branch_name().into(),
            n.into(),
            scalar(&cp.energy).into(),
            num(cp.energy.to_f64()),
            join(lambdas.into_iter().map(|(_, s)| s)).into(),
            join(cp.delta_values().into_iter().map(sig12)).into(),
        ]);
    }
    Ok(t)
}

/// Coefficients of `det(M_n − λI)` by power of `λ`.
pub fn constraint(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.model()?;
    let mut t = Table::new(&["model", "branch", "n", "E_exact", "power", "coeff_exact", "coeff_float"]);
    for n in cfg.levels()?.iter() {
        let cp = constraint_polynomial(&model, n).map_err(qes_error)?;
        for (k, c) in cp.poly.coeffs().iter().enumerate() {
            t.push(vec![
                cfg.model.kind.name().into(),
                cfg.model.branch_name().into(),
                n.into(),
                scalar(&cp.energy).into(),
                k.into(),
                scalar(c).into(),
                num(c.to_f64()),
            ]);
        }
    }
    Ok(t)
}

pub struct SweepOutput {
    pub spectrum: Table,
    pub markers: Table,
}

fn check_sweep_range(model: &Model, lo: f64, hi: f64, omega: f64) -> Result<(), CliError> {
    let ratio = |g: f64| match model.kind() {
        ModelKind::TwoPhoton => (2.0 * g / omega).abs(),
        ModelKind::TwoMode => (g / omega).abs(),
        ModelKind::Rabi => 0.0,
    };
    if ratio(lo) > MAX_COUPLING_RATIO || ratio(hi) > MAX_COUPLING_RATIO {
        let what = match model.kind() {
            ModelKind::TwoPhoton => "|2g/ω|",
            _ => "|g/ω|",
        };
        return Err(CliError::Config(format!(
            "g range {lo}..{hi} leaves the validated range {what} ≤ {MAX_COUPLING_RATIO}"
        )));
    }
    if model.kind() != ModelKind::Rabi && lo <= 0.0 && hi >= 0.0 {
        return Err(CliError::config("g range contains g = 0, where the su(1,1) models are not defined"));
    }
    Ok(())
}

/// Oracle spectrum over the `g` grid and the exceptional points of every
/// requested level. Grid points are evaluated in parallel on the current
/// rayon pool; results are merged in grid order.
pub fn sweep(cfg: &RunConfig) -> Result<SweepOutput, CliError> {
    let exact_model = cfg.model()?;
    let (lo, hi) = cfg.g_range()?.to_f64();
    let omega = exact(&cfg.model.omega, "omega")?;
    check_sweep_range(&exact_model, lo, hi, Scalar::Rational(omega).to_f64())?;
    let delta = Scalar::Rational(exact(&cfg.model.delta, "delta")?).to_f64();
    let levels = cfg.levels()?;
    let scans = levels
        .iter()
        .map(|n| ExceptionalScan::new(&exact_model, n, delta, (lo, hi), cfg.sweep.points))
        .collect::<Result<Vec<_>, QesError>>()
        .map_err(qes_error)?;
    let grid = scans[0].grid().to_vec();
    let base = exact_model.to_float();

    let spectra = grid
        .par_iter()
        .map(|&g| {
            let m = base.with_coupling(Scalar::Float(g)).map_err(CliError::runtime)?;
            let h = build_fock_matrix(&m, cfg.sweep.truncation).map_err(oracle_error)?;
            spectrum(&h).map_err(CliError::runtime)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = Table::new(&["g", "level", "E"]);
    for (g, s) in grid.iter().zip(&spectra) {
        for (k, e) in s.iter().take(cfg.sweep.levels).enumerate() {
            spec.push(vec![num(*g), k.into(), num(*e)]);
        }
    }

    let mut points: Vec<ExceptionalPoint> = Vec::new();
    for scan in &scans {
        let values = scan
            .grid()
            .par_iter()
            .map(|&g| scan.evaluate(g))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::runtime)?;
        points.extend(scan.finish(&values).map_err(CliError::runtime)?);
    }
    points.sort_by(|a, b| a.g.total_cmp(&b.g).then(a.n.cmp(&b.n)));
    let mut markers = Table::new(&["g", "n", "E"]);
    for p in &points {
        markers.push(vec![num(p.g), p.n.into(), num(p.energy)]);
    }
    Ok(SweepOutput { spectrum: spec, markers })
}

pub struct OracleOutput {
    pub table: Table,
    pub verdict: LevelVerdict,
}

/// Probe rows for each truncation, then one verdict row.
pub fn oracle(cfg: &RunConfig) -> Result<OracleOutput, CliError> {
    let exact_model = cfg.model()?;
    let model = exact_model.to_float();
    let target = match &cfg.oracle.target {
        Some(t) => Scalar::Rational(exact(t, "target")?).to_f64(),
        None => exact_model.exceptional_energy(cfg.levels()?.lo).to_f64(),
    };
    let report = locate_level(&model, target, &cfg.oracle.schedule, cfg.oracle.tol).map_err(oracle_error)?;
    if let Some(path) = &cfg.oracle.dump {
        let n = cfg
            .oracle
            .dump_n
            .unwrap_or(*cfg.oracle.schedule.last().expect("schedule is nonempty"));
        let h = build_fock_matrix(&model, n).map_err(oracle_error)?;
        dump::write_matrix(BufWriter::new(File::create(path)?), n, h.matrix())?;
    }
    let mut t = Table::new(&["kind", "truncation", "energy", "distance", "status"]);
    for p in &report.probes {
        let status = if p.distance <= cfg.oracle.tol { "within" } else { "outside" };
        t.push(vec!["probe".into(), p.truncation.into(), num(p.nearest), num(p.distance), status.into()]);
    }
    let row = match report.verdict {
        LevelVerdict::Converged { energy, truncation } => vec![
            "verdict".into(),
            truncation.into(),
            num(energy),
            num((energy - target).abs()),
            "Converged".into(),
        ],
        LevelVerdict::NotFound => vec!["verdict".into(), Cell::Empty, num(target), Cell::Empty, "NotFound".into()],
        LevelVerdict::NotConverged => {
            vec!["verdict".into(), Cell::Empty, num(target), Cell::Empty, "NotConverged".into()]
        }
    };
    t.push(row);
    Ok(OracleOutput {
        table: t,
        verdict: report.verdict,
    })
}
