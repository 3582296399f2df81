//! Exact identity suites behind `qes verify`. Every check yields one row;
//! failing rows carry a counterexample.

use qes_core::diffop::{HeunCoefficients, LinearDiffOp};
use qes_core::models::{rabi_algebraization, su11_realization, Branch, Model, ModelKind};
use qes_core::polyalg::{Field, Polynomial, Scalar};
use qes_core::sl2rep::{
    algebraization_residuals, sl2_compose, sl2_decompose_quadratic, sl2_decompose_quartic, sl2_generators,
    Sl2Combination, Sl2Error,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{LevelRange, Suite};
use crate::error::CliError;
use crate::output::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, failure: Option<String>) -> Self {
        Self {
            suite,
            name: name.into(),
            passed: failure.is_none(),
            detail: failure.unwrap_or_default(),
        }
    }

    fn equal(suite: &'static str, name: impl Into<String>, lhs: &LinearDiffOp, rhs: &LinearDiffOp) -> Self {
        let failure = (lhs != rhs).then(|| format!("lhs = {lhs}; rhs = {rhs}"));
        Self::new(suite, name, failure)
    }

    fn from_result(suite: &'static str, name: impl Into<String>, r: Result<(), String>) -> Self {
        Self::new(suite, name, r.err())
    }
}

pub struct VerifyRequest<'a> {
    pub suite: Suite,
    pub levels: LevelRange,
    pub model: &'a Model,
    pub seed: u64,
    pub samples: usize,
}

pub fn run(req: &VerifyRequest<'_>) -> Result<Vec<Check>, CliError> {
    let suites = match req.suite {
        Suite::All => vec![
            Suite::Sl2,
            Suite::Identities,
            Suite::Heun,
            Suite::Elimination,
            Suite::Quartic,
            Suite::Su11,
        ],
        one => vec![one],
    };
    let mut out = Vec::new();
    for s in suites {
        match s {
            Suite::Sl2 => out.extend(sl2(req.levels)),
            Suite::Identities => out.extend(identities(req.levels)),
            Suite::Heun => out.extend(heun(req.levels, req.seed, req.samples)),
            Suite::Elimination => out.extend(elimination(req.model, req.levels)?),
            Suite::Quartic => out.extend(quartic(req.model, req.levels)?),
            Suite::Su11 => out.extend(su11(req.model)?),
            Suite::All => unreachable!(),
        }
    }
    Ok(out)
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["suite", "check", "status", "detail"]);
    for c in checks {
        t.push(vec![
            c.suite.into(),
            c.name.clone().into(),
            if c.passed { "pass" } else { "fail" }.into(),
            c.detail.clone().into(),
        ]);
    }
    t
}

fn sl2(levels: LevelRange) -> Vec<Check> {
    let mut ns: Vec<Scalar> = levels.iter().map(|n| Scalar::int(n as i64)).collect();
    ns.extend([Scalar::rational(1, 2), Scalar::rational(7, 3), Scalar::rational(-5, 4)]);
    let mut out = Vec::new();
    for n in ns {
        let j = sl2_generators(&n);
        let two = Scalar::int(2);
        let c = |a: &LinearDiffOp, b: &LinearDiffOp| a.commutator(b).expect("one field");
        out.push(Check::equal("sl2", format!("[J0,J+]=J+ n={n}"), &c(&j.zero, &j.plus), &j.plus));
        out.push(Check::equal("sl2", format!("[J0,J-]=-J- n={n}"), &c(&j.zero, &j.minus), &j.minus.neg()));
        let twice = j.zero.try_scale(&two).expect("one field");
        out.push(Check::equal("sl2", format!("[J-,J+]=2J0 n={n}"), &c(&j.minus, &j.plus), &twice));
    }
    out
}

fn z_term(n: &Scalar, k: usize, order: usize) -> LinearDiffOp {
    LinearDiffOp::term(Polynomial::monomial(n.field().one(), k), order)
}

fn identities(levels: LevelRange) -> Vec<Check> {
    let mut out = Vec::new();
    for n in levels.iter() {
        let nn = Scalar::int(n as i64);
        let j = sl2_generators(&nn);
        let m2 = j.minus.compose(&j.minus).expect("one field");
        let m3 = m2.compose(&j.minus).expect("one field");
        let add = |a: LinearDiffOp, b: LinearDiffOp| a.try_add(&b).expect("one field");
        let scaled = |op: LinearDiffOp, c: &Scalar| op.try_scale(c).expect("one field");
        let rhs1 = add(j.plus.compose(&m3).expect("one field"), scaled(z_term(&nn, 1, 3), &nn));
        out.push(Check::equal("identities", format!("z^2 d^4 = J+(J-)^3 + n z d^3, n={n}"), &z_term(&nn, 2, 4), &rhs1));
        let rhs2 = add(j.plus.compose(&m2).expect("one field"), scaled(z_term(&nn, 1, 2), &nn));
        out.push(Check::equal("identities", format!("z^2 d^3 = J+(J-)^2 + n z d^2, n={n}"), &z_term(&nn, 2, 3), &rhs2));
        let half = Scalar::rational(n as i64, 2);
        let rhs3 = add(j.zero.compose(&m2).expect("one field"), scaled(z_term(&nn, 0, 2), &half));
        out.push(Check::equal("identities", format!("z d^3 = J0(J-)^2 + (n/2) d^2, n={n}"), &z_term(&nn, 1, 3), &rhs3));
    }
    out
}

fn random_rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::rational(rng.gen_range(-40..=40), rng.gen_range(1..=12))
}

fn random_combination(rng: &mut ChaCha8Rng, n: &Scalar) -> Sl2Combination {
    let mut c = Sl2Combination::zero(n.clone());
    for slot in [
        &mut c.plus_plus,
        &mut c.plus_zero,
        &mut c.zero_zero,
        &mut c.zero_minus,
        &mut c.minus_minus,
        &mut c.plus,
        &mut c.zero,
        &mut c.minus,
        &mut c.constant,
    ] {
        *slot = random_rational(rng);
    }
    c
}

/// Random Heun coefficients; `b₃, c₂, c₁` obey the algebraization
/// conditions unless `violate` is set, in which case one of them is pushed
/// off by a nonzero amount.
fn random_heun(rng: &mut ChaCha8Rng, n: i64, violate: bool) -> HeunCoefficients {
    let v: Vec<Scalar> = (0..9).map(|_| random_rational(rng)).collect();
    let nn = Scalar::int(n);
    let n1 = Scalar::int(n - 1);
    let a = [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone()];
    let mut b3 = -(&(&Scalar::int(2) * &n1) * &a[4]);
    let mut c2 = &(&nn * &n1) * &a[4];
    let mut c1 = -(&nn * &(&(&n1 * &a[3]) + &v[7]));
    if violate {
        let mut kick = random_rational(rng);
        if kick.is_zero() {
            kick = Scalar::int(1);
        }
        match rng.gen_range(0..3) {
            0 => b3 = &b3 + &kick,
            1 => c2 = &c2 + &kick,
            _ => c1 = &c1 + &kick,
        }
    }
    HeunCoefficients::new(&Field::Rational, a, [v[5].clone(), v[6].clone(), v[7].clone(), b3], [v[8].clone(), c1, c2])
        .expect("rational coefficients")
}

fn heun(levels: LevelRange, seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in levels.iter() {
        let nn = Scalar::int(n as i64);
        let mut first_bad = None;
        for _ in 0..samples {
            let c = random_combination(&mut rng, &nn);
            let op = sl2_compose(&c).expect("one field");
            let ok = HeunCoefficients::from_operator(&op)
                .ok()
                .and_then(|h| algebraization_residuals(&h, &nn).ok())
                .is_some_and(|r| r.iter().all(Scalar::is_zero));
            if !ok && first_bad.is_none() {
                first_bad = Some(format!("combination {c:?} expands to {op}"));
            }
        }
        out.push(Check::new("heun", format!("combinations have zero residuals, n={n}, {samples} samples"), first_bad));

        let mut first_bad = None;
        for _ in 0..samples {
            let h = random_heun(&mut rng, n as i64, false);
            let back = sl2_decompose_quadratic(&h, &nn).map(|c| sl2_compose(&c));
            let ok = matches!(&back, Ok(Ok(op)) if *op == h.to_operator());
            if !ok && first_bad.is_none() {
                first_bad = Some(format!("operator {} does not round-trip", h.to_operator()));
            }
        }
        out.push(Check::new("heun", format!("admissible operators round-trip, n={n}, {samples} samples"), first_bad));

        let mut first_bad = None;
        for _ in 0..samples {
            let h = random_heun(&mut rng, n as i64, true);
            let rejected = matches!(sl2_decompose_quadratic(&h, &nn), Err(Sl2Error::NotAlgebraizable { .. }));
            if !rejected && first_bad.is_none() {
                first_bad = Some(format!("operator {} was accepted", h.to_operator()));
            }
        }
        out.push(Check::new("heun", format!("violating operators rejected, n={n}, {samples} samples"), first_bad));
    }
    out
}

fn branches(model: &Model) -> Result<Vec<Model>, CliError> {
    if model.kind() != ModelKind::Rabi {
        return Ok(vec![model.clone()]);
    }
    [Branch::Minus, Branch::Plus]
        .into_iter()
        .map(|b| Model::new(ModelKind::Rabi, model.params().clone().with_branch(b)).map_err(CliError::config))
        .collect()
}

fn label(m: &Model, n: usize) -> String {
    match m.kind() {
        ModelKind::Rabi => format!("{} {} n={n}", m.kind(), m.branch()),
        k => format!("{k} n={n}"),
    }
}

fn elimination(model: &Model, levels: LevelRange) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for m in branches(model)? {
        for n in levels.iter() {
            let e = m.exceptional_energy(n);
            let r = (|| {
                let eliminated = m.spectral_operator(&e).map_err(|e| e.to_string())?.operator;
                let closed = m.closed_form_operator(&e).map_err(|e| e.to_string())?;
                if eliminated != closed {
                    return Err(format!("E={e}: eliminated {eliminated} vs closed form {closed}"));
                }
                if !eliminated.preserves_space(n) {
                    return Err(format!("E={e}: operator does not preserve polynomials of degree {n}"));
                }
                Ok(())
            })();
            out.push(Check::from_result("elimination", label(&m, n), r));
        }
    }
    Ok(out)
}

fn quartic(model: &Model, levels: LevelRange) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for m in branches(model)? {
        for n in levels.iter() {
            let nn = m.field().from_int(n as i64);
            let e = m.exceptional_energy(n);
            let r = (|| {
                let h = m.spectral_operator(&e).map_err(|e| e.to_string())?.operator;
                let c = if m.kind() == ModelKind::Rabi {
                    let heun = HeunCoefficients::from_operator(&h).map_err(|e| e.to_string())?;
                    let c = sl2_decompose_quadratic(&heun, &nn).map_err(|err| format!("E={e}: {err}"))?;
                    let closed = rabi_algebraization(&m, n).map_err(|e| e.to_string())?;
                    if closed != c {
                        return Err(format!("decomposition {c:?} differs from the closed-form combination {closed:?}"));
                    }
                    c
                } else {
                    sl2_decompose_quartic(&h, &nn).map_err(|err| format!("E={e}: {err}"))?
                };
                let back = sl2_compose(&c).map_err(|e| e.to_string())?;
                if back != h {
                    return Err(format!("round trip gives {back}, expected {h}"));
                }
                Ok(())
            })();
            out.push(Check::from_result("quartic", format!("{} round trip", label(&m, n)), r));

            // a shifted energy must not decompose; without coupling every energy does
            if m.g().is_zero() {
                continue;
            }
            let shifted = &e + &m.field().from_ratio(1, 7);
            let r = (|| {
                let h = m.spectral_operator(&shifted).map_err(|e| e.to_string())?.operator;
                let res = if m.kind() == ModelKind::Rabi {
                    let heun = HeunCoefficients::from_operator(&h).map_err(|e| e.to_string())?;
                    sl2_decompose_quadratic(&heun, &nn)
                } else {
                    sl2_decompose_quartic(&h, &nn)
                };
                match res {
                    Err(Sl2Error::NotAlgebraizable { .. }) => Ok(()),
                    other => Err(format!("E={shifted}: expected rejection, got {other:?}")),
                }
            })();
            out.push(Check::from_result("quartic", format!("{} shifted energy rejected", label(&m, n)), r));
        }
    }
    Ok(out)
}

fn su11(model: &Model) -> Result<Vec<Check>, CliError> {
    let cases: Vec<(ModelKind, Scalar)> = match model.kind() {
        ModelKind::Rabi => vec![
            (ModelKind::TwoPhoton, Scalar::rational(1, 4)),
            (ModelKind::TwoPhoton, Scalar::rational(3, 4)),
            (ModelKind::TwoMode, Scalar::rational(1, 2)),
            (ModelKind::TwoMode, Scalar::int(1)),
        ],
        k => vec![(k, model.bargmann_index().expect("su(1,1) model has an index").clone())],
    };
    let mut out = Vec::new();
    for (kind, idx) in cases {
        let idx = match idx {
            Scalar::Quad(_) | Scalar::Float(_) => idx.rational_value().map(Scalar::Rational).unwrap_or(idx),
            r => r,
        };
        let k = su11_realization(kind, &idx).map_err(CliError::config)?;
        let c = |a: &LinearDiffOp, b: &LinearDiffOp| a.commutator(b).expect("one field");
        let tag = format!("{kind} index={idx}");
        out.push(Check::equal("su11", format!("[K0,K+]=K+ {tag}"), &c(&k.zero, &k.plus), &k.plus));
        out.push(Check::equal("su11", format!("[K0,K-]=-K- {tag}"), &c(&k.zero, &k.minus), &k.minus.neg()));
        let m2 = k.zero.try_scale(&Scalar::int(-2)).expect("one field");
        out.push(Check::equal("su11", format!("[K+,K-]=-2K0 {tag}"), &c(&k.plus, &k.minus), &m2));
        let value = &idx * &(&Scalar::int(1) - &idx);
        let cas = k.casimir().expect("one field");
        out.push(Check::equal("su11", format!("casimir = {value} {tag}"), &cas, &LinearDiffOp::scalar(value.clone())));
    }
    Ok(out)
}
