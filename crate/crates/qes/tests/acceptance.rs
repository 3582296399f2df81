//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status if
//! any criterion fails or exceeds its time budget.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use qes_core::diffop::{HeunCoefficients, LinearDiffOp};
use qes_core::fockoracle::{
    build_fock_matrix, leading_block, locate_level, spectrum, LevelVerdict, Su11Matrices, DEFAULT_SCHEDULE,
};
use qes_core::models::{su11_realization, Branch, Model, ModelKind, ModelParams};
use qes_core::polyalg::{rat, Field, Polynomial, Scalar};
use qes_core::qes::{constraint_polynomial, eigenpolynomials, verify_solution};
use qes_core::sl2rep::{
    algebraization_residuals, sl2_compose, sl2_decompose_quadratic, sl2_decompose_quartic, sl2_generators,
    Sl2Combination, Sl2Error,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> Scalar {
    Scalar::rational(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `Σ_k rows[k](z) d^k`, coefficients listed from the constant term up.
fn op(f: &Field, rows: &[&[Scalar]]) -> LinearDiffOp {
    let coeffs = rows
        .iter()
        .map(|cs| {
            if cs.is_empty() {
                Polynomial::zero()
            } else {
                Polynomial::new(cs.iter().map(|c| f.embed(c).unwrap()).collect()).unwrap()
            }
        })
        .collect();
    LinearDiffOp::new(coeffs).unwrap()
}

fn z_pow(f: &Field, k: usize) -> Polynomial {
    Polynomial::monomial(f.one(), k)
}

// ---------------------------------------------------------------- generators

/// `J⁺ = z²d − nz`, `J⁰ = zd − n/2`, `J⁻ = d`, written out by hand.
fn hand_generators(n: &Scalar) -> [LinearDiffOp; 3] {
    let f = n.field();
    let zero = f.zero();
    let one = f.one();
    let half = &(n * &f.from_ratio(1, 2));
    [
        op(&f, &[&[zero.clone(), -n], &[zero.clone(), zero.clone(), one.clone()]]),
        op(&f, &[&[-half], &[zero.clone(), one.clone()]]),
        op(&f, &[&[], &[one]]),
    ]
}

fn c1_sl2_relations() -> Outcome {
    let ns = [r(0, 1), r(1, 2), r(1, 1), r(7, 3), r(5, 1)];
    for n in &ns {
        let [jp, j0, jm] = hand_generators(n);
        let g = sl2_generators(n);
        ensure(g.plus == jp && g.zero == j0 && g.minus == jm, || format!("generators differ at n={n}"))?;
        let com = |a: &LinearDiffOp, b: &LinearDiffOp| a.commutator(b).unwrap();
        ensure(com(&j0, &jp) == jp, || format!("[J0,J+] != J+ at n={n}"))?;
        ensure(com(&j0, &jm) == jm.neg(), || format!("[J0,J-] != -J- at n={n}"))?;
        let two_j0 = j0.try_scale(&r(2, 1)).unwrap();
        ensure(com(&jm, &jp) == two_j0, || format!("[J-,J+] != 2J0 at n={n}"))?;
        ensure(com(&jp, &jm) == two_j0.neg(), || format!("[J+,J-] != -2J0 at n={n}"))?;
    }
    Ok(format!(
        "n ∈ {{0, 1/2, 1, 7/3, 5}}: [J0,J±]=±J±, [J-,J+]=2J0 exact (equivalently [J+,J-]=-2J0 for this realization)"
    ))
}

// -------------------------------------------------------------- heun / sl(2)

fn random_rational(rng: &mut ChaCha8Rng) -> Scalar {
    r(rng.gen_range(-30..=30), rng.gen_range(1..=9))
}

fn random_combination(rng: &mut ChaCha8Rng, n: i64) -> Sl2Combination {
    let mut c = Sl2Combination::zero(r(n, 1));
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

/// Heun coefficients of a quadratic combination, from the products of the
/// generators expanded by hand:
/// `J⁺J⁺ = z⁴d² + 2(1−n)z³d + n(n−1)z²`, `J⁺J⁰ = z³d² + (1−3n/2)z²d + (n²/2)z`,
/// `J⁰J⁰ = z²d² + (1−n)zd + n²/4`, `J⁰J⁻ = zd² − (n/2)d`, `J⁻J⁻ = d²`.
fn hand_expand(c: &Sl2Combination) -> HeunCoefficients {
    let n = &c.n;
    let one = r(1, 1);
    let half = r(1, 2);
    let a = [
        c.minus_minus.clone(),
        c.zero_minus.clone(),
        c.zero_zero.clone(),
        c.plus_zero.clone(),
        c.plus_plus.clone(),
    ];
    let b3 = &(&r(2, 1) * &(&one - n)) * &c.plus_plus;
    let b2 = &(&(&one - &(&r(3, 2) * n)) * &c.plus_zero) + &c.plus;
    let b1 = &(&(&one - n) * &c.zero_zero) + &c.zero;
    let b0 = &c.minus - &(&(&half * n) * &c.zero_minus);
    let c2 = &(n * &(n - &one)) * &c.plus_plus;
    let c1 = &(&(&half * &(n * n)) * &c.plus_zero) - &(n * &c.plus);
    let c0 = &(&(&(&(n * n) / &r(4, 1)) * &c.zero_zero) - &(&(&half * n) * &c.zero)) + &c.constant;
    HeunCoefficients::new(&Field::Rational, a, [b0, b1, b2, b3], [c0, c1, c2]).unwrap()
}

fn random_heun(rng: &mut ChaCha8Rng, n: i64, violate: bool) -> HeunCoefficients {
    let v: Vec<Scalar> = (0..9).map(|_| random_rational(rng)).collect();
    let nn = r(n, 1);
    let n1 = r(n - 1, 1);
    let a = [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone()];
    let mut b3 = -(&(&r(2, 1) * &n1) * &a[4]);
    let mut c2 = &(&nn * &n1) * &a[4];
    let mut c1 = -(&nn * &(&(&n1 * &a[3]) + &v[7]));
    if violate {
        let kick = r(rng.gen_range(1..=20) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=7));
        match rng.gen_range(0..3) {
            0 => b3 = &b3 + &kick,
            1 => c2 = &c2 + &kick,
            _ => c1 = &c1 + &kick,
        }
    }
    HeunCoefficients::new(&Field::Rational, a, [v[5].clone(), v[6].clone(), v[7].clone(), b3], [v[8].clone(), c1, c2])
        .unwrap()
}

fn c2_proposition_both_directions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51_2024);
    let zero = r(0, 1);
    for n in 0..=6i64 {
        let nn = r(n, 1);
        for i in 0..200 {
            let c = random_combination(&mut rng, n);
            let composed = sl2_compose(&c).map_err(e2s)?;
            let hand = hand_expand(&c);
            ensure(composed == hand.to_operator(), || format!("(a) n={n} sample {i}: expansion differs from hand oracle"))?;
            let res = algebraization_residuals(&hand, &nn).map_err(e2s)?;
            ensure(res.iter().all(|x| *x == zero), || format!("(a) n={n} sample {i}: residuals {res:?}"))?;
        }
        for i in 0..200 {
            let h = random_heun(&mut rng, n, false);
            let c = sl2_decompose_quadratic(&h, &nn).map_err(|e| format!("(b) n={n} sample {i}: {e}"))?;
            ensure(hand_expand(&c) == h, || format!("(b) n={n} sample {i}: round trip differs"))?;
            // read-off coefficients: A₊ = (3n−2)/2·a₃ + b₂, A₀ = (n−1)a₂ + b₁, A₋ = (n/2)a₁ + b₀
            let a_plus = &(&r(3 * n - 2, 2) * h.a(3)) + h.b(2);
            let a_zero = &(&r(n - 1, 1) * h.a(2)) + h.b(1);
            let a_minus = &(&r(n, 2) * h.a(1)) + h.b(0);
            ensure(c.plus == a_plus && c.zero == a_zero && c.minus == a_minus, || {
                format!("(b) n={n} sample {i}: linear coefficients differ")
            })?;
        }
        for i in 0..200 {
            let h = random_heun(&mut rng, n, true);
            ensure(matches!(sl2_decompose_quadratic(&h, &nn), Err(Sl2Error::NotAlgebraizable { .. })), || {
                format!("(c) n={n} sample {i}: violating operator accepted")
            })?;
        }
    }
    Ok("n = 0..6 × 200 samples each: expansions algebraize, admissible operators round-trip, violators rejected".into())
}

// ---------------------------------------------------------------------- rabi

fn rabi(g: &Scalar, drive: &Scalar, branch: Branch) -> Model {
    Model::new(ModelKind::Rabi, ModelParams::driven_rabi(r(1, 1), g.clone(), r(1, 1), drive.clone(), branch)).unwrap()
}

const RABI_G: [(i64, i64); 3] = [(1, 5), (1, 3), (1, 2)];
const RABI_DRIVE: [(i64, i64); 2] = [(0, 1), (1, 8)];

/// The eliminated Rabi operator at `ω = 1` written out by hand:
/// `X = z² − g²`, `Y = ∓2gz² + (1 − 2g² − 2E)z ± g(2s − 1)` with
/// `s = g² ∓ δ` on the minus/plus branch, and `Z = ±2g(s + E)z + E² − s²`.
fn rabi_hand_operator(g: &Scalar, d: &Scalar, e: &Scalar, branch: Branch) -> LinearDiffOp {
    let one = r(1, 1);
    let two = r(2, 1);
    let g2 = g * g;
    let (sgn, s) = match branch {
        Branch::Minus => (one.clone(), &g2 - d),
        Branch::Plus => (-&one, &g2 + d),
    };
    let x = [-&g2, r(0, 1), one.clone()];
    let y = [
        &(&sgn * g) * &(&(&two * &s) - &one),
        &(&one - &(&two * &g2)) - &(&two * e),
        -(&(&two * g) * &sgn),
    ];
    let z = [&(e * e) - &(&s * &s), &(&(&two * g) * &sgn) * &(&s + e)];
    op(&Field::Rational, &[&z, &y, &x])
}

fn c3_rabi_pipeline() -> Outcome {
    let zero = r(0, 1);
    let mut count = 0;
    for (gn, gd) in RABI_G {
        for (dn, dd) in RABI_DRIVE {
            let (g, d) = (r(gn, gd), r(dn, dd));
            for branch in [Branch::Minus, Branch::Plus] {
                let m = rabi(&g, &d, branch);
                for n in 0..=4usize {
                    let tag = format!("g={g} δ={d} {branch} n={n}");
                    // E = n − g² ± δ
                    let e = match branch {
                        Branch::Minus => &(&r(n as i64, 1) - &(&g * &g)) + &d,
                        Branch::Plus => &(&r(n as i64, 1) - &(&g * &g)) - &d,
                    };
                    ensure(m.exceptional_energy(n) == e, || format!("{tag}: energy {}", m.exceptional_energy(n)))?;
                    let el = m.spectral_operator(&e).map_err(e2s)?;
                    ensure(el.target_sign == 1, || format!("{tag}: target sign"))?;
                    ensure(el.operator == rabi_hand_operator(&g, &d, &e, branch), || format!("{tag}: elimination"))?;
                    ensure(el.operator == m.closed_form_operator(&e).map_err(e2s)?, || format!("{tag}: closed form"))?;
                    let h = HeunCoefficients::from_operator(&el.operator).map_err(e2s)?;
                    let nn = r(n as i64, 1);
                    let res = algebraization_residuals(&h, &nn).map_err(e2s)?;
                    ensure(res.iter().all(|x| *x == zero), || format!("{tag}: residuals {res:?}"))?;
                    let c = sl2_decompose_quadratic(&h, &nn).map_err(|e| format!("{tag}: {e}"))?;
                    ensure(hand_expand(&c) == h, || format!("{tag}: round trip"))?;
                    // structure of the combination: A₊₊ = A₊₀ = 0, A₀₀ = ω², A₋₋ = −g², A₊ = ∓2gω
                    let sgn = if branch == Branch::Minus { r(-2, 1) } else { r(2, 1) };
                    ensure(
                        c.plus_plus == zero
                            && c.plus_zero == zero
                            && c.zero_minus == zero
                            && c.zero_zero == r(1, 1)
                            && c.minus_minus == -(&g * &g)
                            && c.plus == &sgn * &g,
                        || format!("{tag}: combination {c:?}"),
                    )?;
                    // the operator at a shifted energy is not algebraizable at this n (g ≠ 0)
                    let shifted = m.spectral_operator(&(&e + &r(1, 3))).map_err(e2s)?.operator;
                    let hs = HeunCoefficients::from_operator(&shifted).map_err(e2s)?;
                    ensure(sl2_decompose_quadratic(&hs, &nn).is_err(), || format!("{tag}: shifted energy accepted"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} cases: elimination = closed form, residuals zero, round trip exact"))
}

fn c4_juddian_constraint() -> Outcome {
    let mut count = 0;
    for k in 1..=20i64 {
        let g = r(k, 41);
        let m = rabi(&g, &r(0, 1), Branch::Minus);
        let cp = constraint_polynomial(&m, 1).map_err(e2s)?;
        let g2 = &g * &g;
        // M₁ at ω = 1: [[1 − 2g², 2g³ − g], [2g, −2g²]]
        let hand = [[&r(1, 1) - &(&r(2, 1) * &g2), &(&r(2, 1) * &(&g2 * &g)) - &g], [&r(2, 1) * &g, &r(-2, 1) * &g2]];
        for (i, row) in hand.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                ensure(cp.matrix.get(i, j) == v, || format!("g={g}: M[{i}][{j}] = {}", cp.matrix.get(i, j)))?;
            }
        }
        // λ² − (1 − 4g²)λ
        let expected = Polynomial::new(vec![r(0, 1), -(&r(1, 1) - &(&r(4, 1) * &g2)), r(1, 1)]).unwrap();
        ensure(cp.poly == expected, || format!("g={g}: constraint {}", cp.poly))?;
        let (roots, rest) = cp.exact_roots().map_err(e2s)?;
        ensure(rest.degree() == Some(0), || format!("g={g}: roots not all rational"))?;
        let mut got: Vec<Scalar> = roots.iter().flat_map(|x| vec![x.value.clone(); x.multiplicity]).collect();
        let mut want = vec![r(0, 1), &r(1, 1) - &(&r(4, 1) * &g2)];
        let key = |s: &Scalar| s.to_f64();
        got.sort_by(|a, b| key(a).total_cmp(&key(b)));
        want.sort_by(|a, b| key(a).total_cmp(&key(b)));
        ensure(got == want, || format!("g={g}: roots {got:?}"))?;
        count += 1;
    }
    Ok(format!("{count} couplings g = k/41: roots {{0, ω² − 4g²}} exactly"))
}

fn c5_oracle_cross_check() -> Outcome {
    let f = Scalar::Float;
    let m = Model::new(ModelKind::Rabi, ModelParams::rabi(f(1.0), f(0.3), f(0.8))).map_err(e2s)?;
    let nearest = |n: usize| -> Result<f64, String> {
        let s = spectrum(&build_fock_matrix(&m, n).map_err(e2s)?).map_err(e2s)?;
        Ok(s.into_iter().min_by(|a, b| (a - 0.91).abs().total_cmp(&(b - 0.91).abs())).unwrap())
    };
    let (e60, e80) = (nearest(60)?, nearest(80)?);
    ensure((e80 - 0.91).abs() < 1e-8, || format!("N=80 nearest {e80}"))?;
    ensure((e80 - e60).abs() < 1e-9, || format!("drift 60→80 {}", (e80 - e60).abs()))?;
    let rep = locate_level(&m, 0.91, &[60, 80], 1e-8).map_err(e2s)?;
    ensure(matches!(rep.verdict, LevelVerdict::Converged { truncation: 80, .. }), || format!("{:?}", rep.verdict))?;
    let full = locate_level(&m, 0.91, &DEFAULT_SCHEDULE, 1e-8).map_err(e2s)?;
    ensure(matches!(full.verdict, LevelVerdict::Converged { .. }), || format!("default schedule {:?}", full.verdict))?;
    let off = m.with_delta_level(f(0.84)).map_err(e2s)?;
    let rep = locate_level(&off, 0.91, &DEFAULT_SCHEDULE, 1e-8).map_err(e2s)?;
    ensure(rep.verdict == LevelVerdict::NotFound, || format!("Δ=0.84: {:?}", rep.verdict))?;
    Ok(format!(
        "|E80 − 0.91| = {:.1e}, drift 60→80 = {:.1e}; Δ = 0.84 NotFound",
        (e80 - 0.91).abs(),
        (e80 - e60).abs()
    ))
}

// ------------------------------------------------------------------ su(1,1)

/// Apply `Σ coef · word` with every generator word applied right to left,
/// never composing operators.
fn act(c: &Sl2Combination, p: &Polynomial) -> Polynomial {
    let [jp, j0, jm] = hand_generators(&c.n);
    let word = |w: &[&LinearDiffOp]| w.iter().rev().fold(p.clone(), |acc, g| g.apply(&acc).unwrap());
    let mut terms: Vec<(&Scalar, Polynomial)> = vec![
        (&c.plus_plus, word(&[&jp, &jp])),
        (&c.plus_zero, word(&[&jp, &j0])),
        (&c.zero_zero, word(&[&j0, &j0])),
        (&c.zero_minus, word(&[&j0, &jm])),
        (&c.minus_minus, word(&[&jm, &jm])),
        (&c.plus, word(&[&jp])),
        (&c.zero, word(&[&j0])),
        (&c.minus, word(&[&jm])),
        (&c.constant, p.clone()),
    ];
    if let Some(q) = &c.quartic {
        terms.push((&q.plus_minus3, word(&[&jp, &jm, &jm, &jm])));
        terms.push((&q.plus_minus2, word(&[&jp, &jm, &jm])));
        terms.push((&q.zero_minus2, word(&[&j0, &jm, &jm])));
    }
    terms
        .into_iter()
        .fold(Polynomial::zero(), |acc, (k, t)| acc.try_add(&t.try_scale(k).unwrap()).unwrap())
}

/// The decomposition must reproduce `h` on `1, z, …, z⁶`, which fixes an
/// operator of order ≤ 4.
fn check_quartic(m: &Model, n: usize, tag: &str) -> Result<(), String> {
    let f = m.field().clone();
    let e = m.exceptional_energy(n);
    let el = m.spectral_operator(&e).map_err(e2s)?;
    ensure(el.target_sign == -1, || format!("{tag}: target sign"))?;
    ensure(el.operator == m.closed_form_operator(&e).map_err(e2s)?, || format!("{tag}: elimination vs closed form"))?;
    let c = sl2_decompose_quartic(&el.operator, &f.from_int(n as i64)).map_err(|e| format!("{tag}: {e}"))?;
    ensure(c.quartic.is_some(), || format!("{tag}: no quartic part"))?;
    ensure(sl2_compose(&c).map_err(e2s)? == el.operator, || format!("{tag}: round trip"))?;
    for k in 0..=6 {
        let p = z_pow(&f, k);
        ensure(act(&c, &p) == el.operator.apply(&p).map_err(e2s)?, || format!("{tag}: generator action on z^{k}"))?;
    }
    ensure(el.operator.preserves_space(n), || format!("{tag}: invariant space"))?;
    let shifted = m.spectral_operator(&(&e + &f.from_ratio(1, 7))).map_err(e2s)?.operator;
    ensure(
        matches!(sl2_decompose_quartic(&shifted, &f.from_int(n as i64)), Err(Sl2Error::NotAlgebraizable { .. })),
        || format!("{tag}: shifted energy accepted"),
    )?;
    Ok(())
}

fn identities_hold(max_n: i64) -> Result<(), String> {
    let f = Field::Rational;
    for n in 0..=max_n {
        let nn = r(n, 1);
        let [jp, j0, jm] = hand_generators(&nn);
        let m2 = jm.compose(&jm).unwrap();
        let m3 = m2.compose(&jm).unwrap();
        let term = |k, o| LinearDiffOp::term(z_pow(&f, k), o);
        let sum = |a: LinearDiffOp, b: LinearDiffOp| a.try_add(&b).unwrap();
        ensure(term(2, 4) == sum(jp.compose(&m3).unwrap(), term(1, 3).try_scale(&nn).unwrap()), || {
            format!("z²d⁴ identity at n={n}")
        })?;
        ensure(term(2, 3) == sum(jp.compose(&m2).unwrap(), term(1, 2).try_scale(&nn).unwrap()), || {
            format!("z²d³ identity at n={n}")
        })?;
        ensure(term(1, 3) == sum(j0.compose(&m2).unwrap(), term(0, 2).try_scale(&r(n, 2)).unwrap()), || {
            format!("zd³ identity at n={n}")
        })?;
    }
    Ok(())
}

fn two_photon(g: Scalar, q: Scalar) -> Model {
    Model::new(ModelKind::TwoPhoton, ModelParams::two_photon(r(1, 1), g, r(1, 2), q)).unwrap()
}

fn two_mode(g: Scalar, k: Scalar) -> Model {
    Model::new(ModelKind::TwoMode, ModelParams::two_mode(r(1, 1), g, r(1, 2), k)).unwrap()
}

fn c6_two_photon() -> Outcome {
    identities_hold(8)?;
    for q in [r(1, 4), r(3, 4)] {
        let m = two_photon(r(3, 10), q.clone());
        ensure(m.field() == &Field::Rational, || "Ω = 4/5 should keep the model rational".into())?;
        for n in 0..=3usize {
            // E = −1/2 + [2n + 2(q − 1/4) + 1/2]·(4/5)
            let bracket = &(&r(2 * n as i64, 1) + &(&r(2, 1) * &(&q - &r(1, 4)))) + &r(1, 2);
            let e = &r(-1, 2) + &(&bracket * &r(4, 5));
            ensure(m.exceptional_energy(n) == e, || format!("q={q} n={n}: E = {}", m.exceptional_energy(n)))?;
            check_quartic(&m, n, &format!("2photon q={q} n={n}"))?;
        }
    }
    ensure(two_photon(r(3, 10), r(1, 4)).exceptional_energy(0) == r(-1, 10), || "E ≠ −1/10".into())?;
    // g = 1/5: Ω = √(21/25) is irrational
    let m = two_photon(r(1, 5), r(1, 4));
    for n in 0..=2usize {
        let e = Scalar::quad(rat(-1, 2), rat(4 * n as i64 + 1, 2), rat(21, 25));
        ensure(m.exceptional_energy(n) == e, || format!("Ω irrational n={n}: E = {}", m.exceptional_energy(n)))?;
        check_quartic(&m, n, &format!("2photon g=1/5 n={n}"))?;
    }
    Ok("identities n ≤ 8; q ∈ {1/4, 3/4}, n ≤ 3 in Q (Ω = 4/5) and n ≤ 2 in Q(√21/5); E(q=1/4, n=0) = −1/10".into())
}

fn c7_two_mode() -> Outcome {
    identities_hold(8)?;
    let mut probes = Vec::new();
    for k in [r(1, 2), r(1, 1)] {
        let m = two_mode(r(3, 5), k.clone());
        for n in 0..=3usize {
            // E = −1 + [2n + 2(κ − 1/2) + 1]·(4/5)
            let bracket = &(&r(2 * n as i64, 1) + &(&r(2, 1) * &(&k - &r(1, 2)))) + &r(1, 1);
            let e = &r(-1, 1) + &(&bracket * &r(4, 5));
            ensure(m.exceptional_energy(n) == e, || format!("κ={k} n={n}: E = {}", m.exceptional_energy(n)))?;
            check_quartic(&m, n, &format!("2mode κ={k} n={n}"))?;
        }
        // oracle at every real Δ of the n = 1 constraint (λ = −Δ²)
        let cp = constraint_polynomial(&m, 1).map_err(e2s)?;
        let e = cp.energy.to_f64();
        let lambdas: Vec<f64> = cp.numeric_roots().iter().filter(|x| x.is_real() && x.re <= 1e-12).map(|x| x.re).collect();
        ensure(!lambdas.is_empty(), || format!("κ={k}: no real Δ"))?;
        for lam in lambdas {
            let delta = (-lam).max(0.0).sqrt();
            let fm = Model::new(
                ModelKind::TwoMode,
                ModelParams::two_mode(Scalar::Float(1.0), Scalar::Float(0.6), Scalar::Float(delta), Scalar::Float(k.to_f64())),
            )
            .map_err(e2s)?;
            let rep = locate_level(&fm, e, &[100, 120], 1e-7).map_err(e2s)?;
            match rep.verdict {
                LevelVerdict::Converged { energy, truncation: 120 } if (energy - e).abs() < 1e-7 => {
                    probes.push(format!("κ={k} Δ={delta:.6}: |ΔE| = {:.1e}", (energy - e).abs()))
                }
                v => return Err(format!("κ={k} Δ={delta}: {v:?} at E={e}")),
            }
        }
    }
    ensure(two_mode(r(3, 5), r(1, 2)).exceptional_energy(0) == r(-1, 5), || "E ≠ −1/5".into())?;
    Ok(format!("κ ∈ {{1/2, 1}}, n ≤ 3 exact; oracle at N=120: {}", probes.join(", ")))
}

fn c8_su11_realizations() -> Outcome {
    let mut worst: f64 = 0.0;
    for (kind, idx) in [
        (ModelKind::TwoPhoton, r(1, 4)),
        (ModelKind::TwoPhoton, r(3, 4)),
        (ModelKind::TwoMode, r(1, 2)),
        (ModelKind::TwoMode, r(1, 1)),
        (ModelKind::TwoMode, r(3, 2)),
    ] {
        let f = Field::Rational;
        let zero = r(0, 1);
        let one = r(1, 1);
        // two-photon: K₀ = zd + q, K₊ = z/2, K₋ = 2zd² + 4qd
        // two-mode:   K₀ = zd + κ, K₊ = z,   K₋ = zd² + 2κd
        let (sp, sm) = if kind == ModelKind::TwoPhoton { (r(1, 2), r(2, 1)) } else { (r(1, 1), r(1, 1)) };
        let k0 = op(&f, &[&[idx.clone()], &[zero.clone(), one.clone()]]);
        let kp = op(&f, &[&[zero.clone(), sp]]);
        let km = op(&f, &[&[], &[&(&r(2, 1) * &idx) * &sm], &[zero.clone(), sm]]);
        let k = su11_realization(kind, &idx).map_err(e2s)?;
        ensure(k.zero == k0 && k.plus == kp && k.minus == km, || format!("{kind} {idx}: realization differs"))?;
        let com = |a: &LinearDiffOp, b: &LinearDiffOp| a.commutator(b).unwrap();
        ensure(com(&k0, &kp) == kp, || format!("{kind} {idx}: [K0,K+]"))?;
        ensure(com(&k0, &km) == km.neg(), || format!("{kind} {idx}: [K0,K-]"))?;
        ensure(com(&kp, &km) == k0.try_scale(&r(-2, 1)).unwrap(), || format!("{kind} {idx}: [K+,K-]"))?;
        let value = &idx * &(&one - &idx);
        let cas = kp.compose(&km).unwrap().try_sub(&k0.compose(&k0.try_sub(&LinearDiffOp::scalar(one.clone())).unwrap()).unwrap()).unwrap();
        ensure(cas == LinearDiffOp::scalar(value.clone()), || format!("{kind} {idx}: casimir {cas}"))?;

        let n = 40;
        let s = Su11Matrices::new(idx.to_f64(), n);
        let inner = n - 1;
        let block = |m: nalgebra::DMatrix<f64>| leading_block(&m, inner);
        let c = |a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>| a * b - b * a;
        let pairs = [
            (block(c(&s.zero, &s.plus)), block(s.plus.clone())),
            (block(c(&s.zero, &s.minus)), block(-s.minus.clone())),
            (block(c(&s.plus, &s.minus)), block(-2.0 * s.zero.clone())),
            (
                block(s.casimir()),
                nalgebra::DMatrix::identity(inner, inner) * value.to_f64(),
            ),
        ];
        for (lhs, rhs) in pairs {
            let err = (lhs - rhs).abs().max();
            worst = worst.max(err);
            ensure(err <= 1e-12, || format!("{kind} {idx}: matrix relation off by {err:e}"))?;
        }
    }
    Ok(format!("differential realizations exact; truncated matrices within {worst:.1e} on interior blocks"))
}

fn c9_eigenfunction_residuals() -> Outcome {
    let mut models: Vec<(Model, usize)> = Vec::new();
    for (gn, gd) in RABI_G {
        for (dn, dd) in RABI_DRIVE {
            for b in [Branch::Minus, Branch::Plus] {
                models.push((rabi(&r(gn, gd), &r(dn, dd), b), 4));
            }
        }
    }
    for q in [r(1, 4), r(3, 4)] {
        models.push((two_photon(r(3, 10), q.clone()), 3));
    }
    models.push((two_photon(r(1, 5), r(1, 4)), 2));
    for k in [r(1, 2), r(1, 1)] {
        models.push((two_mode(r(3, 5), k), 3));
    }
    let mut solutions = 0;
    let mut companions = 0;
    for (m, max_n) in &models {
        for n in 0..=*max_n {
            let cp = constraint_polynomial(m, n).map_err(e2s)?;
            let (roots, _) = cp.exact_roots().map_err(e2s)?;
            for root in roots {
                let delta_sq = if cp.target_sign < 0 { -&root.value } else { root.value.clone() };
                let tag = format!("{} {} n={n} Δ²={delta_sq}", m.kind(), m.branch());
                let sols = eigenpolynomials(m, n, &delta_sq).map_err(|e| format!("{tag}: {e}"))?;
                ensure(!sols.is_empty(), || format!("{tag}: no solution"))?;
                for s in sols {
                    let res = verify_solution(m, &s.energy, &delta_sq, &s.phi).map_err(e2s)?;
                    ensure(res.is_zero(), || format!("{tag}: residual {res}"))?;
                    ensure(s.phi.degree().is_some_and(|d| d <= n), || format!("{tag}: degree"))?;
                    let sys = m.gauged_system(&s.energy).map_err(e2s)?;
                    let (r1, r2) = sys.scaled_residuals(s.keep, &s.phi, &s.scaled_companion, &delta_sq).map_err(e2s)?;
                    ensure(r1.is_zero() && r2.is_zero(), || format!("{tag}: coupled residuals {r1}, {r2}"))?;
                    if s.companion.is_some() {
                        companions += 1;
                    }
                    solutions += 1;
                }
            }
        }
    }
    Ok(format!("{solutions} exact solutions ({companions} with Δ in the field): every residual identically zero"))
}

fn c10_sweep_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e2s)?;
    let run = |jobs: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let out = dir.path().join(format!("sweep{jobs}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_qes"))
            .args(["sweep", "--model", "rabi", "--omega", "1", "--delta", "0.8", "--g-range", "0..0.5", "--n", "0..3"])
            .args(["--points", "101", "--levels", "8", "--truncation", "60", "--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .map_err(e2s)?;
        ensure(status.success(), || format!("--jobs {jobs}: {status}"))?;
        let markers = out.with_file_name(format!("sweep{jobs}.markers.csv"));
        Ok((fs::read(&out).map_err(e2s)?, fs::read(markers).map_err(e2s)?))
    };
    let (s1, m1) = run("1")?;
    let (s8, m8) = run("8")?;
    ensure(s1 == s8, || "spectrum files differ".into())?;
    ensure(m1 == m8, || "marker files differ".into())?;
    let markers = String::from_utf8(m1).map_err(e2s)?;
    ensure(markers.lines().any(|l| l == "0.3,1,0.91"), || format!("Juddian marker missing:\n{markers}"))?;
    Ok(format!("{} spectrum bytes and {} marker bytes identical for --jobs 1 and 8", s1.len(), markers.len()))
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, title: "sl(2) commutation relations", budget: secs(1), run: c1_sl2_relations },
        Criterion { id: 2, title: "algebraization: both directions", budget: secs(10), run: c2_proposition_both_directions },
        Criterion { id: 3, title: "driven Rabi pipeline", budget: secs(5), run: c3_rabi_pipeline },
        Criterion { id: 4, title: "Juddian constraint n = 1", budget: secs(1), run: c4_juddian_constraint },
        Criterion { id: 5, title: "Fock oracle cross-check", budget: secs(30), run: c5_oracle_cross_check },
        Criterion { id: 6, title: "two-photon quartic algebraization", budget: secs(10), run: c6_two_photon },
        Criterion { id: 7, title: "two-mode quartic algebraization + oracle", budget: secs(60), run: c7_two_mode },
        Criterion { id: 8, title: "su(1,1) realizations", budget: secs(5), run: c8_su11_realizations },
        Criterion { id: 9, title: "eigenfunction residuals", budget: None, run: c9_eigenfunction_residuals },
        Criterion { id: 10, title: "sweep determinism across --jobs", budget: None, run: c10_sweep_determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let budget = c.budget.map_or("none".to_string(), |b| format!("{}s", b.as_secs()));
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {:>2}: {} [{:.2}s, budget {budget}] {detail}", c.id, c.title, elapsed.as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
