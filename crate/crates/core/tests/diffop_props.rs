mod common;

use common::*;
use proptest::prelude::*;
use qes_core::diffop::LinearDiffOp;
use qes_core::polyalg::{Field, Polynomial, Scalar};
use qes_core::sl2rep::sl2_generators;

/// Operators whose `d^k` coefficient has degree at most `k`.
fn degree_preserving(max_order: usize) -> impl Strategy<Value = LinearDiffOp> {
    prop::collection::vec(prop::collection::vec(rational(), 3), 1..=max_order + 1).prop_map(|rows| {
        let coeffs = rows
            .into_iter()
            .enumerate()
            .map(|(k, cs)| Polynomial::new(cs.into_iter().take(k + 1).collect()).unwrap())
            .collect();
        LinearDiffOp::new(coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn compose_acts_as_composition(a in diffop(3, 3), b in diffop(3, 3), p in poly(6)) {
        let lhs = a.compose(&b).unwrap().apply(&p).unwrap();
        let rhs = a.apply(&b.apply(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compose_is_associative(a in diffop(2, 2), b in diffop(2, 2), c in diffop(2, 2)) {
        let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
        let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi(a in diffop(2, 2), b in diffop(2, 2), c in diffop(2, 2)) {
        let t1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
        let t2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
        let t3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
        prop_assert!(t1.try_add(&t2).unwrap().try_add(&t3).unwrap().is_zero());
    }

    #[test]
    fn restriction_is_multiplicative(a in degree_preserving(3), b in degree_preserving(3), n in 0usize..6) {
        let ab = a.compose(&b).unwrap();
        prop_assert!(a.preserves_space(n) && b.preserves_space(n) && ab.preserves_space(n));
        let lhs = ab.restriction_matrix(n).unwrap();
        let rhs = a.restriction_matrix(n).unwrap().try_mul(&b.restriction_matrix(n).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauge_shift_conjugates(a in diffop(2, 2), p in poly(4), k in -5i64..=5) {
        // e^{−αz} L e^{αz}: check on polynomials through the Leibniz rule with
        // α = k/3 by comparing against the shifted derivative d + α
        let alpha = r(k, 3);
        let f = Field::Rational;
        let shifted_d = LinearDiffOp::derivative(&f, 1).try_add(&LinearDiffOp::scalar(alpha.clone())).unwrap();
        let mut expected = LinearDiffOp::zero();
        let mut power = LinearDiffOp::scalar(f.one());
        for c in a.coeffs() {
            expected = expected.try_add(&LinearDiffOp::multiplication(c.clone()).compose(&power).unwrap()).unwrap();
            power = shifted_d.compose(&power).unwrap();
        }
        let got = a.gauge_shift(&alpha).unwrap();
        prop_assert_eq!(got.apply(&p).unwrap(), expected.apply(&p).unwrap());
    }
}

#[test]
fn generator_identities_for_small_n() {
    let f = Field::Rational;
    let d = |k| LinearDiffOp::derivative(&f, k);
    for n in 0..=8 {
        let nn = Scalar::int(n);
        let g = sl2_generators(&nn);
        let m2 = g.minus.compose(&g.minus).unwrap();
        let m3 = m2.compose(&g.minus).unwrap();
        // z²d⁴ = J⁺(J⁻)³ + n z d³
        let lhs = LinearDiffOp::term(z_pow(2), 4);
        let rhs = g.plus.compose(&m3).unwrap().try_add(&LinearDiffOp::term(z_pow(1).try_scale(&nn).unwrap(), 3)).unwrap();
        assert_eq!(lhs, rhs, "first identity at n = {n}");
        // z²d³ = J⁺(J⁻)² + n z d²
        let lhs = LinearDiffOp::term(z_pow(2), 3);
        let rhs = g.plus.compose(&m2).unwrap().try_add(&LinearDiffOp::term(z_pow(1).try_scale(&nn).unwrap(), 2)).unwrap();
        assert_eq!(lhs, rhs, "second identity at n = {n}");
        // z d³ = J⁰(J⁻)² + (n/2) d²
        let lhs = LinearDiffOp::term(z_pow(1), 3);
        let rhs = g.zero.compose(&m2).unwrap().try_add(&d(2).try_scale(&r(n, 2)).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "third identity at n = {n}");
    }
}

#[test]
fn raising_degree_breaks_invariance() {
    let f = Field::Rational;
    let g = sl2_generators(&Scalar::int(3));
    assert!(g.plus.preserves_space(3));
    assert!(!g.plus.preserves_space(2));
    assert!(!LinearDiffOp::multiplication(z_pow(1)).preserves_space(4));
    assert!(LinearDiffOp::derivative(&f, 2).preserves_space(0));
    assert!(sl2_generators(&Scalar::int(2)).plus.restriction_matrix(3).is_err());
}
