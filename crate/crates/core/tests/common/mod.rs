#![allow(dead_code)]

use proptest::prelude::*;
use qes_core::diffop::LinearDiffOp;
use qes_core::polyalg::{rat, Field, Polynomial, Scalar};

pub fn r(n: i64, d: i64) -> Scalar {
    Scalar::rational(n, d)
}

pub fn rational() -> impl Strategy<Value = Scalar> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| r(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Scalar> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

/// Elements of Q(√d) for a fixed non-square `d`.
pub fn quad(d: (i64, i64)) -> impl Strategy<Value = Scalar> {
    ((-20i64..=20, 1i64..=9), (-20i64..=20, 1i64..=9))
        .prop_map(move |((a, da), (b, db))| Scalar::quad(rat(a, da), rat(b, db), rat(d.0, d.1)))
}

pub fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(rational(), 0..=max_deg + 1).prop_map(|cs| {
        if cs.is_empty() {
            Polynomial::zero()
        } else {
            Polynomial::new(cs).unwrap()
        }
    })
}

pub fn diffop(max_order: usize, max_deg: usize) -> impl Strategy<Value = LinearDiffOp> {
    prop::collection::vec(poly(max_deg), 1..=max_order + 1).prop_map(|cs| LinearDiffOp::new(cs).unwrap())
}

pub fn z_pow(k: usize) -> Polynomial {
    Polynomial::monomial(Field::Rational.one(), k)
}
