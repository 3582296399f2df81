use qes_core::polyalg::{format_rational, Scalar};
use qes_core::qes::NumericRoot;

/// `x` rounded to 12 significant digits, printed as the shortest decimal
/// that round-trips the rounded value; exponent form outside `[1e-6, 1e16)`.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if rounded == 0.0 {
        "0".to_string()
    } else if !(1e-6..1e16).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// Canonical text for exact scalars (a quadratic-field element with no
/// irrational part prints as its rational), [`sig12`] for floats.
pub fn scalar(x: &Scalar) -> String {
    match x {
        Scalar::Float(v) => sig12(*v),
        Scalar::Quad(_) => match x.rational_part_if_pure() {
            Some(r) => format_rational(&r),
            None => x.to_string(),
        },
        other => other.to_string(),
    }
}

pub fn complex(r: &NumericRoot) -> String {
    if r.is_real() {
        sig12(r.re)
    } else if r.im < 0.0 {
        format!("{}-{}i", sig12(r.re), sig12(-r.im))
    } else {
        format!("{}+{}i", sig12(r.re), sig12(r.im))
    }
}

pub fn join<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().collect::<Vec<_>>().join(";")
}
