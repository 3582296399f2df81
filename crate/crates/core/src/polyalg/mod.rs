//! Scalar fields, dense polynomials and matrices over them.

mod matrix;
mod poly;
mod scalar;

pub use matrix::Matrix;
pub(crate) use matrix::float_determinant;
pub use poly::Polynomial;
pub use scalar::{
    convergents, format_rational, parse_rational, rat, rational_sqrt, scalar_field_op, Field, FieldError,
    FieldOp, ParseScalarError, QuadExt, Scalar,
};
