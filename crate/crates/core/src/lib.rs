//! Hidden `sl(2)` algebraization of Heun-type differential operators and the
//! quasi-exact spectra of the driven, two-photon and two-mode Rabi models.
//!
//! Everything here is pure computation over [`polyalg::Scalar`] values and
//! needs only `alloc`. File formats, the command line and parallel sweeps
//! live in the `qes` crate.

#![no_std]

extern crate alloc;

pub mod diffop;
pub mod fockoracle;
pub mod models;
pub mod polyalg;
pub mod qes;
pub mod sl2rep;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
