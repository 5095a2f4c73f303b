//! Vector fitting of frequency-response data, with two structure-preserving
//! variants whose output is a modally damped second-order system
//! `H(s) = Cp (s²M + sE + K)⁻¹ Bu`.
//!
//! * [`engine::fit_vf`]: classical vector fitting, first-order pole-residue model.
//! * [`engine::fit_sovf1`]: structured numerator, first-order denominator.
//! * [`engine::fit_sovf2`]: structured numerator and denominator; support
//!   points are relocated through a quadratic eigenvalue problem.
//!
//! [`bench`] generates synthetic modally damped truth systems and samples
//! them; [`io`] holds the on-disk formats.

pub mod bench;
pub mod engine;
pub mod error;
pub mod io;
pub mod linalg;
pub mod ls;
pub mod pole_update;
pub mod transfer;
pub mod types;

pub use error::{Error, Result};
pub use num_complex::Complex64;
