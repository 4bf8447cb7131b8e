//! Exact sum-product toolkit over the rationals.
//!
//! Everything in this crate is computed with arbitrary-precision rationals
//! and unbounded integers. Floating point appears only in fields explicitly
//! labelled as approximate (report columns, exponent fits). The one place it
//! touches a decision is the logarithm filter in
//! [`exact::PowerProduct::cmp_exact`], which only answers when the margin
//! exceeds the rounding error by about six orders of magnitude and otherwise
//! falls back to exact powering.
//!
//! Layout:
//! - [`scalar`] and [`set`]: exact scalars, canonical finite sets and the
//!   elementary set arithmetic (A+B, AB, A/B, slices `A ∩ λA`).
//! - [`energy`]: representation functions, additive/multiplicative energies,
//!   third moments, linear-equation counts and the energy subadditivity check.
//! - [`certificates`]: symmetry sets and upper-bound certificates for the
//!   Szemerédi–Trotter parameter.
//! - [`szt`]: incidence counting and empirical level-set scans.
//! - [`decompose`]: dyadic pigeonhole extraction and the iterative low-energy
//!   decompositions.
//! - [`tracer`]: proof-pipeline replays and the exact inequality suite.
//! - [`generators`]: deterministic set families.
//! - [`growth`]: log-log fits of `max{|A+A|, |AA|}` against `|A|`.
//! - [`report`]: versioned JSON records.

pub mod certificates;
pub mod decompose;
pub mod energy;
pub mod error;
pub mod exact;
pub mod generators;
pub mod growth;
pub mod report;
pub mod scalar;
pub mod set;
pub mod szt;
pub mod tracer;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use set::RatSet;
