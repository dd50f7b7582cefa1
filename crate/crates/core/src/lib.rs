//! Spectra of positive-definite Jacobi matrices whose inverse is trace class.
//!
//! The spectrum is located as the zero set of the characteristic function
//! `F(z) = 1 - z sum_n w_n(0) P_n(z)`, where `P_n` are the orthonormal
//! polynomials of the matrix and `w_n` its functions of the second kind.
//! `F` is evaluated with a certified truncation bound, its sign changes are
//! bracketed with finite-section eigenvalues and refined by bisection.
//!
//! Modules, bottom-up:
//!
//! - [`source`]: coefficient families (Al-Salam–Carlitz II, explicit tables)
//! - [`recurrence`], [`green`]: polynomial recurrences and the Green matrix
//! - [`second_kind`]: `w_n`, the Weyl function, `kappa_n` and `tr J^{-1}`
//! - [`charfn`]: `F(z)` by partial sums and by the ratio limit
//! - [`spectrum`]: zero finding and the truncated-matrix oracle
//! - [`qseries`]: q-Pochhammer symbols, basic hypergeometric sums and the
//!   closed forms of the ASC-II family
//! - [`identities`]: grid driver for the q-series identity checks
//! - [`verify`]: the identity suite driven by the command-line `verify`

pub mod charfn;
pub mod error;
pub mod green;
pub mod identities;
pub mod precision;
pub mod qseries;
pub mod recurrence;
pub mod scaled;
pub mod second_kind;
pub mod source;
pub mod spectrum;
pub mod tail;
pub mod verify;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use source::{CoefficientSource, Family};
