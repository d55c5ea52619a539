//! Superselection structure of finite-dimensional observable algebras.
//!
//! Modules build on each other: [`kernel`] provides matrices and
//! decompositions, [`algebra`] generates algebras and commutants,
//! [`sectors`] splits the space into superselection sectors, [`way`] checks
//! measurements against conserved additive charges, [`projective`] handles
//! multipliers of finite-group representations, and [`channels`] covers
//! CPTP maps and covariance. [`cli`] is the `ssrlab` binary.
//!
//! ```
//! use ssrlab::algebra::corpus::ampliation;
//! use ssrlab::algebra::dirac_check;
//!
//! let report = dirac_check(&ampliation(2, 2), 0).unwrap();
//! assert!(!report.commutant_abelian);
//! assert!(report.sides_agree());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod channels;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod projective;
pub mod sectors;
pub mod way;

pub use error::{Error, Result};
