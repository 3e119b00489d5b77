//! Regularized theta lifts for orthogonal groups of signature (2, n) over
//! totally real number fields.
//!
//! The crate covers the whole computational chain: exact number field and
//! lattice arithmetic, discriminant groups and the Weil representation,
//! Siegel theta functions with rigorous truncation, harmonic Whittaker forms,
//! and the automorphic Green functions obtained from them by a regularized
//! theta lift.

pub mod domain;
pub mod error;
pub mod examples;
pub mod field;
pub mod green;
pub mod lattice;
pub mod par;
pub mod qmat;
pub mod specfun;
pub mod theta;
pub mod weilrep;
pub mod whittaker;

pub use error::{Error, Result};
