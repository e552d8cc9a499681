//! Numerical verification engine for the spectral and dynamical zeta
//! functions of suspended hyperbolic toral automorphisms.
//!
//! The spectral side computes Hurwitz-type zeta functions of the flow
//! generator by a theta-series/Mellin continuation and forms their
//! zeta-regularized determinants; the dynamical side evaluates Euler
//! products over exactly enumerated closed orbits. Independent oracles
//! (Hurwitz closed forms, rational resummations, brute-force lattice
//! enumeration) check both.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dynzeta;
pub mod error;
pub mod exec;
pub mod lefschetz;
pub mod orbits;
pub mod specfun;
pub mod spectra;
pub mod speczeta;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64;
