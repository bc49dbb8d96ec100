//! Index-set calculus, heat-trace models and eta/rho invariants for
//! Dirac-type operators on spaces with edge singularities.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod eta;
pub mod geometry;
pub mod heat;
pub mod index;
pub mod io;
pub mod quad;
pub mod special;
pub mod spectra;
