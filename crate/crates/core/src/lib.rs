//! Two-step nilpotent Lie algebras: Pfaffian forms, moment maps and
//! nilsolitons, invariants of ternary quartics, the type-(2, m) pencil
//! classification, and derivation algebras.

pub mod algebra;
pub mod catalog;
pub mod derivations;
pub mod error;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod nilsoliton;
pub mod pencil;
pub mod polynomials;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarKind, Q};
