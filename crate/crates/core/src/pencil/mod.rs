//! Algebras of type `(2, m)` through their pencil data: block builders,
//! closed-form Pfaffians, real Mobius equivalence, nilsoliton classification
//! and degenerations.

mod classify;
mod mobius;
mod set;

pub use classify::{
    curves_family, degeneration_family, multi_parameter_family, pencil_admits_nilsoliton, Degeneration,
    NilsolitonAnswer,
};
pub use mobius::{mobius_act, pencil_isomorphic, Isomorphism, MobiusMap, MATCH_TOL};
pub use set::{
    build_pencil_algebra, is_nonsingular_pencil, pencil_pfaffian, ComplexPair, PencilSet, RealPair, RealPoint,
};
