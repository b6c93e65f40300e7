pub mod arith;
pub mod artin;
pub mod error;
pub mod expr;
pub mod field;
pub mod poly;
pub mod geometry;
pub mod heuristic;
pub mod ratfunc;
pub mod verify;

pub use error::{Error, Result};
pub use field::{build_field, Elem, Extension, FiniteField, DEFAULT_CAP};
pub use poly::{enumerate_irreducibles, factor_poly, gauss_count, is_irreducible, Poly, PolyFactorization};
pub use ratfunc::{rf_make, RationalFunction, Value};
pub use artin::Subject;
pub use geometry::{FunctionOnVariety, MPoly, RationalPoint, VarietyModel};
