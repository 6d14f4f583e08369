//! Exact computation with generalized C-type operators on ℓ¹(ℕ).
//!
//! Scalars are dyadic rationals with arbitrary-precision mantissas, so every
//! orbit, norm and certificate in this crate is computed without rounding.

pub mod certificates;
pub mod dyadic;
pub mod error;
pub mod fhc;
pub mod finvec;
pub mod inverse;
pub mod operator;
pub mod schedule;
pub mod section;
pub mod sets;

pub use dyadic::{ArithmeticError, Dyadic};
pub use error::{Error, Result};
pub use finvec::FinVec;
pub use operator::{OperatorSpec, RMode};
pub use schedule::{derive_structure, BlockStructure, Schedule, TauSpec};
