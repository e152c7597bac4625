//! Algorithms for effective equidistribution experiments on homogeneous spaces:
//! Lie subalgebra generation, exact diophantine tools, heights and discriminants,
//! lattice counting in SL₂, horocycle-flow discrepancy and integral points on
//! determinant level sets.

pub mod error;
pub mod dioph;
pub mod exact;
pub mod heights;
pub mod lattice_count;
pub mod lie;
pub mod linnik;
pub mod scalar;
pub mod subalgebra;
pub mod unipotent;

pub use error::{Error, Result};
pub use lie::{ExactFrame, GVector, LieAlgebraModel, Sl2Triple, SubspaceFrame};
pub use scalar::{Rational, Scalar};
