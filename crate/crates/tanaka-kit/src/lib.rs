//! Exact computations for graded Lie algebras and tube CR hypersurfaces:
//! Tanaka prolongation, Jacobi obstructions to filtered deformations, and
//! Freeman filtrations with symmetry checks for tubes over curves.

pub mod crgeom;
pub mod deform;
pub mod linalg;
pub mod liealg;
pub mod poly;
pub mod prolong;
pub mod scalars;
pub mod verify;

pub use liealg::{FilteredLieAlgebra, GradedLieAlgebra, LieAlgebra};
pub use scalars::{Gauss, Scalar};
