//! Operator-valued kernels over finite-dimensional C*-algebras: Hilbert
//! modules and correspondences, Kolmogorov decompositions, completely
//! positive definite kernels and their semigroups.

pub mod algebra;
pub mod cpd;
pub mod error;
pub mod json;
pub mod kernels;
pub mod modcorr;
pub mod numerics;
pub mod random;
pub mod samples;
pub mod semigroups;
pub mod starpos;

pub use algebra::{AlgElement, AlgebraShape, Functional};
pub use error::{Error, Result};
pub use numerics::{CMatrix, Tolerance, C64};
