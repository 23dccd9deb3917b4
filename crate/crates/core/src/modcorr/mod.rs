//! Hilbert modules, correspondences and their tensor products.

mod correspondence;
mod module;
mod rep;

pub use correspondence::*;
pub use module::*;
pub use rep::*;
