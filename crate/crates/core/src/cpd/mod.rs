//! Linear maps between block algebras, completely positive definite kernels
//! and their dilations.

mod gns;
mod maps;
mod morita;
mod phimap;

pub use gns::*;
pub use maps::*;
pub use morita::*;
pub use phimap::*;
