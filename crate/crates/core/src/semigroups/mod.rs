mod fock;
mod schoenberg;
mod subproduct;

pub use fock::*;
pub use schoenberg::*;
pub use subproduct::*;
