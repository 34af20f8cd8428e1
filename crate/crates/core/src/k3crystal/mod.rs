//! K3 crystals: axioms, supersingularity, Artin invariants, characteristic subspaces
//! and the passage between crystals and period data.

mod charsub;
mod construct;
mod crystal;

pub use charsub::*;
pub use construct::*;
pub use crystal::*;
