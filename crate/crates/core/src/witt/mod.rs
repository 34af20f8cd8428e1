//! Truncated Witt vectors W_n(R) built from the integral structure polynomials.

mod polys;
mod vector;

pub use polys::{
    compiled_structure, structure_polys, structure_polys_opt, witt_polynomial, CompiledPoly, CompiledStructure,
    IntPoly, Monomial, StructurePolys, DEFAULT_MAX_LEVEL,
};
pub use vector::{teichmuller_digits, teichmuller_mod, WittVector};
