//! Exact arithmetic for characteristic-p invariants: Witt vectors, F-crystals,
//! K3 crystals and their period data, formal group laws, and moduli numerology.

pub mod acceptance;
pub mod error;
pub mod fcrystal;
pub mod fgl;
pub mod field;
pub mod galois;
pub mod geometry;
pub mod interchange;
pub mod k3crystal;
pub mod linalg;
pub mod matrix;
pub mod polygon;
pub mod quadform;
pub mod ring;
pub mod witt;

pub use error::{Error, Result};
pub use field::{FiniteField, Fq};
pub use ring::{Field, Integers, Rationals, Ring};
