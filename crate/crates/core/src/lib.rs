//! Exact computation of real component groups of lattices with involution,
//! the mod-2 duality pairing between them, and the SL(2)/PGL(2) component
//! counts for spectral curves over type I real curves.

pub mod census;
pub mod duality;
pub mod error;
pub mod f2;
pub mod involution;
pub mod json;
pub mod linalg;
pub mod matrix;
pub mod par;
pub mod random;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
pub use involution::{C2Decomposition, ComponentGroup, InvolutionLattice};
pub use matrix::IntegerMatrix;
