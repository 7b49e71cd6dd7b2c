//! Rotation sets, pressure and entropy of vector-valued potentials on
//! subshifts of finite type.

pub mod acceptance;
pub mod construct2d;
pub mod cycles;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod graph;
pub mod perorbit;
pub mod potential;
pub mod rotgeom;
pub mod sft;
pub mod thermo;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
