//! Integral multicurves on closed surfaces in Dehn-Thurston coordinates.
//!
//! The crate enumerates integral points of the space of measured laminations
//! in norm balls and sectors, sorts them into mapping class group orbits,
//! evaluates hyperbolic lengths from Fenchel-Nielsen data and fits the
//! resulting growth curves.

pub mod coords;
pub mod decode;
pub mod enumeration;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod hyperbolic;
mod linalg;
pub mod sector;
pub mod surface;
pub mod topology;
pub mod torus;
pub mod traintrack;

pub use coords::DtCoords;
pub use decode::{decode, Decoder, MultiCurve};
pub use error::{Error, Result};
pub use surface::{build_surface, Surface};
pub use topology::TypeInvariant;

/// Topological type of a decoded multicurve.
pub fn topological_type(mc: &MultiCurve) -> TypeInvariant {
    mc.type_invariant.clone()
}
