//! Exact polyhedral machinery for tropical moduli of curves and rubber maps.
//!
//! The crate is layered bottom-up:
//!
//! * [`exactgeom`]: exact integer linear algebra and pointed rational cones.
//! * [`complexes`]: cone complexes with face gluing and automorphisms, and the
//!   subdivision engine (stellar, arrangement, common refinement, pullback).
//! * [`curves`]: stable dual graphs and the tropical moduli complex of curves.
//! * [`tropmaps`]: combinatorial types of rubber tropical maps and their cones.
//! * [`pipeline`]: the end-to-end subdivision and verification runs.

pub mod complexes;
pub mod curves;
pub mod error;
pub mod exactgeom;
pub mod pipeline;
pub mod tropmaps;

pub use error::{Error, Result};
