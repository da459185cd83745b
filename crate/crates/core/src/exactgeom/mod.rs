//! Exact integer and rational linear algebra, and pointed rational
//! polyhedral cones carrying both their ray and facet descriptions.
//!
//! All arithmetic is arbitrary precision. Values are immutable once built,
//! so cones and maps can be shared freely across threads.

mod cone;
pub mod dd;
pub mod lattice;
pub mod linalg;
mod vector;

pub use cone::{
    cone_from_generators, dual_description, image_cone, intersect, is_unimodular, lattice_surjective, multiplicity,
    preimage_within, split, RationalCone,
};
pub use vector::{IntVector, LinearMap};
