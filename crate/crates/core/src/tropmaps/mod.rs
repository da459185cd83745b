//! Tropical rubber maps: combinatorial types, their moduli cones and the
//! complexes they form over the moduli of curves.

mod enumerate;
mod image;
mod superimpose;
mod types;

pub use enumerate::{balanced_slopes, enumerate_rubber_types, enumerate_types};
pub use image::{build_map_complex, forgetful_image, forgetful_map, image_family, type_label, MapModuliComplex};
pub use superimpose::{decompose, fiber_product_cone, joint_map, superimpose, ChainDecomposition, ProductType};
pub use types::{spanning_tree, tree_paths, ContactData, ModuliCone, RubberMapType};

