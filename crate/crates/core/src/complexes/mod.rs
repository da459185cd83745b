//! Cone complexes glued along faces, their morphisms, and the subdivision
//! engine.

mod complex;
mod conical;
mod fans;
mod morphism;
mod ops;
mod semistable;

pub use complex::{validate_complex, AbstractConeComplex, ConeId, FaceEmbedding, Violation};
pub use conical::{
    is_union_of_cones, is_union_of_cones_in, refine_until_conical, supporting_covectors, ConicalSubset, Piece,
    UnionCheck,
};
pub use fans::{assemble, fans_from_refined, identity_fan, maximal_cells, normalize_fan, SubdivisionOf};
pub use morphism::{ComplexMorphism, ConeMap, MorphismViolation};
pub use ops::{
    arrangement_fan, close_covectors, common_refinement, hyperplane_refine, pullback_subdivision, refines,
    stellar_fan, stellar_insert, stellar_subdivide, unimodularize, Pullback,
};
pub use semistable::{
    check_partition, check_subdivision, check_weak_semistable, ConeCheck, PartitionFailure, SemistableReport,
};
