//! Polyhedral criteria for weak semistability of a morphism of complexes,
//! and the partition test for families of cells.

use serde::{Deserialize, Serialize};

use super::complex::ConeId;
use super::fans::{maximal_cells, SubdivisionOf};
use super::morphism::ComplexMorphism;
use crate::exactgeom::{image_cone, intersect, lattice_surjective, IntVector, RationalCone};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeCheck {
    pub cone: ConeId,
    pub target: ConeId,
    /// The image is a cone of the target complex (a face of the target cone).
    pub onto_cone: bool,
    /// The lattice of the span maps onto the lattice of the image span.
    pub lattice_surjective: bool,
    /// Interior point of the offending cone when a check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<IntVector>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemistableReport {
    pub cones: Vec<ConeCheck>,
}

impl SemistableReport {
    pub fn onto_cones(&self) -> bool {
        self.cones.iter().all(|c| c.onto_cone)
    }

    pub fn reduced(&self) -> bool {
        self.cones.iter().all(|c| c.lattice_surjective)
    }

    pub fn passed(&self) -> bool {
        self.onto_cones() && self.reduced()
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConeCheck> {
        self.cones.iter().filter(|c| !(c.onto_cone && c.lattice_surjective))
    }
}

/// Per source cone: is its image a cone of the target, and is the lattice
/// map onto?
pub fn check_weak_semistable(f: &ComplexMorphism) -> SemistableReport {
    let mut cones = Vec::new();
    for (&id, cone) in &f.source.cones {
        let cm = &f.maps[&id];
        let target = &f.target.cones[&cm.target];
        let (onto, surj) = match image_cone(&cm.map, cone) {
            Ok(img) => (target.is_face(&img), lattice_surjective(&cm.map, cone, target)),
            Err(_) => (false, false),
        };
        let witness = (!(onto && surj)).then(|| cone.interior_point());
        cones.push(ConeCheck { cone: id, target: cm.target, onto_cone: onto, lattice_surjective: surj, witness });
    }
    SemistableReport { cones }
}

/// Why a family of cells fails to partition a cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionFailure {
    /// A cell leaves the cone or has the wrong dimension.
    BadCell { cell: usize },
    /// Two cells overlap in their relative interiors.
    Overlap { a: usize, b: usize, point: IntVector },
    /// An interior wall is not shared by exactly two cells; the point lies on
    /// it and near a gap in the support.
    Gap { point: IntVector },
}

/// Exact test that `cells` (all of the dimension of `cone`) have pairwise
/// disjoint relative interiors and cover `cone`.
pub fn check_partition(cone: &RationalCone, cells: &[RationalCone]) -> Result<(), PartitionFailure> {
    for (i, c) in cells.iter().enumerate() {
        if c.rank() != cone.rank() || c.dim() != cone.dim() || !cone.contains_cone(c) {
            return Err(PartitionFailure::BadCell { cell: i });
        }
    }
    if cone.is_zero() {
        return if cells.len() == 1 { Ok(()) } else { Err(PartitionFailure::BadCell { cell: 1.min(cells.len()) }) };
    }
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let meet = intersect(&cells[i], &cells[j]);
            if meet.dim() == cone.dim() || !cells[i].is_face(&meet) || !cells[j].is_face(&meet) {
                return Err(PartitionFailure::Overlap { a: i, b: j, point: meet.interior_point() });
            }
        }
    }
    if cells.is_empty() {
        return Err(PartitionFailure::Gap { point: cone.interior_point() });
    }
    // With proper intersections, the union is the whole cone iff every wall
    // off the boundary is shared by exactly two cells.
    let mut walls: Vec<(RationalCone, usize)> = Vec::new();
    for c in cells {
        for w in c.faces().into_iter().filter(|w| w.dim() + 1 == c.dim()) {
            match walls.iter_mut().find(|(x, _)| *x == w) {
                Some((_, n)) => *n += 1,
                None => walls.push((w, 1)),
            }
        }
    }
    for (w, n) in walls {
        let p = w.interior_point();
        let on_boundary = !cone.relint_contains(&p);
        if (on_boundary && n != 1) || (!on_boundary && n != 2) {
            return Err(PartitionFailure::Gap { point: p });
        }
    }
    Ok(())
}

/// The partition property for every original cone of a subdivision.
pub fn check_subdivision(s: &SubdivisionOf) -> Result<(), (ConeId, PartitionFailure)> {
    for (&id, cone) in &s.original.cones {
        check_partition(cone, &maximal_cells(s.fan(id))).map_err(|e| (id, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::complexes::{AbstractConeComplex, ConeMap};
    use crate::exactgeom::{cone_from_generators, LinearMap};

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    fn ray_complex() -> Arc<AbstractConeComplex> {
        Arc::new(AbstractConeComplex::from_cone(&RationalCone::orthant(1)))
    }

    #[test]
    fn identity_passes() {
        let c = Arc::new(AbstractConeComplex::from_cone(&RationalCone::orthant(3)));
        assert!(check_weak_semistable(&ComplexMorphism::identity(&c)).passed());
    }

    #[test]
    fn doubling_a_ray_is_not_reduced() {
        let c = ray_complex();
        let mut f = ComplexMorphism::identity(&c);
        for cm in f.maps.values_mut() {
            cm.map = LinearMap::from_i64_rows(1, &[vec![2]]).unwrap();
        }
        let r = check_weak_semistable(&f);
        assert!(r.onto_cones());
        assert!(!r.reduced());
    }

    #[test]
    fn diagonal_into_the_orthant_is_not_onto() {
        let src = Arc::new(AbstractConeComplex::from_cone(&cone_from_generators(&[iv(&[1, 1, 1])]).unwrap()));
        let tgt = Arc::new(AbstractConeComplex::from_cone(&RationalCone::orthant(3)));
        let top = *tgt.cones.iter().max_by_key(|(_, c)| c.dim()).unwrap().0;
        let maps = src.cones.iter().map(|(&id, _)| {
            let target = if src.cones[&id].is_zero() { tgt.zero_cone().unwrap() } else { top };
            (id, ConeMap { target, map: LinearMap::identity(3) })
        });
        let f = ComplexMorphism { source: src.clone(), target: tgt.clone(), maps: maps.collect() };
        let r = check_weak_semistable(&f);
        assert!(!r.onto_cones());
        assert!(r.reduced());
    }

    #[test]
    fn partitions() {
        let q = RationalCone::orthant(2);
        let a = cone_from_generators(&[iv(&[1, 0]), iv(&[1, 1])]).unwrap();
        let b = cone_from_generators(&[iv(&[1, 1]), iv(&[0, 1])]).unwrap();
        assert_eq!(check_partition(&q, &[a.clone(), b.clone()]), Ok(()));
        assert!(matches!(check_partition(&q, &[a.clone()]), Err(PartitionFailure::Gap { .. })));
        assert!(matches!(check_partition(&q, &[a, q.clone()]), Err(PartitionFailure::Overlap { .. })));
    }
}
