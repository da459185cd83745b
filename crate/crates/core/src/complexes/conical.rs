//! Conical subsets of a complex and the union-of-cones test.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::complex::{AbstractConeComplex, ConeId};
use super::fans::{maximal_cells, SubdivisionOf};
use super::ops::{hyperplane_refine, unimodularize};
use crate::error::{Error, Result};
use crate::exactgeom::{intersect, IntVector, RationalCone};

/// A cone sitting inside the cone `host`, in the host's coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub host: ConeId,
    pub cone: RationalCone,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicalSubset {
    pub pieces: Vec<Piece>,
}

impl ConicalSubset {
    pub fn new(mut pieces: Vec<Piece>) -> Self {
        pieces.sort();
        pieces.dedup();
        ConicalSubset { pieces }
    }

    /// The pieces together with all their faces, still recorded in the
    /// coordinates of the original hosts.
    pub fn closure(&self) -> Vec<Piece> {
        let mut out: Vec<Piece> = self
            .pieces
            .iter()
            .flat_map(|p| p.cone.faces().into_iter().map(move |f| Piece { host: p.host, cone: f }))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn union(&self, other: &ConicalSubset) -> ConicalSubset {
        ConicalSubset::new(self.pieces.iter().chain(&other.pieces).cloned().collect())
    }

    /// Checks that every piece lies in its host cone.
    pub fn check_in(&self, c: &AbstractConeComplex) -> Result<()> {
        for p in &self.pieces {
            let host = c.cones.get(&p.host).ok_or(Error::NoSuchCone(p.host))?;
            if host.rank() != p.cone.rank() || !host.contains_cone(&p.cone) {
                return Err(Error::RayOutside { cone: p.host });
            }
        }
        Ok(())
    }
}

/// Outcome of a union-of-cones test. On failure, `witness` names the first
/// offending piece and a point of it whose carrier cell is not contained in
/// the piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionCheck {
    pub holds: bool,
    pub witness: Option<(usize, IntVector)>,
}

impl UnionCheck {
    fn from_failures(failure: Option<(usize, IntVector)>) -> Self {
        UnionCheck { holds: failure.is_none(), witness: failure }
    }
}

/// `piece` is a union of cells of a fan iff it meets every maximal cell in
/// a face of that cell.
fn piece_failure(maximal: &[RationalCone], piece: &RationalCone) -> Option<IntVector> {
    for m in maximal {
        let meet = intersect(m, piece);
        if !m.is_face(&meet) {
            return Some(meet.interior_point());
        }
    }
    None
}

/// Whether every piece is a union of cones of `c` (within its host, the cones
/// of `c` are exactly the faces of the host).
pub fn is_union_of_cones(c: &AbstractConeComplex, s: &ConicalSubset) -> UnionCheck {
    let fail = s.pieces.iter().enumerate().find_map(|(i, p)| {
        let host = &c.cones[&p.host];
        piece_failure(std::slice::from_ref(host), &p.cone).map(|w| (i, w))
    });
    UnionCheck::from_failures(fail)
}

/// Whether every piece (given in the original complex) is a union of cones
/// of the subdivision.
pub fn is_union_of_cones_in(sub: &SubdivisionOf, s: &ConicalSubset) -> UnionCheck {
    let mut cache: BTreeMap<ConeId, Vec<RationalCone>> = BTreeMap::new();
    let fail = s.pieces.iter().enumerate().find_map(|(i, p)| {
        let maximal = cache.entry(p.host).or_insert_with(|| maximal_cells(sub.fan(p.host)));
        piece_failure(maximal, &p.cone).map(|w| (i, w))
    });
    UnionCheck::from_failures(fail)
}

/// Supporting covectors of every piece: facets and span equations.
pub fn supporting_covectors(s: &ConicalSubset) -> BTreeMap<ConeId, Vec<IntVector>> {
    let mut out: BTreeMap<ConeId, Vec<IntVector>> = BTreeMap::new();
    for p in &s.pieces {
        let e = out.entry(p.host).or_default();
        e.extend(p.cone.facets().iter().cloned());
        e.extend(p.cone.equations().iter().cloned());
    }
    out
}

/// A subdivision of `c` in which every piece of `s` is a union of cones: the
/// arrangement of all supporting covectors, optionally made unimodular.
pub fn refine_until_conical(c: &Arc<AbstractConeComplex>, s: &ConicalSubset, unimodular: bool) -> Result<SubdivisionOf> {
    s.check_in(c)?;
    let mut sub = hyperplane_refine(c, &supporting_covectors(s))?;
    if unimodular {
        sub = unimodularize(&sub)?;
    }
    let check = is_union_of_cones_in(&sub, s);
    if let Some((i, w)) = check.witness {
        return Err(Error::Invalid(format!("piece {i} is not a union of cones after refinement (witness {w})")));
    }
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::ops::stellar_subdivide;
    use crate::exactgeom::cone_from_generators;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    fn setup(k: usize) -> (Arc<AbstractConeComplex>, ConeId) {
        let c = Arc::new(AbstractConeComplex::from_cone(&RationalCone::orthant(k)));
        let top = *c.cones.iter().max_by_key(|(_, c)| c.dim()).unwrap().0;
        (c, top)
    }

    #[test]
    fn faces_are_unions() {
        let (c, t) = setup(3);
        let face = cone_from_generators(&[iv(&[1, 0, 0]), iv(&[0, 1, 0])]).unwrap();
        let s = ConicalSubset::new(vec![Piece { host: t, cone: face }]);
        assert!(is_union_of_cones(&c, &s).holds);
    }

    #[test]
    fn the_diagonal_needs_a_subdivision() {
        let (c, t) = setup(3);
        let d = cone_from_generators(&[iv(&[1, 1, 1])]).unwrap();
        let s = ConicalSubset::new(vec![Piece { host: t, cone: d }]);
        let before = is_union_of_cones(&c, &s);
        assert!(!before.holds);
        assert_eq!(before.witness, Some((0, iv(&[1, 1, 1]))));
        let st = stellar_subdivide(&c, t, &iv(&[1, 1, 1])).unwrap();
        assert!(is_union_of_cones_in(&st, &s).holds);
        let r = refine_until_conical(&c, &s, false).unwrap();
        assert!(r.fan(t).iter().any(|x| x.rays() == [iv(&[1, 1, 1])]));
    }

    #[test]
    fn a_lattice_ray_in_the_plane() {
        let (c, t) = setup(2);
        let s = ConicalSubset::new(vec![Piece { host: t, cone: cone_from_generators(&[iv(&[1, 2])]).unwrap() }]);
        let r = refine_until_conical(&c, &s, false).unwrap();
        assert_eq!(maximal_cells(r.fan(t)).len(), 2);
        let u = refine_until_conical(&c, &s, true).unwrap();
        assert_eq!(maximal_cells(u.fan(t)).len(), 3);
    }

    #[test]
    fn subfan_gives_identity() {
        let (c, t) = setup(2);
        let s = ConicalSubset::new(vec![Piece { host: t, cone: RationalCone::orthant(2) }]);
        assert!(refine_until_conical(&c, &s, false).unwrap().is_identity());
    }
}
