//! Subdivisions stored as one fan per original cone, and their assembly into
//! a refined cone complex.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::complex::{AbstractConeComplex, ConeId, FaceEmbedding};
use super::morphism::{ComplexMorphism, ConeMap};
use crate::error::{Error, Result};
use crate::exactgeom::{image_cone, IntVector, LinearMap, RationalCone};

/// Sorted images of the rays of `c` under `g`. For a lattice embedding onto
/// a face this is exactly the ray list of the image cone.
pub(crate) fn mapped_rays(g: &LinearMap, c: &RationalCone) -> Vec<IntVector> {
    let mut v: Vec<IntVector> = c.rays().iter().map(|r| g.apply(r)).collect();
    v.sort();
    v
}

/// Closes a collection of cells under taking faces and sorts the result by
/// dimension, then canonically.
pub fn normalize_fan(cells: impl IntoIterator<Item = RationalCone>) -> Vec<RationalCone> {
    let mut set: BTreeSet<RationalCone> = BTreeSet::new();
    for c in cells {
        if set.contains(&c) {
            continue;
        }
        set.extend(c.faces());
    }
    let mut v: Vec<RationalCone> = set.into_iter().collect();
    v.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    v
}

/// Cells of a face-closed fan that are not proper faces of other cells.
pub fn maximal_cells(fan: &[RationalCone]) -> Vec<RationalCone> {
    fan.iter()
        .filter(|c| !fan.iter().any(|d| d.dim() > c.dim() && d.contains_cone(c)))
        .cloned()
        .collect()
}

/// The trivial fan: all faces of `cone`.
pub fn identity_fan(cone: &RationalCone) -> Vec<RationalCone> {
    cone.faces()
}

/// A subdivision of `original`. Each refined cone lives in the coordinates of
/// the original cone whose relative interior contains it (its host), and
/// only one representative per automorphism orbit is stored.
#[derive(Clone, Debug)]
pub struct SubdivisionOf {
    pub original: Arc<AbstractConeComplex>,
    pub refined: Arc<AbstractConeComplex>,
    /// Refined complex to original: each refined cone maps by the identity
    /// into its host.
    pub proj: ComplexMorphism,
    fans: BTreeMap<ConeId, Vec<RationalCone>>,
    /// Per original cone: ray list of each cell -> every (refined id, map)
    /// whose image it is.
    index: BTreeMap<ConeId, BTreeMap<Vec<IntVector>, Vec<(ConeId, LinearMap)>>>,
}

impl PartialEq for SubdivisionOf {
    fn eq(&self, other: &Self) -> bool {
        self.original == other.original && self.refined == other.refined && self.proj.maps == other.proj.maps
    }
}

impl SubdivisionOf {
    pub fn identity(original: &Arc<AbstractConeComplex>) -> Result<Self> {
        let fans = original.cones.iter().map(|(&id, c)| (id, identity_fan(c))).collect();
        assemble(original, fans)
    }

    /// The full fan (all cells) subdividing original cone `id`.
    pub fn fan(&self, id: ConeId) -> &[RationalCone] {
        &self.fans[&id]
    }

    pub fn fans(&self) -> &BTreeMap<ConeId, Vec<RationalCone>> {
        &self.fans
    }

    pub fn host(&self, refined: ConeId) -> ConeId {
        self.proj.maps[&refined].target
    }

    /// Whether this is the trivial subdivision.
    pub fn is_identity(&self) -> bool {
        self.fans.iter().all(|(id, f)| f.len() == self.original.cones[id].faces().len())
    }

    /// Smallest cell of the fan of `host` containing `x`.
    pub fn cell_containing(&self, host: ConeId, x: &IntVector) -> Option<&RationalCone> {
        self.fans.get(&host)?.iter().filter(|c| c.contains(x)).min_by_key(|c| c.dim())
    }

    /// Every way of writing a cell of the fan of `host` as the image of a
    /// refined cone.
    pub fn cell_preimages(&self, host: ConeId, cell: &RationalCone) -> &[(ConeId, LinearMap)] {
        self.index.get(&host).and_then(|m| m.get(cell.rays())).map_or(&[], Vec::as_slice)
    }

    /// Refined cone whose image contains `x` in its relative interior,
    /// together with the map from that cone's host into `host`.
    pub fn locate(&self, host: ConeId, x: &IntVector) -> Option<(ConeId, LinearMap)> {
        let cell = self.cell_containing(host, x)?;
        self.cell_preimages(host, cell).first().cloned()
    }

    /// Number of refined cones of each dimension.
    pub fn cone_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for c in self.refined.cones.values() {
            *out.entry(c.dim()).or_insert(0) += 1;
        }
        out
    }
}

/// Builds the refined complex from per-cone fans. The fans must be invariant
/// under the automorphisms of their cone and agree along shared faces.
pub fn assemble(original: &Arc<AbstractConeComplex>, fans: BTreeMap<ConeId, Vec<RationalCone>>) -> Result<SubdivisionOf> {
    let keys: BTreeMap<ConeId, BTreeSet<&[IntVector]>> =
        fans.iter().map(|(&id, f)| (id, f.iter().map(RationalCone::rays).collect())).collect();
    for (&id, cone) in &original.cones {
        let fan = fans.get(&id).ok_or(Error::NoSuchCone(id))?;
        if fan.iter().any(|c| c.rank() != cone.rank() || !cone.contains_cone(c)) {
            return Err(Error::Invalid(format!("fan of cone {id} leaves the cone")));
        }
        for a in original.automorphisms(id) {
            if fan.iter().any(|c| !keys[&id].contains(mapped_rays(&a, c).as_slice())) {
                return Err(Error::NotAutInvariant(id));
            }
        }
    }
    for f in &original.faces {
        let face = image_cone(&f.map, &original.cones[&f.sub])?;
        let inside = fans[&f.sup].iter().filter(|c| face.contains_cone(c)).count();
        let agree = inside == fans[&f.sub].len()
            && fans[&f.sub].iter().all(|c| keys[&f.sup].contains(mapped_rays(&f.map, c).as_slice()));
        if !agree {
            return Err(Error::Invalid(format!("fans of cones {} and {} disagree on their common face", f.sub, f.sup)));
        }
    }
    drop(keys);

    // Orbit representatives of cells interior to each host.
    let mut refined = AbstractConeComplex::new();
    let mut reps: BTreeMap<ConeId, Vec<ConeId>> = BTreeMap::new();
    let mut host_of: BTreeMap<ConeId, ConeId> = BTreeMap::new();
    for (&id, cone) in &original.cones {
        let auts = original.automorphisms(id);
        let mut seen: BTreeSet<Vec<IntVector>> = BTreeSet::new();
        for cell in &fans[&id] {
            if !cone.relint_contains(&cell.interior_point()) || seen.contains(cell.rays()) {
                continue;
            }
            for a in &auts {
                seen.insert(mapped_rays(a, cell));
            }
            let rid = refined.cones.len();
            refined.cones.insert(rid, cell.clone());
            if let Some(l) = original.labels.get(&id) {
                refined.labels.insert(rid, l.clone());
            }
            reps.entry(id).or_default().push(rid);
            host_of.insert(rid, id);
        }
    }

    let mut index: BTreeMap<ConeId, BTreeMap<Vec<IntVector>, Vec<(ConeId, LinearMap)>>> = BTreeMap::new();
    for &id in original.cones.keys() {
        let slot = index.entry(id).or_default();
        for (src, phi) in original.embeddings_into(id) {
            for b in original.automorphisms(src) {
                let g = phi.compose(&b);
                for &rid in reps.get(&src).map_or(&[][..], Vec::as_slice) {
                    let key = mapped_rays(&g, &refined.cones[&rid]);
                    let entry = slot.entry(key).or_default();
                    if !entry.iter().any(|(r, m)| *r == rid && *m == g) {
                        entry.push((rid, g.clone()));
                    }
                }
            }
        }
    }

    let mut faces: BTreeSet<FaceEmbedding> = BTreeSet::new();
    for (&rid, &id) in &host_of {
        let tau = refined.cones[&rid].clone();
        let mut auts: Vec<LinearMap> = Vec::new();
        for face in tau.faces() {
            let Some(pre) = index[&id].get(face.rays()) else {
                return Err(Error::Invalid(format!("cell of cone {id} has no refined preimage")));
            };
            for (src, g) in pre {
                if face.dim() == tau.dim() {
                    if *src == rid && !auts.contains(g) {
                        auts.push(g.clone());
                    }
                } else {
                    faces.insert(FaceEmbedding { sub: *src, sup: rid, map: g.clone() });
                }
            }
        }
        if auts.len() > 1 {
            auts.sort();
            refined.auts.insert(rid, auts);
        }
    }
    refined.faces = faces.into_iter().collect();

    let refined = Arc::new(refined);
    let maps = host_of
        .iter()
        .map(|(&rid, &id)| (rid, ConeMap { target: id, map: LinearMap::identity(original.cones[&id].rank()) }))
        .collect();
    let proj = ComplexMorphism { source: refined.clone(), target: original.clone(), maps };
    Ok(SubdivisionOf { original: original.clone(), refined, proj, fans, index })
}

/// Recovers the per-cone fans from a refined complex and its projection.
pub fn fans_from_refined(
    original: &AbstractConeComplex,
    refined: &AbstractConeComplex,
    proj: &ComplexMorphism,
) -> Result<BTreeMap<ConeId, Vec<RationalCone>>> {
    let mut by_host: BTreeMap<ConeId, Vec<ConeId>> = BTreeMap::new();
    for (&rid, m) in &proj.maps {
        by_host.entry(m.target).or_default().push(rid);
    }
    let mut fans = BTreeMap::new();
    for (&id, cone) in &original.cones {
        let mut cells = Vec::new();
        for (src, phi) in original.embeddings_into(id) {
            for b in original.automorphisms(src) {
                let g = phi.compose(&b);
                for rid in by_host.get(&src).map_or(&[][..], Vec::as_slice) {
                    cells.push(image_cone(&g, &refined.cones[rid])?);
                }
            }
        }
        if cells.is_empty() {
            cells.push(RationalCone::zero(cone.rank()));
        }
        fans.insert(id, normalize_fan(cells));
    }
    Ok(fans)
}

#[derive(Serialize, Deserialize)]
struct SubdivisionRepr {
    original: AbstractConeComplex,
    refined: AbstractConeComplex,
    projection: BTreeMap<ConeId, ConeMap>,
}

impl Serialize for SubdivisionOf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubdivisionRepr {
            original: (*self.original).clone(),
            refined: (*self.refined).clone(),
            projection: self.proj.maps.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubdivisionOf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SubdivisionRepr::deserialize(d)?;
        let original = Arc::new(r.original);
        let refined = Arc::new(r.refined);
        let proj = ComplexMorphism { source: refined.clone(), target: original.clone(), maps: r.projection };
        let fans = fans_from_refined(&original, &refined, &proj).map_err(D::Error::custom)?;
        assemble(&original, fans).map_err(D::Error::custom)
    }
}

/// `X` with `g ∘ X = l` on the relevant span, for `g` a face embedding.
pub(crate) fn factor_through(g: &LinearMap, l: &LinearMap, host: ConeId) -> Result<LinearMap> {
    let li = g.left_inverse().ok_or(Error::NonIntegralFaceMap(host))?;
    Ok(li.compose(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_subdivision_of_an_orthant() {
        let c = Arc::new(AbstractConeComplex::from_cone(&RationalCone::orthant(2)));
        let s = SubdivisionOf::identity(&c).unwrap();
        assert!(s.is_identity());
        assert_eq!(s.refined.cones.len(), 4);
        assert!(super::super::validate_complex(&s.refined).is_empty());
        assert!(s.proj.validate().is_empty());
    }

    #[test]
    fn round_trips_through_json() {
        let c = Arc::new(AbstractConeComplex::from_cone(&RationalCone::orthant(2)));
        let s = SubdivisionOf::identity(&c).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: SubdivisionOf = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
