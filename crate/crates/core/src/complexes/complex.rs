use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::exactgeom::{image_cone, lattice_surjective, IntVector, LinearMap, RationalCone};

pub type ConeId = usize;

/// An embedding of cone `sub` onto a proper face of cone `sup`, in the
/// coordinates of the two cones.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(ConeId, ConeId, LinearMap)", into = "(ConeId, ConeId, LinearMap)")]
pub struct FaceEmbedding {
    pub sub: ConeId,
    pub sup: ConeId,
    pub map: LinearMap,
}

impl From<(ConeId, ConeId, LinearMap)> for FaceEmbedding {
    fn from((sub, sup, map): (ConeId, ConeId, LinearMap)) -> Self {
        FaceEmbedding { sub, sup, map }
    }
}

impl From<FaceEmbedding> for (ConeId, ConeId, LinearMap) {
    fn from(f: FaceEmbedding) -> Self {
        (f.sub, f.sup, f.map)
    }
}

impl fmt::Debug for FaceEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {:?}", self.sub, self.sup, self.map)
    }
}

/// Rational cones glued along faces, each carrying a finite group of lattice
/// automorphisms. Every cone lives in its own coordinate space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractConeComplex {
    pub cones: BTreeMap<ConeId, RationalCone>,
    pub faces: Vec<FaceEmbedding>,
    #[serde(default)]
    pub auts: BTreeMap<ConeId, Vec<LinearMap>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<ConeId, String>,
}

impl AbstractConeComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single cone together with all of its faces, with trivial
    /// automorphisms. Face cones are stored in the coordinates of the big cone.
    pub fn from_cone(cone: &RationalCone) -> Self {
        let faces = cone.faces();
        let mut c = AbstractConeComplex::new();
        for (i, f) in faces.iter().enumerate() {
            c.cones.insert(i, f.clone());
        }
        let id = LinearMap::identity(cone.rank());
        for (i, a) in faces.iter().enumerate() {
            for (j, b) in faces.iter().enumerate() {
                if i != j && b.is_face(a) {
                    c.faces.push(FaceEmbedding { sub: i, sup: j, map: id.clone() });
                }
            }
        }
        c
    }

    pub fn cone(&self, id: ConeId) -> &RationalCone {
        &self.cones[&id]
    }

    pub fn label(&self, id: ConeId) -> String {
        self.labels.get(&id).cloned().unwrap_or_else(|| id.to_string())
    }

    /// The automorphism group of a cone; the identity alone if none was recorded.
    pub fn automorphisms(&self, id: ConeId) -> Vec<LinearMap> {
        match self.auts.get(&id) {
            Some(a) if !a.is_empty() => a.clone(),
            _ => vec![LinearMap::identity(self.cones[&id].rank())],
        }
    }

    pub fn zero_cone(&self) -> Option<ConeId> {
        self.cones.iter().find(|(_, c)| c.is_zero()).map(|(&id, _)| id)
    }

    pub fn max_dim(&self) -> usize {
        self.cones.values().map(RationalCone::dim).max().unwrap_or(0)
    }

    /// Every embedding of some cone into `target`: proper face maps and
    /// the automorphisms of `target` itself.
    pub fn embeddings_into(&self, target: ConeId) -> Vec<(ConeId, LinearMap)> {
        let mut out: Vec<(ConeId, LinearMap)> =
            self.automorphisms(target).into_iter().map(|a| (target, a)).collect();
        out.extend(self.faces.iter().filter(|f| f.sup == target).map(|f| (f.sub, f.map.clone())));
        out
    }

    /// Every embedding of `source` into some cone (automorphisms included).
    pub fn embeddings_from(&self, source: ConeId) -> Vec<(ConeId, LinearMap)> {
        let mut out: Vec<(ConeId, LinearMap)> =
            self.automorphisms(source).into_iter().map(|a| (source, a)).collect();
        out.extend(self.faces.iter().filter(|f| f.sub == source).map(|f| (f.sup, f.map.clone())));
        out
    }

    /// Adds all composites `a ∘ f ∘ b` of face maps with automorphisms and
    /// removes duplicates.
    pub fn close_faces_under_auts(&mut self) {
        let mut set: BTreeSet<FaceEmbedding> = BTreeSet::new();
        for f in &self.faces {
            for a in self.automorphisms(f.sup) {
                for b in self.automorphisms(f.sub) {
                    set.insert(FaceEmbedding { sub: f.sub, sup: f.sup, map: a.compose(&f.map).compose(&b) });
                }
            }
        }
        self.faces = set.into_iter().collect();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingZeroCone,
    UnknownCone { id: ConeId },
    BadFaceMap { sub: ConeId, sup: ConeId, reason: String },
    MissingFace { cone: ConeId, face_rays: Vec<IntVector> },
    MissingComposite { sub: ConeId, mid: ConeId, sup: ConeId },
    BadAutomorphism { cone: ConeId, reason: String },
    AutGroupNotClosed { cone: ConeId },
    AutsDoNotPermuteFaces { sub: ConeId, sup: ConeId },
}

/// Checks every structural invariant of a cone complex. An empty list means
/// the complex is valid.
pub fn validate_complex(c: &AbstractConeComplex) -> Vec<Violation> {
    let mut out = Vec::new();
    if c.zero_cone().is_none() && !c.cones.is_empty() {
        out.push(Violation::MissingZeroCone);
    }
    let mut known: HashSet<(ConeId, ConeId, &LinearMap)> = HashSet::new();
    for f in &c.faces {
        let (Some(sub), Some(sup)) = (c.cones.get(&f.sub), c.cones.get(&f.sup)) else {
            let id = if c.cones.contains_key(&f.sub) { f.sup } else { f.sub };
            out.push(Violation::UnknownCone { id });
            continue;
        };
        known.insert((f.sub, f.sup, &f.map));
        let bad = |reason: &str| Violation::BadFaceMap { sub: f.sub, sup: f.sup, reason: reason.to_string() };
        if f.map.source_rank != sub.rank() || f.map.target_rank != sup.rank() {
            out.push(bad("rank mismatch"));
            continue;
        }
        let Ok(img) = image_cone(&f.map, sub) else {
            out.push(bad("image is not pointed"));
            continue;
        };
        if img.dim() != sub.dim() {
            out.push(bad("not injective on the cone"));
        } else if img.dim() >= sup.dim() || !sup.is_face(&img) {
            out.push(bad("image is not a proper face"));
        } else if !lattice_surjective(&f.map, sub, &img) {
            out.push(bad("not a lattice isomorphism onto the face"));
        }
    }

    // Every nonzero proper face must be the image of some face map.
    for (&id, cone) in &c.cones {
        let images: Vec<RationalCone> = c
            .faces
            .iter()
            .filter(|f| f.sup == id)
            .filter_map(|f| c.cones.get(&f.sub).and_then(|s| image_cone(&f.map, s).ok()))
            .collect();
        for face in cone.faces() {
            if face.is_zero() || face.dim() == cone.dim() {
                continue;
            }
            if !images.contains(&face) {
                out.push(Violation::MissingFace { cone: id, face_rays: face.rays().to_vec() });
            }
        }
    }

    // Closure under composition.
    for f in &c.faces {
        for g in c.faces.iter().filter(|g| g.sub == f.sup) {
            if f.map.target_rank != g.map.source_rank {
                continue;
            }
            let comp = g.map.compose(&f.map);
            if !known.contains(&(f.sub, g.sup, &comp)) {
                out.push(Violation::MissingComposite { sub: f.sub, mid: f.sup, sup: g.sup });
            }
        }
    }

    for (&id, auts) in &c.auts {
        let Some(cone) = c.cones.get(&id) else {
            out.push(Violation::UnknownCone { id });
            continue;
        };
        let set: HashSet<&LinearMap> = auts.iter().collect();
        let mut ok = true;
        for a in auts {
            let bad = |reason: &str| Violation::BadAutomorphism { cone: id, reason: reason.to_string() };
            if a.source_rank != cone.rank() || a.target_rank != cone.rank() {
                out.push(bad("rank mismatch"));
                ok = false;
            } else if !a.determinant().abs().is_one() {
                out.push(bad("not a lattice automorphism"));
                ok = false;
            } else if image_cone(a, cone).as_ref() != Ok(cone) {
                out.push(bad("does not preserve the cone"));
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let closed = set.contains(&LinearMap::identity(cone.rank()))
            && auts.iter().all(|a| auts.iter().all(|b| set.contains(&a.compose(b))));
        if !closed {
            out.push(Violation::AutGroupNotClosed { cone: id });
        }
    }

    // Automorphisms permute face embeddings.
    let mut reported: BTreeSet<(ConeId, ConeId)> = BTreeSet::new();
    for f in &c.faces {
        if !c.cones.contains_key(&f.sub) || !c.cones.contains_key(&f.sup) || reported.contains(&(f.sub, f.sup)) {
            continue;
        }
        let post = c.automorphisms(f.sup).iter().all(|a| known.contains(&(f.sub, f.sup, &a.compose(&f.map))));
        let pre = c.automorphisms(f.sub).iter().all(|b| known.contains(&(f.sub, f.sup, &f.map.compose(b))));
        if !(post && pre) {
            reported.insert((f.sub, f.sup));
            out.push(Violation::AutsDoNotPermuteFaces { sub: f.sub, sup: f.sup });
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::cone_from_generators;

    #[test]
    fn orthant_with_faces_is_valid() {
        let c = AbstractConeComplex::from_cone(&RationalCone::orthant(2));
        assert_eq!(c.cones.len(), 4);
        assert!(validate_complex(&c).is_empty(), "{:?}", validate_complex(&c));
    }

    #[test]
    fn missing_zero_cone_is_one_violation() {
        let mut c = AbstractConeComplex::from_cone(&RationalCone::orthant(2));
        let zero = c.zero_cone().unwrap();
        c.cones.remove(&zero);
        c.faces.retain(|f| f.sub != zero);
        assert_eq!(validate_complex(&c), vec![Violation::MissingZeroCone]);
    }

    #[test]
    fn missing_face_and_bad_aut_detected() {
        let mut c = AbstractConeComplex::from_cone(&RationalCone::orthant(2));
        let ray = c.cones.iter().find(|(_, k)| k.dim() == 1).map(|(&i, _)| i).unwrap();
        c.faces.retain(|f| !(f.sub == ray));
        c.cones.remove(&ray);
        let v = validate_complex(&c);
        assert!(v.iter().any(|x| matches!(x, Violation::MissingFace { .. })));

        let mut d = AbstractConeComplex::from_cone(&RationalCone::orthant(2));
        let top = d.cones.iter().find(|(_, k)| k.dim() == 2).map(|(&i, _)| i).unwrap();
        let swap = LinearMap::from_i64_rows(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        d.auts.insert(top, vec![swap]);
        assert!(validate_complex(&d).contains(&Violation::AutGroupNotClosed { cone: top }));
        let shear = LinearMap::from_i64_rows(2, &[vec![1, 1], vec![0, 1]]).unwrap();
        d.auts.insert(top, vec![LinearMap::identity(2), shear]);
        assert!(validate_complex(&d).iter().any(|x| matches!(x, Violation::BadAutomorphism { .. })));
    }

    #[test]
    fn json_schema_shape() {
        let cone = cone_from_generators(&[IntVector::from_i64s(&[1])]).unwrap();
        let c = AbstractConeComplex::from_cone(&cone);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"cones":{"0":{"rank":1,"rays":[]},"1":{"rank":1,"rays":[[1]]}},"faces":[[0,1,{"matrix":[[1]]}]],"auts":{}}"#
        );
        let back: AbstractConeComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
