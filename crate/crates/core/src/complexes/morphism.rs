use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::complex::{AbstractConeComplex, ConeId};
use crate::exactgeom::LinearMap;

/// Where one source cone goes: a target cone and a linear map into its
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeMap {
    pub target: ConeId,
    pub map: LinearMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMorphism {
    pub source: Arc<AbstractConeComplex>,
    pub target: Arc<AbstractConeComplex>,
    pub maps: BTreeMap<ConeId, ConeMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismViolation {
    Unmapped { cone: ConeId },
    RankMismatch { cone: ConeId },
    NotContained { cone: ConeId },
    FaceIncompatible { sub: ConeId, sup: ConeId },
}

impl ComplexMorphism {
    pub fn identity(c: &Arc<AbstractConeComplex>) -> Self {
        let maps = c
            .cones
            .iter()
            .map(|(&id, cone)| (id, ConeMap { target: id, map: LinearMap::identity(cone.rank()) }))
            .collect();
        ComplexMorphism { source: c.clone(), target: c.clone(), maps }
    }

    /// Checks that each cone lands in its target cone and that the
    /// assignment commutes with face maps up to target face maps and
    /// automorphisms.
    pub fn validate(&self) -> Vec<MorphismViolation> {
        let mut out = Vec::new();
        for (&id, cone) in &self.source.cones {
            let Some(cm) = self.maps.get(&id) else {
                out.push(MorphismViolation::Unmapped { cone: id });
                continue;
            };
            let Some(tc) = self.target.cones.get(&cm.target) else {
                out.push(MorphismViolation::Unmapped { cone: id });
                continue;
            };
            if cm.map.source_rank != cone.rank() || cm.map.target_rank != tc.rank() {
                out.push(MorphismViolation::RankMismatch { cone: id });
            } else if !cone.rays().iter().all(|r| tc.contains(&cm.map.apply(r))) {
                out.push(MorphismViolation::NotContained { cone: id });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for f in &self.source.faces {
            let (a, b) = (&self.maps[&f.sub], &self.maps[&f.sup]);
            let lhs = b.map.compose(&f.map);
            let ok = self
                .target
                .embeddings_into(b.target)
                .iter()
                .filter(|(s, _)| *s == a.target)
                .any(|(_, n)| n.compose(&a.map) == lhs);
            if !ok {
                out.push(MorphismViolation::FaceIncompatible { sub: f.sub, sup: f.sup });
            }
        }
        out
    }

    /// `other ∘ self`, when the target of `self` is the source of `other`.
    pub fn then(&self, other: &ComplexMorphism) -> ComplexMorphism {
        let maps = self
            .maps
            .iter()
            .map(|(&id, cm)| {
                let next = &other.maps[&cm.target];
                (id, ConeMap { target: next.target, map: next.map.compose(&cm.map) })
            })
            .collect();
        ComplexMorphism { source: self.source.clone(), target: other.target.clone(), maps }
    }
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    source: AbstractConeComplex,
    target: AbstractConeComplex,
    maps: BTreeMap<ConeId, ConeMap>,
}

impl Serialize for ComplexMorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MorphismRepr { source: (*self.source).clone(), target: (*self.target).clone(), maps: self.maps.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MorphismRepr::deserialize(d)?;
        Ok(ComplexMorphism { source: Arc::new(r.source), target: Arc::new(r.target), maps: r.maps })
    }
}
