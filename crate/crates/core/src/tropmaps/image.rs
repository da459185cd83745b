use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::types::{ModuliCone, RubberMapType};
use crate::complexes::{AbstractConeComplex, ComplexMorphism, ConeId, ConeMap, ConicalSubset, FaceEmbedding, Piece};
use crate::curves::CurveModuliComplex;
use crate::error::{Error, Result};
use crate::exactgeom::{image_cone, LinearMap};

/// The map from edge lengths of `t` to the cone of its stabilized graph.
pub fn forgetful_map(t: &RubberMapType, m: &CurveModuliComplex) -> Result<ConeMap> {
    let (sg, p) = t.graph.stabilize()?;
    let (target, l) = m
        .coordinate_map_of(&sg)
        .ok_or_else(|| Error::Invalid("stabilized graph is not in the moduli complex".into()))?;
    Ok(ConeMap { target, map: l.compose(&p) })
}

/// Image of the moduli cone of `t` inside the cone of its stabilized graph.
pub fn forgetful_image(t: &RubberMapType, m: &CurveModuliComplex) -> Result<Piece> {
    let cm = forgetful_map(t, m)?;
    let cone = image_cone(&cm.map, &t.moduli_cone().cone)?;
    Ok(Piece { host: cm.target, cone })
}

/// Union of the forgetful images of a list of types.
pub fn image_family(types: &[RubberMapType], m: &CurveModuliComplex) -> Result<ConicalSubset> {
    Ok(ConicalSubset::new(types.iter().map(|t| forgetful_image(t, m)).collect::<Result<_>>()?))
}

/// Cone complex of map types glued along edge contractions, with the
/// forgetful morphism to the moduli complex of curves.
#[derive(Clone, Debug)]
pub struct MapModuliComplex {
    /// Canonical type of each cone id.
    pub types: Vec<RubberMapType>,
    pub moduli: Vec<ModuliCone>,
    pub complex: Arc<AbstractConeComplex>,
    pub forgetful: ComplexMorphism,
    /// Input types dropped because no positive edge lengths realize them.
    pub excluded: Vec<RubberMapType>,
    /// Cones whose type contracts a cycle to a point in every factor.
    pub flagged: Vec<ConeId>,
    ids: BTreeMap<RubberMapType, ConeId>,
}

impl MapModuliComplex {
    /// Cone id of a type and the position of each of its edges in that cone.
    pub fn lookup(&self, t: &RubberMapType) -> Option<(ConeId, Vec<usize>)> {
        let (c, em) = t.canonical();
        self.ids.get(&c).map(|&id| (id, em))
    }
}

/// Contracted types of every proper face of the moduli cone of `t`, each
/// with the list of edges of `t` surviving in it.
fn face_types(t: &RubberMapType, m: &ModuliCone) -> Result<Vec<(RubberMapType, Vec<usize>)>> {
    let mut out = Vec::new();
    for f in m.cone.faces().into_iter().filter(|f| *f != m.cone) {
        let p = f.interior_point();
        let set: Vec<usize> = (0..t.graph.num_edges()).filter(|&e| p.coords()[e].sign() == num_bigint::Sign::NoSign).collect();
        let (_, surviving) = t.graph.contract_edges(&set)?;
        out.push((t.contract(&set)?, surviving));
    }
    Ok(out)
}

/// Assembles the complex of the given types and all their contractions.
pub fn build_map_complex(input: &[RubberMapType], m: &CurveModuliComplex) -> Result<MapModuliComplex> {
    let mut excluded = Vec::new();
    let mut todo: Vec<RubberMapType> = Vec::new();
    for t in input {
        if t.is_realizable() {
            todo.push(t.canonical().0);
        } else {
            excluded.push(t.clone());
        }
    }
    // Contraction closure.
    let mut all: BTreeSet<RubberMapType> = BTreeSet::new();
    let mut cones: BTreeMap<RubberMapType, ModuliCone> = BTreeMap::new();
    while let Some(t) = todo.pop() {
        if !all.insert(t.clone()) {
            continue;
        }
        let mc = t.moduli_cone();
        for (f, _) in face_types(&t, &mc)? {
            let c = f.canonical().0;
            if !all.contains(&c) {
                todo.push(c);
            }
        }
        cones.insert(t, mc);
    }
    let types: Vec<RubberMapType> = all.into_iter().collect();
    let ids: BTreeMap<RubberMapType, ConeId> = types.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut complex = AbstractConeComplex::new();
    let mut moduli = Vec::new();
    let mut flagged = Vec::new();
    for (id, t) in types.iter().enumerate() {
        let mc = cones.remove(t).expect("cone computed during closure");
        complex.cones.insert(id, mc.cone.clone());
        complex.labels.insert(id, type_label(t));
        let auts: Vec<LinearMap> = t.automorphisms().iter().map(|p| LinearMap::coordinate_map(p.len(), p)).collect();
        if auts.len() > 1 {
            complex.auts.insert(id, auts);
        }
        if t.has_contracted_cycle() {
            flagged.push(id);
        }
        moduli.push(mc);
    }
    let mut faces: BTreeSet<FaceEmbedding> = BTreeSet::new();
    for (id, t) in types.iter().enumerate() {
        let ne = t.graph.num_edges();
        for (f, surviving) in face_types(t, &moduli[id])? {
            let (c, em) = f.canonical();
            let sub = ids[&c];
            let mut images = vec![0; surviving.len()];
            for (i, &e) in surviving.iter().enumerate() {
                images[em[i]] = e;
            }
            let map = LinearMap::coordinate_map(ne, &images);
            for a in complex.automorphisms(sub) {
                faces.insert(FaceEmbedding { sub, sup: id, map: map.compose(&a) });
            }
        }
    }
    complex.faces = faces.into_iter().collect();
    complex.close_faces_under_auts();
    let complex = Arc::new(complex);
    let maps = types
        .iter()
        .enumerate()
        .map(|(id, t)| forgetful_map(t, m).map(|cm| (id, cm)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let forgetful = ComplexMorphism { source: complex.clone(), target: m.complex.clone(), maps };
    Ok(MapModuliComplex { types, moduli, complex, forgetful, excluded, flagged, ids })
}

/// Short label: the graph label followed by the slopes per factor.
pub fn type_label(t: &RubberMapType) -> String {
    let s: Vec<String> = t.slopes.iter().map(|f| format!("{f:?}")).collect();
    format!("{} s{}", crate::curves::graph_label(&t.graph), s.join(""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::validate_complex;
    use crate::curves::{build_moduli_complex, DualGraph};
    use crate::exactgeom::{IntVector, RationalCone};
    use crate::tropmaps::types::tests::figure1;
    use crate::tropmaps::{enumerate_rubber_types, ContactData};

    #[test]
    fn figure1_image_is_the_diagonal_of_the_theta_cone() {
        let m = build_moduli_complex(2, 2).unwrap();
        let p = forgetful_image(&figure1(), &m).unwrap();
        assert_eq!(m.complex.cone(p.host).dim(), 3);
        assert_eq!(p.cone.rays(), &[IntVector::from_i64s(&[1, 1, 1])]);
    }

    #[test]
    fn smooth_type_has_zero_image() {
        let m = build_moduli_complex(1, 2).unwrap();
        let t = RubberMapType::new(DualGraph::smooth(1, 2), vec![vec![]], vec![vec![2, -2]]).unwrap();
        let p = forgetful_image(&t, &m).unwrap();
        assert!(p.cone.is_zero());
    }

    #[test]
    fn figure1_closure_is_ray_and_zero_cone() {
        let m = build_moduli_complex(2, 2).unwrap();
        let mm = build_map_complex(&[figure1()], &m).unwrap();
        assert_eq!(mm.types.len(), 2);
        assert!(validate_complex(&mm.complex).is_empty());
        assert!(mm.forgetful.validate().is_empty());
    }

    #[test]
    fn tree_type_gives_its_orthant() {
        let m = build_moduli_complex(0, 4).unwrap();
        let g = DualGraph::new(vec![0, 0], vec![(0, 1)], vec![0, 0, 1, 1]).unwrap();
        let t = RubberMapType::new(g, vec![vec![0]], vec![vec![1, -1, 1, -1]]).unwrap();
        let mm = build_map_complex(&[t], &m).unwrap();
        assert_eq!(mm.types.len(), 2);
        assert!(mm.complex.cones.values().any(|c| *c == RationalCone::orthant(1)));
    }

    #[test]
    fn genus_one_degree_two_complex_validates() {
        let m = build_moduli_complex(1, 2).unwrap();
        let c = ContactData::new(1, 2, vec![vec![2, -2]]).unwrap();
        let types = enumerate_rubber_types(&c, 0).unwrap();
        let mm = build_map_complex(&types, &m).unwrap();
        assert_eq!(validate_complex(&mm.complex), vec![]);
        assert_eq!(mm.forgetful.validate(), vec![]);
    }
}
