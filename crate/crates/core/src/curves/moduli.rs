use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::canon::{canonical_form, GraphAut};
use super::enumerate::enumerate_stable_graphs;
use super::DualGraph;
use crate::complexes::{AbstractConeComplex, ConeId, FaceEmbedding};
use crate::error::{Error, Result};
use crate::exactgeom::{LinearMap, RationalCone};

/// The tropical moduli complex: one orthant per stable graph, glued along
/// edge contractions, with graph automorphisms acting on edge coordinates.
#[derive(Clone, Debug)]
pub struct CurveModuliComplex {
    pub genus: u32,
    pub markings: usize,
    /// Canonical graph of each cone id.
    pub graphs: Vec<DualGraph>,
    pub complex: Arc<AbstractConeComplex>,
    ids: BTreeMap<DualGraph, ConeId>,
}

/// Permutation matrix sending coordinate `e` to `perm[e]`.
pub fn edge_permutation_map(perm: &[usize]) -> LinearMap {
    LinearMap::coordinate_map(perm.len(), perm)
}

impl CurveModuliComplex {
    /// Cone id of a graph in this complex, and the edge relabeling from the
    /// graph's edges to the coordinates of that cone.
    pub fn lookup(&self, g: &DualGraph) -> Option<(ConeId, Vec<usize>)> {
        let c = canonical_form(g);
        self.ids.get(&c.graph).map(|&id| (id, c.edge_map))
    }

    pub fn graph(&self, id: ConeId) -> &DualGraph {
        &self.graphs[id]
    }

    /// The map from edge coordinates of `g` into the cone of its class.
    pub fn coordinate_map_of(&self, g: &DualGraph) -> Option<(ConeId, LinearMap)> {
        self.lookup(g).map(|(id, em)| (id, edge_permutation_map(&em)))
    }
}

fn aut_maps(auts: &[GraphAut], edges: usize) -> Vec<LinearMap> {
    let set: BTreeSet<LinearMap> = auts.iter().map(|a| edge_permutation_map(&a.edges)).collect();
    if set.is_empty() {
        return vec![LinearMap::identity(edges)];
    }
    set.into_iter().collect()
}

/// Complex over all stable graphs of genus `g` with `n` legs.
pub fn build_moduli_complex(g: u32, n: usize) -> Result<CurveModuliComplex> {
    let graphs = enumerate_stable_graphs(g, n)?;
    let ids: BTreeMap<DualGraph, ConeId> = graphs.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect();
    let mut complex = AbstractConeComplex::new();
    for (id, h) in graphs.iter().enumerate() {
        complex.cones.insert(id, RationalCone::orthant(h.num_edges()));
        complex.labels.insert(id, graph_label(h));
        let auts = aut_maps(&canonical_form(h).auts, h.num_edges());
        if auts.len() > 1 {
            complex.auts.insert(id, auts);
        }
    }
    let mut faces: BTreeSet<FaceEmbedding> = BTreeSet::new();
    for (id, h) in graphs.iter().enumerate() {
        let ne = h.num_edges();
        for mask in 1u64..(1u64 << ne) {
            let set: Vec<usize> = (0..ne).filter(|&e| mask >> e & 1 == 1).collect();
            let (c, surviving) = h.contract_edges(&set)?;
            let canon = canonical_form(&c);
            let sub = *ids.get(&canon.graph).ok_or_else(|| Error::Invalid("contraction left the complex".into()))?;
            // Canonical coordinate edge_map[i] of the face is original edge surviving[i].
            let mut images = vec![0; surviving.len()];
            for (i, &e) in surviving.iter().enumerate() {
                images[canon.edge_map[i]] = e;
            }
            let map = LinearMap::coordinate_map(ne, &images);
            for a in complex.automorphisms(sub) {
                faces.insert(FaceEmbedding { sub, sup: id, map: map.compose(&a) });
            }
        }
    }
    complex.faces = faces.into_iter().collect();
    complex.close_faces_under_auts();
    Ok(CurveModuliComplex { genus: g, markings: n, graphs, complex: Arc::new(complex), ids })
}

/// Short human-readable label: genera, edges, legs.
pub fn graph_label(g: &DualGraph) -> String {
    let gen: Vec<String> = g.genera.iter().map(|x| x.to_string()).collect();
    let edges: Vec<String> = g.edges.iter().map(|(a, b)| format!("{a}{b}")).collect();
    let legs: Vec<String> = g.legs.iter().map(|x| x.to_string()).collect();
    format!("g[{}] e[{}] l[{}]", gen.join(","), edges.join(","), legs.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::validate_complex;

    #[test]
    fn m04_is_three_rays() {
        let m = build_moduli_complex(0, 4).unwrap();
        assert!(validate_complex(&m.complex).is_empty());
        assert_eq!(m.complex.cones.values().filter(|c| c.dim() == 1).count(), 3);
        assert_eq!(m.complex.max_dim(), 1);
    }

    #[test]
    fn m11_ray_has_trivial_action() {
        let m = build_moduli_complex(1, 1).unwrap();
        assert!(validate_complex(&m.complex).is_empty());
        let ray = m.complex.cones.iter().find(|(_, c)| c.dim() == 1).unwrap().0;
        assert_eq!(m.complex.automorphisms(*ray).len(), 1);
    }

    #[test]
    fn m20_and_m12_validate() {
        for (g, n) in [(2, 0), (1, 2), (0, 5)] {
            let m = build_moduli_complex(g, n).unwrap();
            assert_eq!(validate_complex(&m.complex), vec![], "({g},{n})");
        }
    }
}
