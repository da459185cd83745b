//! The end-to-end run for contact data with one or two factors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::report::{Check, Report, ReportInputs, SubdivisionSummary, Witness};
use crate::complexes::{
    check_partition, check_subdivision, check_weak_semistable, is_union_of_cones_in, pullback_subdivision,
    refine_until_conical, ConeId, ConicalSubset, PartitionFailure, Pullback, SubdivisionOf,
};
use crate::curves::{build_moduli_complex, canonical_form, Canonical, CurveModuliComplex, DualGraph};
use crate::error::{Error, Result};
use crate::exactgeom::{image_cone, preimage_within, IntVector, LinearMap, RationalCone};
use crate::tropmaps::{
    build_map_complex, enumerate_rubber_types, fiber_product_cone, image_family, joint_map, superimpose, ContactData,
    MapModuliComplex, RubberMapType,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Make every cell of the base subdivision unimodular.
    pub unimodular: bool,
}

/// A subdivision of the moduli complex in which each image family is a union
/// of cones.
pub fn build_gamma_subdivision(m: &CurveModuliComplex, images: &[ConicalSubset], unimodular: bool) -> Result<SubdivisionOf> {
    let union = images.iter().fold(ConicalSubset::default(), |acc, s| acc.union(s));
    let s = refine_until_conical(&m.complex, &union, unimodular)?;
    for (i, img) in images.iter().enumerate() {
        if let Some((p, w)) = is_union_of_cones_in(&s, img).witness {
            return Err(Error::Invalid(format!("image family {i}, piece {p} is not a union of cones at {w:?}")));
        }
    }
    Ok(s)
}

/// Pulls the subdivision back along each forgetful morphism.
pub fn pullback_map_complexes(maps: &[&MapModuliComplex], s: &SubdivisionOf) -> Result<Vec<Pullback>> {
    maps.iter().map(|mm| pullback_subdivision(&mm.forgetful, s)).collect()
}

/// Types grouped by the canonical form of their graph.
struct TypeIndex<'a> {
    groups: BTreeMap<DualGraph, Vec<(&'a RubberMapType, Canonical)>>,
}

impl<'a> TypeIndex<'a> {
    fn new(types: &'a [RubberMapType]) -> Self {
        let mut groups: BTreeMap<DualGraph, Vec<(&RubberMapType, Canonical)>> = BTreeMap::new();
        for t in types {
            let c = canonical_form(&t.graph);
            groups.entry(c.graph.clone()).or_default().push((t, c));
        }
        TypeIndex { groups }
    }

    fn over(&self, graph: &DualGraph) -> Vec<RubberMapType> {
        let cg = canonical_form(graph);
        let mut out = BTreeSet::new();
        let Some(group) = self.groups.get(&cg.graph) else {
            return Vec::new();
        };
        let mut vinv = vec![0; cg.vertex_map.len()];
        for (v, &p) in cg.vertex_map.iter().enumerate() {
            vinv[p] = v;
        }
        let mut einv = vec![0; cg.edge_map.len()];
        for (e, &p) in cg.edge_map.iter().enumerate() {
            einv[p] = e;
        }
        // Automorphisms of the canonical graph, conjugated to `graph`.
        let auts: Vec<(Vec<usize>, Vec<usize>)> = cg
            .auts
            .iter()
            .map(|a| {
                let av = (0..vinv.len()).map(|v| vinv[a.vertices[cg.vertex_map[v]]]).collect();
                let ae = (0..einv.len()).map(|e| einv[a.edges[cg.edge_map[e]]]).collect();
                (av, ae)
            })
            .collect();
        for (t, ct) in group {
            // t -> canonical -> graph, then through each automorphism of graph.
            let vm: Vec<usize> = ct.vertex_map.iter().map(|&p| vinv[p]).collect();
            let em: Vec<usize> = ct.edge_map.iter().map(|&p| einv[p]).collect();
            let base = t.relabel(&vm, &em);
            debug_assert_eq!(base.graph, *graph);
            for (av, ae) in &auts {
                out.insert(base.relabel(av, ae));
            }
            out.insert(base);
        }
        out.into_iter().collect()
    }
}

/// Versions of the types lying over `graph`, one for each way of matching
/// their graph with it. Types whose graph is not isomorphic to `graph` are
/// skipped.
pub fn labeled_types(types: &[RubberMapType], graph: &DualGraph) -> Vec<RubberMapType> {
    TypeIndex::new(types).over(graph)
}

/// Product types of all matched pairs of types over every stable graph.
pub fn product_types(m: &CurveModuliComplex, xs: &[RubberMapType], ys: &[RubberMapType]) -> Result<Vec<RubberMapType>> {
    let mut out = BTreeSet::new();
    let (ix, iy) = (TypeIndex::new(xs), TypeIndex::new(ys));
    for g in &m.graphs {
        let (lx, ly) = (ix.over(g), iy.over(g));
        for x in &lx {
            for y in &ly {
                for p in superimpose(x, y, g)? {
                    out.insert(p.ty.canonical().0);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// A failure of the fiber-product subdivision check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuFailure {
    pub graph: ConeId,
    /// Interior point of the base cell, in the coordinates of `graph`.
    pub cell: IntVector,
    pub failure: PartitionFailure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuCheck {
    pub fiber_cones: usize,
    pub failures: Vec<NuFailure>,
}

impl NuCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Over every cell of the base subdivision lying in the interior of a graph
/// cone, and every matched pair of factor types, the product cells cut out
/// the fiber product cone without overlaps or gaps.
pub fn nu_check(m: &CurveModuliComplex, xs: &[RubberMapType], ys: &[RubberMapType], s: &SubdivisionOf) -> Result<NuCheck> {
    let mut out = NuCheck::default();
    let (ix, iy) = (TypeIndex::new(xs), TypeIndex::new(ys));
    for (gid, g) in m.graphs.iter().enumerate() {
        let orthant = m.complex.cone(gid);
        let cells: Vec<&RationalCone> = s.fan(gid).iter().filter(|b| orthant.relint_contains(&b.interior_point())).collect();
        let (lx, ly) = (ix.over(g), iy.over(g));
        for x in &lx {
            for y in &ly {
                let fp = fiber_product_cone(x, y, g)?;
                let prods = superimpose(x, y, g)?;
                let dx = crate::tropmaps::decompose(&x.graph, g)?;
                let (ex, ey) = (x.graph.num_edges(), y.graph.num_edges());
                // (x, y) -> lengths on g through the x part.
                let px = dx.length_map(ex);
                let mut p = LinearMap::zero(ex + ey, g.num_edges());
                for (i, row) in px.matrix.iter().enumerate() {
                    p.matrix[i][..ex].clone_from_slice(row);
                }
                for beta in &cells {
                    let fpb = preimage_within(&p, &fp, beta);
                    if !beta.relint_contains(&p.apply(&fpb.interior_point())) {
                        continue;
                    }
                    let mut pieces = Vec::new();
                    for pr in &prods {
                        let zb = preimage_within(&pr.to_base, &pr.cone, beta);
                        let img = image_cone(&joint_map(pr), &zb)?;
                        if img.dim() == fpb.dim() {
                            pieces.push(img);
                        }
                    }
                    out.fiber_cones += 1;
                    if let Err(failure) = check_partition(&fpb, &pieces) {
                        out.failures.push(NuFailure { graph: gid, cell: beta.interior_point(), failure });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Everything built during a run, kept for inspection.
#[derive(Clone, Debug)]
pub struct Run {
    pub moduli: CurveModuliComplex,
    pub x: MapModuliComplex,
    pub y: MapModuliComplex,
    pub z: MapModuliComplex,
    pub x_types: Vec<RubberMapType>,
    pub y_types: Vec<RubberMapType>,
    pub subdivision: SubdivisionOf,
    pub pullbacks: Vec<Pullback>,
    pub report: Report,
}

/// Types of factor `i`, or of the trivial factor (zero slopes everywhere)
/// when the data has a single factor and `i` is 1.
fn factor_types(c: &ContactData, i: usize) -> Result<Vec<RubberMapType>> {
    if i < c.factors.len() {
        return enumerate_rubber_types(c, i);
    }
    let trivial = ContactData::new(c.genus, c.markings, vec![vec![0; c.markings]])?;
    enumerate_rubber_types(&trivial, 0)
}

fn semistable_check(name: &str, pb: &Pullback) -> Check {
    let r = check_weak_semistable(&pb.induced);
    let first = r.failures().next().map(|f| Witness { cone: f.cone, point: f.witness.clone().unwrap_or_default() });
    let n = r.cones.len();
    let bad = r.failures().count();
    Check::new(format!("{name} weak semistability"), r.passed(), format!("{} of {n} cones map onto cones with surjective lattice maps", n - bad))
        .with_witness(first)
}

fn partition_check(name: &str, s: &SubdivisionOf) -> Check {
    match check_subdivision(s) {
        Ok(()) => Check::new(format!("{name} subdivision partition"), true, format!("{} original cones", s.original.cones.len())),
        Err((id, f)) => Check::new(format!("{name} subdivision partition"), false, format!("{f:?}"))
            .with_witness(Some(Witness { cone: id, point: IntVector::zeros(s.original.cone(id).rank()) })),
    }
}

/// Builds the moduli complex, the map complexes of both factors and of their
/// products, a common subdivision of the base, the pullbacks, and checks
/// every polyhedral hypothesis.
pub fn run_pipeline(c: &ContactData, opts: RunOptions) -> Result<Run> {
    if c.factors.is_empty() || c.factors.len() > 2 {
        return Err(Error::Invalid("one or two factors are supported".into()));
    }
    let m = build_moduli_complex(c.genus, c.markings)?;
    let x_types = factor_types(c, 0)?;
    let y_types = factor_types(c, 1)?;
    let x = build_map_complex(&x_types, &m)?;
    let y = build_map_complex(&y_types, &m)?;
    let z = build_map_complex(&product_types(&m, &x_types, &y_types)?, &m)?;
    let images = [image_family(&x.types, &m)?, image_family(&y.types, &m)?, image_family(&z.types, &m)?];
    let s = build_gamma_subdivision(&m, &images, opts.unimodular)?;
    let pullbacks = pullback_map_complexes(&[&x, &y, &z], &s)?;

    let mut report = Report::new(ReportInputs {
        genus: c.genus,
        markings: c.markings,
        factors: c.factors.clone(),
        unimodular: opts.unimodular,
    });
    report.subdivision = SubdivisionSummary::of(&s);
    let names = ["X", "Y", "Z"];
    for (name, img) in names.iter().zip(&images) {
        let u = is_union_of_cones_in(&s, img);
        let w = u.witness.as_ref().map(|(i, p)| Witness { cone: img.pieces[*i].host, point: p.clone() });
        report.push(Check::new(format!("{name} image is a union of cones"), u.holds, format!("{} pieces", img.pieces.len())).with_witness(w));
    }
    for (name, pb) in names.iter().zip(&pullbacks) {
        report.push(semistable_check(name, pb));
    }
    report.push(partition_check("base", &s));
    for (name, pb) in names.iter().zip(&pullbacks) {
        report.push(partition_check(name, &pb.subdivision));
    }
    let nu = nu_check(&m, &x_types, &y_types, &s)?;
    let nu_swapped = nu_check(&m, &y_types, &x_types, &s)?;
    let w = nu.failures.first().map(|f| Witness { cone: f.graph, point: f.cell.clone() });
    report.push(
        Check::new("fiber product subdivision", nu.passed(), format!("{} fiber product cones, {} failures", nu.fiber_cones, nu.failures.len()))
            .with_witness(w),
    );
    report.push(Check::new(
        "factor symmetry",
        nu.passed() == nu_swapped.passed() && nu.fiber_cones == nu_swapped.fiber_cones,
        format!("swapped run: {} fiber product cones, {} failures", nu_swapped.fiber_cones, nu_swapped.failures.len()),
    ));
    for mm in [&x, &y, &z] {
        report.flagged_types.extend(mm.flagged.iter().map(|&id| mm.complex.label(id)));
    }
    report.flagged_types.sort();
    report.flagged_types.dedup();
    Ok(Run { moduli: m, x, y, z, x_types, y_types, subdivision: s, pullbacks, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_images_give_the_identity() {
        let m = build_moduli_complex(0, 4).unwrap();
        let s = build_gamma_subdivision(&m, &[], false).unwrap();
        assert!(s.is_identity());
    }

    #[test]
    fn labeled_versions_cover_the_automorphisms() {
        let t = super::super::figure1_type();
        let l = labeled_types(&[t.clone()], &t.graph);
        // Swapping the two vertices reverses every slope; edge permutations
        // fix the all-equal slopes.
        assert_eq!(l.len(), 1);
        assert!(l.iter().all(|u| u.graph == t.graph && u.is_balanced()));
    }

    #[test]
    fn genus_one_two_factors_pass() {
        let c = ContactData::new(1, 2, vec![vec![2, -2], vec![1, -1]]).unwrap();
        let run = run_pipeline(&c, RunOptions::default()).unwrap();
        assert!(run.report.passed(), "{}", run.report.to_text());
    }

    #[test]
    fn single_factor_uses_the_trivial_second_factor() {
        let c = ContactData::new(1, 2, vec![vec![2, -2]]).unwrap();
        let run = run_pipeline(&c, RunOptions::default()).unwrap();
        assert!(run.report.passed(), "{}", run.report.to_text());
        assert_eq!(run.z.types.len(), run.x.types.len());
    }
}
