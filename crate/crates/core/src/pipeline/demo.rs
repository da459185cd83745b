//! The support of the double ramification locus and the genus-2 degree-3
//! example.

use serde::{Deserialize, Serialize};

use super::report::{Check, Report, ReportInputs, SubdivisionSummary, Witness};
use crate::complexes::{
    check_subdivision, check_weak_semistable, is_union_of_cones, is_union_of_cones_in, pullback_subdivision,
    refine_until_conical, stellar_subdivide, ConeId, ConicalSubset, SubdivisionOf,
};
use crate::curves::{build_moduli_complex, graph_label, CurveModuliComplex, DualGraph};
use crate::error::Result;
use crate::exactgeom::IntVector;
use crate::tropmaps::{build_map_complex, enumerate_rubber_types, forgetful_image, image_family, ContactData, RubberMapType};

/// One cone of the support with its codimension in the host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCone {
    pub host: ConeId,
    pub host_label: String,
    pub host_dim: usize,
    pub dim: usize,
    pub codim: usize,
}

#[derive(Clone, Debug)]
pub struct DrSupport {
    pub support: ConicalSubset,
    pub subdivision: SubdivisionOf,
    pub cones: Vec<SupportCone>,
}

/// Union of the forgetful images of all realizable types of factor `i`, and
/// the dimension of each piece against its host.
pub fn support_cones(c: &ContactData, i: usize) -> Result<(CurveModuliComplex, ConicalSubset, Vec<SupportCone>)> {
    let m = build_moduli_complex(c.genus, c.markings)?;
    let types = enumerate_rubber_types(c, i)?;
    let support = image_family(&types, &m)?;
    let cones = support
        .pieces
        .iter()
        .map(|p| {
            let host_dim = m.complex.cone(p.host).dim();
            SupportCone {
                host: p.host,
                host_label: graph_label(m.graph(p.host)),
                host_dim,
                dim: p.cone.dim(),
                codim: host_dim - p.cone.dim(),
            }
        })
        .collect();
    Ok((m, support, cones))
}

/// The support together with a subdivision of the base in which it is a
/// union of cones.
pub fn dr_support(c: &ContactData, i: usize, unimodular: bool) -> Result<DrSupport> {
    let (m, support, cones) = support_cones(c, i)?;
    let subdivision = refine_until_conical(&m.complex, &support, unimodular)?;
    Ok(DrSupport { support, subdivision, cones })
}

/// The genus-2 degree-3 rubber type on the theta graph: the legs of slope
/// 3 and -3 sit on different vertices and all three edges have slope 1.
pub fn figure1_type() -> RubberMapType {
    let g = DualGraph::new(vec![0, 0], vec![(0, 1); 3], vec![0, 1]).expect("valid graph");
    RubberMapType::new(g, vec![vec![-1, -1, -1]], vec![vec![3, -3]]).expect("valid type")
}

/// Runs the genus-2 example end to end: the moduli cone is the diagonal
/// ray, its image is not a union of cones of the theta orthant, the stellar
/// subdivision at the diagonal fixes this, and the pulled-back forgetful
/// morphism is then weakly semistable.
pub fn figure1_demo() -> Result<Report> {
    let t = figure1_type();
    let c = ContactData::new(2, 2, t.leg_slopes.clone())?;
    let mut report =
        Report::new(ReportInputs { genus: c.genus, markings: c.markings, factors: c.factors.clone(), unimodular: false });

    let mc = t.moduli_cone();
    let diag = IntVector::from_i64s(&[1, 1, 1]);
    report.push(Check::new(
        "moduli cone is the diagonal ray",
        mc.cone.dim() == 1 && mc.cone.rays() == [diag.clone()],
        format!("dimension {}, {} cycle equations", mc.cone.dim(), mc.equations.len()),
    ));

    let m = build_moduli_complex(2, 2)?;
    let piece = forgetful_image(&t, &m)?;
    let host_dim = m.complex.cone(piece.host).dim();
    report.push(Check::new(
        "image lies in a 3-dimensional cone",
        host_dim == 3 && piece.cone.rays() == [diag.clone()],
        format!("host {} of dimension {host_dim}", graph_label(m.graph(piece.host))),
    ));

    let image = ConicalSubset::new(vec![piece.clone()]);
    let before = is_union_of_cones(&m.complex, &image);
    report.push(Check::new(
        "image is not a union of cones before subdivision",
        !before.holds,
        format!("union of cones: {}", before.holds),
    ));

    let s = stellar_subdivide(&m.complex, piece.host, &diag)?;
    report.subdivision = SubdivisionSummary::of(&s);
    let after = is_union_of_cones_in(&s, &image);
    report.push(
        Check::new("image is a union of cones after stellar subdivision", after.holds, format!("union of cones: {}", after.holds))
            .with_witness(after.witness.map(|(_, p)| Witness { cone: piece.host, point: p })),
    );
    report.push(Check::new("stellar subdivision partitions every cone", check_subdivision(&s).is_ok(), String::new()));

    let mm = build_map_complex(std::slice::from_ref(&t), &m)?;
    let unrefined = check_weak_semistable(&mm.forgetful);
    report.push(Check::new(
        "cone-onto-cone fails before subdivision",
        !unrefined.onto_cones(),
        format!("{} of {} cones fail", unrefined.failures().count(), unrefined.cones.len()),
    ));
    let pb = pullback_subdivision(&mm.forgetful, &s)?;
    let r = check_weak_semistable(&pb.induced);
    let w = r.failures().next().map(|f| Witness { cone: f.cone, point: f.witness.clone().unwrap_or_default() });
    report.push(Check::new("pulled-back forgetful map is onto cones", r.onto_cones(), String::new()).with_witness(w.clone()));
    report.push(Check::new("pulled-back forgetful map is lattice surjective", r.reduced(), String::new()).with_witness(w));
    Ok(report)
}
