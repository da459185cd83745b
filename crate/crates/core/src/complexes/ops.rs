//! Subdivision operations: stellar insertion, hyperplane arrangements,
//! common refinement, pullback along a morphism, unimodularization.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::complex::{AbstractConeComplex, ConeId};
use super::fans::{assemble, factor_through, maximal_cells, normalize_fan, SubdivisionOf};
use super::morphism::{ComplexMorphism, ConeMap};
use crate::error::{Error, Result};
use crate::exactgeom::linalg::{coordinates, to_rational_rows};
use crate::exactgeom::{image_cone, intersect, is_unimodular, preimage_within, split, IntVector, LinearMap, RationalCone};

const MAX_FIXPOINT_ROUNDS: usize = 64;
const MAX_UNIMODULAR_STEPS: usize = 10_000;

/// Stellar subdivision of a fan at `w`: cells containing `w` are replaced by
/// the joins of `w` with their faces not containing it.
pub fn stellar_fan(cells: &[RationalCone], w: &IntVector) -> Vec<RationalCone> {
    if !cells.iter().any(|c| c.contains(w)) {
        return cells.to_vec();
    }
    let mut out = Vec::new();
    for c in cells {
        if !c.contains(w) {
            out.push(c.clone());
            continue;
        }
        for f in c.faces() {
            if !f.contains(w) {
                let mut gens = f.rays().to_vec();
                gens.push(w.clone());
                out.push(RationalCone::from_generators(c.rank(), &gens).expect("subcone of a pointed cone"));
            }
        }
    }
    normalize_fan(out)
}

/// Finds an original cone and embedding whose image is the face of `id`
/// carrying `x`, and returns `x` in that cone's coordinates.
fn carrier_in_complex(c: &AbstractConeComplex, id: ConeId, x: &IntVector) -> Result<(ConeId, IntVector)> {
    let face = c.cone(id).carrier_face(x);
    for (src, phi) in c.embeddings_into(id) {
        if image_cone(&phi, c.cone(src))? == face {
            let li = phi.left_inverse().ok_or(Error::NonIntegralFaceMap(id))?;
            return Ok((src, li.apply(x)));
        }
    }
    Err(Error::Invalid(format!("face of cone {id} is not represented in the complex")))
}

/// Stellar subdivision of an existing subdivision at the ray `ray` of the
/// original cone `id`. The whole automorphism orbit of the ray is inserted,
/// one point at a time in sorted order.
pub fn stellar_insert(s: &SubdivisionOf, id: ConeId, ray: &IntVector) -> Result<SubdivisionOf> {
    let c = &s.original;
    let cone = c.cones.get(&id).ok_or(Error::NoSuchCone(id))?;
    if ray.rank() != cone.rank() || ray.is_zero() || !cone.contains(ray) {
        return Err(Error::RayOutside { cone: id });
    }
    let ray = ray.primitive();
    let (base, local) = carrier_in_complex(c, id, &ray)?;
    let mut points: BTreeMap<ConeId, BTreeSet<IntVector>> = BTreeMap::new();
    for (dst, phi) in c.embeddings_from(base) {
        points.entry(dst).or_default().insert(phi.apply(&local));
    }
    let mut fans = s.fans().clone();
    for (dst, pts) in points {
        let fan = fans.get_mut(&dst).expect("every cone has a fan");
        for p in pts {
            *fan = stellar_fan(fan, &p);
        }
        *fan = symmetrize(fan, &c.automorphisms(dst));
    }
    assemble(c, fans)
}

/// Common refinement of the images of `fan` under `auts`. Sequential stellar
/// insertion of several points of one cone depends on their order; this
/// makes the result invariant.
fn symmetrize(fan: &[RationalCone], auts: &[LinearMap]) -> Vec<RationalCone> {
    let keys: BTreeSet<&[IntVector]> = fan.iter().map(RationalCone::rays).collect();
    let moved = |a: &LinearMap| -> Vec<RationalCone> {
        fan.iter()
            .map(|c| {
                let rays: Vec<IntVector> = c.rays().iter().map(|r| a.apply(r)).collect();
                RationalCone::from_generators(c.rank(), &rays).expect("automorphic image of a cell")
            })
            .collect()
    };
    let images: Vec<Vec<RationalCone>> = auts.iter().map(moved).collect();
    if images.iter().all(|im| im.iter().all(|c| keys.contains(c.rays()))) {
        return fan.to_vec();
    }
    let mut acc = maximal_cells(fan);
    for im in images {
        let m = maximal_cells(&normalize_fan(im));
        acc = maximal_cells(&normalize_fan(acc.iter().flat_map(|a| m.iter().map(move |b| intersect(a, b)))));
    }
    normalize_fan(acc)
}

/// Stellar subdivision of a complex at a ray of one of its cones.
pub fn stellar_subdivide(c: &Arc<AbstractConeComplex>, id: ConeId, ray: &IntVector) -> Result<SubdivisionOf> {
    stellar_insert(&SubdivisionOf::identity(c)?, id, ray)
}

/// Canonical form of a covector on `cone`: orthogonally projected to the
/// span, primitive, sign-normalized. `None` if it does not cut the relative
/// interior.
fn canonical_covector(cone: &RationalCone, h: &IntVector) -> Option<IntVector> {
    if cone.dim() < 2 {
        return None;
    }
    let basis = cone.span_lattice_basis();
    let b = to_rational_rows(&basis);
    let k = basis.len();
    // Projection of h onto span(basis): basis^T (B B^T)^{-1} B h.
    let gram: Vec<Vec<BigRational>> =
        (0..k).map(|i| (0..k).map(|j| b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum()).collect()).collect();
    let inv = crate::exactgeom::linalg::inverse(&gram)?;
    let bh: Vec<BigRational> = b.iter().map(|row| row.iter().zip(h.coords()).map(|(x, y)| x * y).sum()).collect();
    let coef: Vec<BigRational> = (0..k).map(|i| (0..k).map(|j| &inv[i][j] * &bh[j]).sum()).collect();
    let proj: Vec<BigRational> = (0..cone.rank())
        .map(|t| (0..k).map(|i| &coef[i] * &b[i][t]).sum::<BigRational>())
        .collect();
    let v = IntVector::from_rational(&proj);
    if v.is_zero() {
        return None;
    }
    let vals: Vec<BigInt> = cone.rays().iter().map(|r| v.dot(r)).collect();
    if !(vals.iter().any(Signed::is_positive) && vals.iter().any(Signed::is_negative)) {
        return None;
    }
    Some(v.line_normal())
}

/// Closes per-cone covector sets under restriction to faces, extension from
/// faces, and automorphisms.
pub fn close_covectors(
    c: &AbstractConeComplex,
    covectors: &BTreeMap<ConeId, Vec<IntVector>>,
) -> Result<BTreeMap<ConeId, BTreeSet<IntVector>>> {
    let mut h: BTreeMap<ConeId, BTreeSet<IntVector>> = c.cones.keys().map(|&id| (id, BTreeSet::new())).collect();
    for (id, hs) in covectors {
        let cone = c.cones.get(id).ok_or(Error::NoSuchCone(*id))?;
        for v in hs {
            if v.rank() != cone.rank() {
                return Err(Error::RankMismatch { expected: cone.rank(), found: v.rank() });
            }
            if let Some(v) = canonical_covector(cone, v) {
                h.get_mut(id).unwrap().insert(v);
            }
        }
    }
    let inverses: Vec<Option<LinearMap>> = c.faces.iter().map(|f| f.map.left_inverse()).collect();
    for _ in 0..MAX_FIXPOINT_ROUNDS {
        let mut changed = false;
        for (&id, auts) in &c.auts {
            let add: Vec<IntVector> = h[&id]
                .iter()
                .flat_map(|v| auts.iter().map(move |a| a.pull_covector(v)))
                .filter_map(|v| canonical_covector(&c.cones[&id], &v))
                .collect();
            let set = h.get_mut(&id).unwrap();
            for v in add {
                changed |= set.insert(v);
            }
        }
        for (f, inv) in c.faces.iter().zip(&inverses) {
            let down: Vec<IntVector> = h[&f.sup]
                .iter()
                .filter_map(|v| canonical_covector(&c.cones[&f.sub], &f.map.pull_covector(v)))
                .collect();
            let up: Vec<IntVector> = if h[&f.sub].is_empty() {
                Vec::new()
            } else {
                let inv = inv.as_ref().ok_or(Error::NonIntegralFaceMap(f.sup))?;
                h[&f.sub]
                    .iter()
                    .filter_map(|v| canonical_covector(&c.cones[&f.sup], &inv.pull_covector(v)))
                    .collect()
            };
            for v in down {
                changed |= h.get_mut(&f.sub).unwrap().insert(v);
            }
            for v in up {
                changed |= h.get_mut(&f.sup).unwrap().insert(v);
            }
        }
        if !changed {
            return Ok(h);
        }
    }
    Err(Error::FixpointDiverged(MAX_FIXPOINT_ROUNDS))
}

/// All cells of the arrangement of `hs` inside `cone`.
pub fn arrangement_fan(cone: &RationalCone, hs: &BTreeSet<IntVector>) -> Vec<RationalCone> {
    let mut chambers = vec![cone.clone()];
    for h in hs {
        let mut next = Vec::with_capacity(chambers.len() * 2);
        for ch in chambers {
            let (a, b) = split(&ch, h);
            let mut kept = false;
            for piece in [a, b] {
                if piece.dim() == ch.dim() {
                    next.push(piece);
                    kept = true;
                }
            }
            debug_assert!(kept);
        }
        chambers = next;
    }
    normalize_fan(chambers)
}

/// Slices every cone by the arrangement of its (closed) covector set.
pub fn hyperplane_refine(
    c: &Arc<AbstractConeComplex>,
    covectors: &BTreeMap<ConeId, Vec<IntVector>>,
) -> Result<SubdivisionOf> {
    let closed = close_covectors(c, covectors)?;
    let fans = c.cones.iter().map(|(&id, cone)| (id, arrangement_fan(cone, &closed[&id]))).collect();
    assemble(c, fans)
}

fn same_original(s1: &SubdivisionOf, s2: &SubdivisionOf) -> bool {
    Arc::ptr_eq(&s1.original, &s2.original) || s1.original == s2.original
}

/// Coarsest common refinement: all intersections of a cell of `s1` with a
/// cell of `s2`.
pub fn common_refinement(s1: &SubdivisionOf, s2: &SubdivisionOf) -> Result<SubdivisionOf> {
    if !same_original(s1, s2) {
        return Err(Error::Invalid("subdivisions of different complexes".into()));
    }
    let mut fans = BTreeMap::new();
    for &id in s1.original.cones.keys() {
        let (m1, m2) = (maximal_cells(s1.fan(id)), maximal_cells(s2.fan(id)));
        let cells: Vec<RationalCone> = m1.iter().flat_map(|a| m2.iter().map(move |b| intersect(a, b))).collect();
        fans.insert(id, normalize_fan(cells));
    }
    assemble(&s1.original, fans)
}

/// A pulled-back subdivision together with the induced morphism from the
/// refined source to the refined target.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub subdivision: SubdivisionOf,
    pub induced: ComplexMorphism,
}

/// Refines every source cone by the preimages of the cells of `s`, so that
/// each refined source cone maps into a single refined target cone.
pub fn pullback_subdivision(f: &ComplexMorphism, s: &SubdivisionOf) -> Result<Pullback> {
    if !(Arc::ptr_eq(&f.target, &s.original) || *f.target == *s.original) {
        return Err(Error::Invalid("subdivision does not refine the target of the morphism".into()));
    }
    let mut fans = BTreeMap::new();
    for (&id, cone) in &f.source.cones {
        let cm = f.maps.get(&id).ok_or(Error::NoSuchCone(id))?;
        let cells: Vec<RationalCone> = s
            .fan(cm.target)
            .iter()
            .map(|cell| preimage_within(&cm.map, cone, cell))
            .collect();
        fans.insert(id, normalize_fan(cells));
    }
    let subdivision = assemble(&f.source, fans)?;
    let mut maps = BTreeMap::new();
    for (&rid, kappa) in &subdivision.refined.cones {
        let host = subdivision.host(rid);
        let cm = &f.maps[&host];
        let x = cm.map.apply(&kappa.interior_point());
        let (tid, g) = s
            .locate(cm.target, &x)
            .ok_or_else(|| Error::Invalid(format!("image of refined cone {rid} leaves the target")))?;
        let map = factor_through(&g, &cm.map, cm.target)?;
        maps.insert(rid, ConeMap { target: tid, map });
    }
    let induced = ComplexMorphism { source: subdivision.refined.clone(), target: s.refined.clone(), maps };
    Ok(Pullback { subdivision, induced })
}

/// A lattice point to insert into a non-unimodular cell: the interior point
/// for non-simplicial cells, otherwise a nonzero point of the fundamental
/// parallelepiped with the smallest coefficient sum.
fn unimodular_witness(c: &RationalCone) -> IntVector {
    if !c.is_simplicial() {
        return c.interior_point().primitive();
    }
    let rays = c.rays();
    let basis = c.span_lattice_basis();
    let coords: Vec<Vec<BigRational>> =
        rays.iter().map(|r| coordinates(&basis, r).expect("ray lies in its span")).collect();
    let m = crate::exactgeom::lattice::determinant(
        &coords.iter().map(|row| row.iter().map(|q| q.to_integer()).collect()).collect::<Vec<_>>(),
    )
    .abs();
    let k = rays.len();
    let m_us: usize = m.clone().try_into().unwrap_or(usize::MAX);
    let mut best: Option<(usize, Vec<usize>, IntVector)> = None;
    let mut lam = vec![0usize; k];
    loop {
        // next lambda in base m
        let mut i = 0;
        while i < k {
            lam[i] += 1;
            if lam[i] < m_us {
                break;
            }
            lam[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        let sum: usize = lam.iter().sum();
        if best.as_ref().is_some_and(|(s, l, _)| (*s, l) <= (sum, &lam)) {
            continue;
        }
        let mut acc = vec![BigRational::zero(); c.rank()];
        for (l, r) in lam.iter().zip(rays) {
            let q = BigRational::new(BigInt::from(*l), m.clone());
            for (a, x) in acc.iter_mut().zip(r.coords()) {
                *a += &q * BigRational::from_integer(x.clone());
            }
        }
        if acc.iter().all(|q| q.is_integer()) {
            let v = IntVector(acc.into_iter().map(|q| q.to_integer()).collect());
            best = Some((sum, lam.clone(), v));
        }
    }
    best.map(|b| b.2).unwrap_or_else(|| c.interior_point())
}

/// Repeated stellar subdivision until every cell is unimodular.
pub fn unimodularize(s: &SubdivisionOf) -> Result<SubdivisionOf> {
    let mut s = s.clone();
    for _ in 0..MAX_UNIMODULAR_STEPS {
        let bad = s
            .fans()
            .iter()
            .flat_map(|(&id, fan)| fan.iter().map(move |c| (id, c)))
            .filter(|(_, c)| !is_unimodular(c))
            .min_by_key(|(id, c)| (c.dim(), *id, (*c).clone()));
        let Some((id, cell)) = bad else {
            return Ok(s);
        };
        let w = unimodular_witness(cell);
        s = stellar_insert(&s, id, &w)?;
    }
    Err(Error::FixpointDiverged(MAX_UNIMODULAR_STEPS))
}

/// Whether every cell of `fine` lies in some cell of `coarse`, cone by cone.
pub fn refines(fine: &SubdivisionOf, coarse: &SubdivisionOf) -> bool {
    fine.fans().iter().all(|(id, fan)| {
        let cm = maximal_cells(coarse.fan(*id));
        fan.iter().all(|c| cm.iter().any(|d| d.contains_cone(c)))
    })
}
