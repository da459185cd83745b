use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dd::extreme_rays;
use super::lattice::{integer_kernel, saturation_index};
use super::linalg::{self, coordinates, independent_subset, orthogonal_complement};
use super::{IntVector, LinearMap};
use crate::error::{Error, Result};

/// A pointed rational polyhedral cone in `R^rank`, stored with both its
/// extremal rays and its facet covectors.
///
/// Facet covectors lie in the linear span of the cone (they are the
/// orthogonal projections of any defining inequality), so they are unique up
/// to positive scaling; they are stored primitive. `equations` is the
/// canonical echelon basis of the orthogonal complement of the span.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalCone {
    rank: usize,
    rays: Vec<IntVector>,
    facets: Vec<IntVector>,
    equations: Vec<IntVector>,
    dim: usize,
}

impl std::fmt::Debug for RationalCone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cone{:?}", self.rays)
    }
}

impl RationalCone {
    pub fn zero(rank: usize) -> Self {
        RationalCone {
            rank,
            rays: Vec::new(),
            facets: Vec::new(),
            equations: (0..rank).map(|i| IntVector::unit(rank, i)).collect(),
            dim: 0,
        }
    }

    pub fn orthant(rank: usize) -> Self {
        let mut units: Vec<IntVector> = (0..rank).map(|i| IntVector::unit(rank, i)).collect();
        units.sort();
        RationalCone { rank, rays: units.clone(), facets: units, equations: Vec::new(), dim: rank }
    }

    /// Cone generated by `vectors` in `R^rank`, with redundant generators
    /// dropped and rays made primitive.
    pub fn from_generators(rank: usize, vectors: &[IntVector]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.rank() != rank) {
            return Err(Error::RankMismatch { expected: rank, found: v.rank() });
        }
        let mut gens: Vec<IntVector> = vectors.iter().filter(|v| !v.is_zero()).map(IntVector::primitive).collect();
        gens.sort();
        gens.dedup();
        if gens.is_empty() {
            return Ok(Self::zero(rank));
        }
        if let Some(c) = Self::coordinate_cone(rank, &gens) {
            return Ok(c);
        }
        let basis_idx = independent_subset(&gens, rank);
        let basis: Vec<IntVector> = basis_idx.iter().map(|&i| gens[i].clone()).collect();
        let dim = basis.len();
        if dim == gens.len() {
            return Ok(Self::simplicial(rank, basis));
        }
        // Generator coordinates in the span basis, scaled to integers.
        let coords: Vec<IntVector> = gens
            .iter()
            .map(|g| IntVector::from_rational(&coordinates(&basis, g).expect("generator in its own span")))
            .collect();
        let dual = extreme_rays(&coords, dim).expect("generators span");
        if linalg::int_rank(&dual, dim) < dim {
            return Err(Error::NotPointed);
        }
        // A generator is extremal iff the facets through it have rank dim - 1.
        let mut rays: Vec<IntVector> = gens
            .iter()
            .zip(&coords)
            .filter(|(_, c)| {
                let tight: Vec<IntVector> = dual.iter().filter(|phi| phi.dot(c).is_zero()).cloned().collect();
                linalg::int_rank(&tight, dim) + 1 == dim
            })
            .map(|(g, _)| g.clone())
            .collect();
        rays.sort();
        let gram: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|a| basis.iter().map(|b| BigRational::from_integer(a.dot(b))).collect())
            .collect();
        let gram_inv = linalg::inverse(&gram).expect("basis is independent");
        let mut facets: Vec<IntVector> = dual
            .iter()
            .map(|phi| {
                // y = sum t_j b_j with <y, b_i> = phi_i.
                let t: Vec<BigRational> = gram_inv
                    .iter()
                    .map(|row| row.iter().zip(&phi.0).map(|(g, p)| g * BigRational::from_integer(p.clone())).sum())
                    .collect();
                let y: Vec<BigRational> = (0..rank)
                    .map(|i| basis.iter().zip(&t).map(|(b, tj)| tj * BigRational::from_integer(b.0[i].clone())).sum())
                    .collect();
                IntVector::from_rational(&y)
            })
            .collect();
        facets.sort();
        facets.dedup();
        let equations = orthogonal_complement(&basis, rank);
        Ok(RationalCone { rank, rays, facets, equations, dim })
    }

    /// Fast path for cones spanned by standard basis vectors (`gens` sorted,
    /// primitive and distinct).
    fn coordinate_cone(rank: usize, gens: &[IntVector]) -> Option<Self> {
        let mut used = vec![false; rank];
        for g in gens {
            let mut nz = g.0.iter().enumerate().filter(|(_, x)| !x.is_zero());
            let (i, x) = nz.next()?;
            if nz.next().is_some() || !x.is_one() {
                return None;
            }
            used[i] = true;
        }
        let equations = (0..rank).filter(|&i| !used[i]).map(|i| IntVector::unit(rank, i)).collect();
        Some(RationalCone { rank, rays: gens.to_vec(), facets: gens.to_vec(), equations, dim: gens.len() })
    }

    /// Cone on linearly independent generators: the facets are the dual
    /// basis inside the span.
    fn simplicial(rank: usize, mut basis: Vec<IntVector>) -> Self {
        let dim = basis.len();
        let gram: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|a| basis.iter().map(|b| BigRational::from_integer(a.dot(b))).collect())
            .collect();
        let gram_inv = linalg::inverse(&gram).expect("basis is independent");
        let mut facets: Vec<IntVector> = gram_inv
            .iter()
            .map(|t| {
                let y: Vec<BigRational> = (0..rank)
                    .map(|i| basis.iter().zip(t).map(|(b, tj)| tj * BigRational::from_integer(b.0[i].clone())).sum())
                    .collect();
                IntVector::from_rational(&y)
            })
            .collect();
        facets.sort();
        let equations = orthogonal_complement(&basis, rank);
        basis.sort();
        RationalCone { rank, rays: basis, facets, equations, dim }
    }

    /// The cone `{x : e · x = 0 for e in equations, h · x >= 0 for h in inequalities}`.
    pub fn from_inequalities(rank: usize, equations: &[IntVector], inequalities: &[IntVector]) -> Result<Self> {
        if let Some(v) = equations.iter().chain(inequalities).find(|v| v.rank() != rank) {
            return Err(Error::RankMismatch { expected: rank, found: v.rank() });
        }
        let span = orthogonal_complement(equations, rank);
        let k = span.len();
        if k == 0 {
            return Ok(Self::zero(rank));
        }
        let constraints: Vec<IntVector> =
            inequalities.iter().map(|h| IntVector(span.iter().map(|b| h.dot(b)).collect())).collect();
        let coords = extreme_rays(&constraints, k).ok_or(Error::NotPointed)?;
        let gens: Vec<IntVector> = coords
            .iter()
            .map(|c| {
                let mut v = IntVector::zeros(rank);
                for (cj, b) in c.0.iter().zip(&span) {
                    v = v.add(&b.scale(cj));
                }
                v
            })
            .collect();
        Self::from_generators(rank, &gens)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn facets(&self) -> &[IntVector] {
        &self.facets
    }

    /// Canonical basis of the equations of the linear span.
    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    pub fn in_span(&self, x: &IntVector) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.in_span(x) && self.facets.iter().all(|f| !f.dot(x).is_negative())
    }

    pub fn contains_rational(&self, x: &[BigRational]) -> bool {
        self.contains(&IntVector::from_rational(x))
    }

    /// Membership in the relative interior. The zero cone is its own
    /// relative interior.
    pub fn relint_contains(&self, x: &IntVector) -> bool {
        self.in_span(x) && self.facets.iter().all(|f| f.dot(x).is_positive()) && (self.dim > 0 || x.is_zero())
    }

    pub fn contains_cone(&self, other: &RationalCone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
    }

    /// Sum of the rays: an integral point of the relative interior.
    pub fn interior_point(&self) -> IntVector {
        self.rays.iter().fold(IntVector::zeros(self.rank), |acc, r| acc.add(r))
    }

    /// Rays on which the facet `f` vanishes.
    fn facet_rays(&self, f: &IntVector) -> BTreeSet<usize> {
        (0..self.rays.len()).filter(|&i| f.dot(&self.rays[i]).is_zero()).collect()
    }

    fn from_extremal_subset(&self, idx: &BTreeSet<usize>) -> RationalCone {
        let gens: Vec<IntVector> = idx.iter().map(|&i| self.rays[i].clone()).collect();
        RationalCone::from_generators(self.rank, &gens).expect("faces of pointed cones are pointed")
    }

    /// All faces, including the zero face and the cone itself, sorted by
    /// dimension and then canonically.
    pub fn faces(&self) -> Vec<RationalCone> {
        let full: BTreeSet<usize> = (0..self.rays.len()).collect();
        let facet_sets: Vec<BTreeSet<usize>> = self.facets.iter().map(|f| self.facet_rays(f)).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut stack = vec![full];
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            for fs in &facet_sets {
                let t: BTreeSet<usize> = s.intersection(fs).copied().collect();
                if t.len() < s.len() && !seen.contains(&t) {
                    stack.push(t);
                }
            }
        }
        let mut faces: Vec<RationalCone> = seen.iter().map(|s| self.from_extremal_subset(s)).collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.cmp(b)));
        faces.dedup();
        faces
    }

    /// Smallest face containing `x` (assumed to lie in the cone).
    pub fn carrier_face(&self, x: &IntVector) -> RationalCone {
        let idx: BTreeSet<usize> = self
            .facets
            .iter()
            .filter(|f| f.dot(x).is_zero())
            .fold((0..self.rays.len()).collect(), |acc: BTreeSet<usize>, f| {
                acc.intersection(&self.facet_rays(f)).copied().collect()
            });
        self.from_extremal_subset(&idx)
    }

    pub fn is_face(&self, other: &RationalCone) -> bool {
        if !self.contains_cone(other) {
            return false;
        }
        self.carrier_face(&other.interior_point()) == *other
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Saturated lattice basis of the span of the cone.
    pub fn span_lattice_basis(&self) -> Vec<IntVector> {
        integer_kernel(&self.equations, self.rank)
    }
}

/// Cone generated by `vectors`, all of rank `vectors[0].rank()`.
pub fn cone_from_generators(vectors: &[IntVector]) -> Result<RationalCone> {
    let rank = vectors.first().map_or(0, IntVector::rank);
    RationalCone::from_generators(rank, vectors)
}

pub fn dual_description(cone: &RationalCone) -> Vec<IntVector> {
    cone.facets.clone()
}

pub fn intersect(a: &RationalCone, b: &RationalCone) -> RationalCone {
    assert_eq!(a.rank, b.rank, "intersecting cones of different ranks");
    let eqs: Vec<IntVector> = a.equations.iter().chain(&b.equations).cloned().collect();
    let ineqs: Vec<IntVector> = a.facets.iter().chain(&b.facets).cloned().collect();
    RationalCone::from_inequalities(a.rank, &eqs, &ineqs).expect("intersection of pointed cones is pointed")
}

/// `c ∩ {h >= 0}` and `c ∩ {h <= 0}`.
pub fn split(c: &RationalCone, h: &IntVector) -> (RationalCone, RationalCone) {
    let half = |h: &IntVector| {
        let mut ineqs = c.facets.clone();
        ineqs.push(h.clone());
        RationalCone::from_inequalities(c.rank, &c.equations, &ineqs).expect("subcone of a pointed cone")
    };
    (half(h), half(&h.neg()))
}

/// Preimage `{x in c : f(x) in target}`.
pub fn preimage_within(f: &LinearMap, c: &RationalCone, target: &RationalCone) -> RationalCone {
    let mut eqs = c.equations.clone();
    eqs.extend(target.equations.iter().map(|e| f.pull_covector(e)));
    let mut ineqs = c.facets.clone();
    ineqs.extend(target.facets.iter().map(|h| f.pull_covector(h)));
    RationalCone::from_inequalities(c.rank, &eqs, &ineqs).expect("subcone of a pointed cone")
}

pub fn image_cone(f: &LinearMap, c: &RationalCone) -> Result<RationalCone> {
    if f.source_rank != c.rank {
        return Err(Error::RankMismatch { expected: f.source_rank, found: c.rank });
    }
    let imgs: Vec<IntVector> = c.rays.iter().map(|r| f.apply(r)).collect();
    RationalCone::from_generators(f.target_rank, &imgs)
}

/// Simplicial with rays forming a basis of the saturated lattice of the span.
pub fn is_unimodular(c: &RationalCone) -> bool {
    c.is_simplicial() && saturation_index(&c.rays).is_one()
}

/// Multiplicity of a simplicial cone: index of the ray lattice in the
/// saturated lattice of the span.
pub fn multiplicity(c: &RationalCone) -> BigInt {
    saturation_index(&c.rays)
}

/// Whether `f` maps the lattice points of the span of `c` onto the lattice
/// points of the span of `f(c)`. `target` is the cone of the codomain that
/// `f(c)` lands in; it must contain the image.
pub fn lattice_surjective(f: &LinearMap, c: &RationalCone, target: &RationalCone) -> bool {
    debug_assert!(c.rays.iter().all(|r| target.contains(&f.apply(r))));
    let imgs: Vec<IntVector> = c.span_lattice_basis().iter().map(|b| f.apply(b)).filter(|v| !v.is_zero()).collect();
    saturation_index(&imgs).is_one()
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    rank: usize,
    rays: Vec<IntVector>,
}

impl Serialize for RationalCone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConeRepr { rank: self.rank, rays: self.rays.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalCone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ConeRepr::deserialize(d)?;
        RationalCone::from_generators(repr.rank, &repr.rays).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    fn cone(gens: &[&[i64]]) -> RationalCone {
        cone_from_generators(&gens.iter().map(|g| iv(g)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn generators_are_canonicalized() {
        assert_eq!(cone(&[&[2, 0], &[0, 4]]).rays(), &[iv(&[0, 1]), iv(&[1, 0])]);
        assert_eq!(cone(&[&[1, 0], &[1, 1], &[0, 1]]).rays(), &[iv(&[0, 1]), iv(&[1, 0])]);
        let diag = cone(&[&[1, 1, 1]]);
        assert_eq!(diag.rays(), &[iv(&[1, 1, 1])]);
        assert_eq!(diag.dim(), 1);
    }

    #[test]
    fn lines_and_rank_errors() {
        assert_eq!(cone_from_generators(&[iv(&[1, 0]), iv(&[-1, 0])]), Err(Error::NotPointed));
        assert_eq!(
            cone_from_generators(&[iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, -1])]),
            Err(Error::NotPointed)
        );
        assert!(matches!(cone_from_generators(&[iv(&[1, 0]), iv(&[1])]), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn dual_descriptions() {
        assert_eq!(dual_description(&RationalCone::orthant(2)), vec![iv(&[0, 1]), iv(&[1, 0])]);
        let ray = cone(&[&[1, 2]]);
        assert_eq!(ray.facets(), &[iv(&[1, 2])]);
        assert_eq!(ray.equations(), &[iv(&[2, -1])]);
        let c = cone(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]]);
        assert_eq!(c.facets(), &[iv(&[0, 0, 1]), iv(&[0, 1, -1]), iv(&[1, 0, -1])]);
    }

    #[test]
    fn intersections() {
        let o = RationalCone::orthant(3);
        assert_eq!(intersect(&o, &o), o);
        let diag = cone(&[&[1, 1, 1]]);
        let face = cone(&[&[1, 0, 0], &[0, 1, 0]]);
        assert!(intersect(&diag, &face).is_zero());
        let a = cone(&[&[1, 0], &[1, 1]]);
        let b = cone(&[&[1, 1], &[0, 1]]);
        assert_eq!(intersect(&a, &b), cone(&[&[1, 1]]));
    }

    #[test]
    fn images() {
        let o3 = RationalCone::orthant(3);
        assert_eq!(image_cone(&LinearMap::identity(3), &o3).unwrap(), o3);
        let proj = LinearMap::from_i64_rows(3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(image_cone(&proj, &o3).unwrap(), RationalCone::orthant(2));
        let sum = LinearMap::from_i64_rows(2, &[vec![1, 1]]).unwrap();
        assert_eq!(image_cone(&sum, &RationalCone::orthant(2)).unwrap(), RationalCone::orthant(1));
        let flip = LinearMap::from_i64_rows(1, &[vec![1], vec![-1]]).unwrap();
        let diff = LinearMap::from_i64_rows(2, &[vec![1, -1]]).unwrap();
        assert!(image_cone(&flip, &RationalCone::orthant(1)).is_ok());
        assert_eq!(image_cone(&diff, &RationalCone::orthant(2)), Err(Error::NotPointed));
    }

    #[test]
    fn unimodularity() {
        assert!(is_unimodular(&RationalCone::orthant(3)));
        assert!(!is_unimodular(&cone(&[&[1, 0], &[1, 2]])));
        assert!(is_unimodular(&RationalCone::zero(4)));
        assert!(is_unimodular(&cone(&[&[1, 1, 1]])));
    }

    #[test]
    fn surjectivity_on_lattices() {
        let o3 = RationalCone::orthant(3);
        assert!(lattice_surjective(&LinearMap::identity(3), &o3, &o3));
        let ray = RationalCone::orthant(1);
        let twice = LinearMap::from_i64_rows(1, &[vec![2]]).unwrap();
        assert!(!lattice_surjective(&twice, &ray, &ray));
        let sum = LinearMap::from_i64_rows(3, &[vec![1, 1, 1]]).unwrap();
        assert!(lattice_surjective(&sum, &o3, &ray));
        // Diagonal ray summed: (1,1) -> 2, index 2.
        let diag = cone(&[&[1, 1]]);
        let sum2 = LinearMap::from_i64_rows(2, &[vec![1, 1]]).unwrap();
        assert!(!lattice_surjective(&sum2, &diag, &ray));
    }

    #[test]
    fn faces_of_orthant_and_carrier() {
        let o = RationalCone::orthant(3);
        assert_eq!(o.faces().len(), 8);
        let c = o.carrier_face(&iv(&[2, 0, 5]));
        assert_eq!(c, cone(&[&[1, 0, 0], &[0, 0, 1]]));
        assert!(o.is_face(&c));
        assert!(!o.is_face(&cone(&[&[1, 1, 1]])));
        assert!(o.is_face(&RationalCone::zero(3)));
    }

    #[test]
    fn json_shape() {
        let c = cone(&[&[2, 0], &[0, 4]]);
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"rank":2,"rays":[[0,1],[1,0]]}"#);
        let back: RationalCone = serde_json::from_str(r#"{"rank":2,"rays":[[0,3],[1,0],[1,1]]}"#).unwrap();
        assert_eq!(back, c);
    }
}
