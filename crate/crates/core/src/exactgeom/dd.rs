//! Double description: extreme rays of `{x in Q^d : a · x >= 0 for all a}`
//! by incremental insertion of the inequalities.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{self, to_rational_rows};
use super::IntVector;

#[derive(Clone)]
struct Ray {
    v: IntVector,
    zeros: BTreeSet<usize>,
}

/// Extreme rays of the cone cut out by `constraints` in `Q^dim`.
///
/// Returns `None` when the constraints have rank below `dim`, i.e. when the
/// cone contains a line. Rays come back primitive and sorted.
pub fn extreme_rays(constraints: &[IntVector], dim: usize) -> Option<Vec<IntVector>> {
    if dim == 0 {
        return Some(Vec::new());
    }
    let basis_idx = linalg::independent_subset(constraints, dim);
    if basis_idx.len() < dim {
        return None;
    }
    // Initial simplicial cone: the dual basis of the chosen constraints.
    let a0: Vec<IntVector> = basis_idx.iter().map(|&i| constraints[i].clone()).collect();
    let inv = linalg::inverse(&to_rational_rows(&a0)).expect("independent rows");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<_> = inv.iter().map(|row| row[j].clone()).collect();
            let v = IntVector::from_rational(&col);
            let zeros = basis_idx.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &i)| i).collect();
            Ray { v, zeros }
        })
        .collect();

    for (ci, a) in constraints.iter().enumerate() {
        if basis_idx.contains(&ci) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| a.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (i, r) in rays.iter().enumerate() {
            if vals[i].is_positive() {
                next.push(r.clone());
            } else if vals[i].is_zero() {
                let mut r = r.clone();
                r.zeros.insert(ci);
                next.push(r);
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common: BTreeSet<usize> = rays[p].zeros.intersection(&rays[n].zeros).copied().collect();
                if common.len() + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|w| w == p || w == n || !common.is_subset(&rays[w].zeros));
                if !adjacent {
                    continue;
                }
                // vals[p] > 0 > vals[n]; the combination is zero on `a`.
                let v = rays[n].v.scale(&vals[p]).sub(&rays[p].v.scale(&vals[n])).primitive();
                let mut zeros = common;
                zeros.insert(ci);
                next.push(Ray { v, zeros });
            }
        }
        rays = next;
    }
    let mut out: Vec<IntVector> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = [iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])];
        let mut expected = c.to_vec();
        expected.sort();
        assert_eq!(extreme_rays(&c, 3).unwrap(), expected);
    }

    #[test]
    fn square_pyramid() {
        // Dual of the cone over a square has four rays.
        let gens = [iv(&[1, 0, 1]), iv(&[0, 1, 1]), iv(&[-1, 0, 1]), iv(&[0, -1, 1])];
        let rays = extreme_rays(&gens, 3).unwrap();
        assert_eq!(rays.len(), 4);
        for r in &rays {
            assert!(gens.iter().all(|g| !g.dot(r).is_negative()));
            assert_eq!(gens.iter().filter(|g| g.dot(r).is_zero()).count(), 2);
        }
    }

    #[test]
    fn rank_deficient_is_none() {
        assert!(extreme_rays(&[iv(&[1, 0])], 2).is_none());
    }

    #[test]
    fn collapsing_to_a_ray_and_to_zero() {
        // x >= 0, y >= 0, x - y >= 0, y - x >= 0 : the diagonal ray.
        let c = [iv(&[1, 0]), iv(&[0, 1]), iv(&[1, -1]), iv(&[-1, 1])];
        assert_eq!(extreme_rays(&c, 2).unwrap(), vec![iv(&[1, 1])]);
        let c = [iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, 0]), iv(&[0, -1])];
        assert!(extreme_rays(&c, 2).unwrap().is_empty());
    }
}
