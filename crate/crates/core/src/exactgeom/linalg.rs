//! Dense rational linear algebra over `BigRational`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::IntVector;

pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_rational_rows(rows: &[IntVector]) -> RatMatrix {
    rows.iter().map(IntVector::to_rational).collect()
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &RatMatrix, ncols: usize) -> (RatMatrix, Vec<usize>) {
    let mut m: RatMatrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &RatMatrix, ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

pub fn int_rank(rows: &[IntVector], ncols: usize) -> usize {
    rank(&to_rational_rows(rows), ncols)
}

/// Basis of `{x : rows · x = 0}`, one vector per free column.
pub fn nullspace(rows: &RatMatrix, ncols: usize) -> RatMatrix {
    let (r, pivots) = rref(rows, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Canonical primitive integer basis of the orthogonal complement of the
/// span of `rows`: the reduced echelon basis of the kernel, each row scaled
/// to a primitive integer vector.
pub fn orthogonal_complement(rows: &[IntVector], ncols: usize) -> Vec<IntVector> {
    let kernel = nullspace(&to_rational_rows(rows), ncols);
    let (r, _) = rref(&kernel, ncols);
    r.iter().map(|v| IntVector::from_rational(v)).collect()
}

/// Indices of a greedily chosen maximal linearly independent subset.
pub fn independent_subset(rows: &[IntVector], ncols: usize) -> Vec<usize> {
    // Echelon rows with their pivot columns, kept normalized at the pivot.
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut idx = Vec::new();
    for (i, v) in rows.iter().enumerate() {
        let mut x = v.to_rational();
        for (p, row) in &echelon {
            if !x[*p].is_zero() {
                let f = x[*p].clone();
                for (xj, rj) in x.iter_mut().zip(row) {
                    *xj -= &f * rj;
                }
            }
        }
        if let Some(p) = x.iter().position(|c| !c.is_zero()) {
            let inv = BigRational::one() / &x[p];
            for xj in x.iter_mut() {
                *xj *= &inv;
            }
            echelon.push((p, x));
            idx.push(i);
            if idx.len() == ncols {
                break;
            }
        }
    }
    idx
}

pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Coordinates of `v` in terms of the independent vectors `basis`, if `v`
/// lies in their span.
pub fn coordinates(basis: &[IntVector], v: &IntVector) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let n = v.rank();
    // Solve sum c_j basis_j = v: rows indexed by ambient coordinate.
    let rows: RatMatrix = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| BigRational::from_integer(b.0[i].clone())).collect();
            r.push(BigRational::from_integer(v.0[i].clone()));
            r
        })
        .collect();
    let (r, pivots) = rref(&rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![BigRational::zero(); k];
    for (row, &p) in r.iter().zip(&pivots) {
        c[p] = row[k].clone();
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn complement_of_ray() {
        assert_eq!(orthogonal_complement(&[iv(&[1, 2])], 2), vec![iv(&[2, -1])]);
        assert_eq!(orthogonal_complement(&[], 2), vec![iv(&[1, 0]), iv(&[0, 1])]);
        assert!(orthogonal_complement(&[iv(&[1, 0]), iv(&[0, 1])], 2).is_empty());
    }

    #[test]
    fn coordinates_and_inverse() {
        let basis = [iv(&[1, 1, 0]), iv(&[0, 1, 1])];
        let c = coordinates(&basis, &iv(&[2, 5, 3])).unwrap();
        assert_eq!(c, vec![BigRational::from_integer(2.into()), BigRational::from_integer(3.into())]);
        assert!(coordinates(&basis, &iv(&[1, 0, 0])).is_none());
        let m = to_rational_rows(&[iv(&[2, 1]), iv(&[1, 1])]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, to_rational_rows(&[iv(&[1, -1]), iv(&[-1, 2])]));
        assert!(inverse(&to_rational_rows(&[iv(&[1, 2]), iv(&[2, 4])])).is_none());
    }
}
