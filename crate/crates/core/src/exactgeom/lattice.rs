//! Integer lattice computations: determinants, Smith invariants, saturation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntVector;

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigRational>> =
        m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let d = &f * &a[c][j];
                a[i][j] -= d;
            }
        }
    }
    det.to_integer()
}

/// Nonzero invariant factors of the integer row matrix `rows`.
pub fn smith_invariants(rows: &[IntVector]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.0.clone()).collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Pick the smallest nonzero entry in the trailing block as pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..n {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    if !a[i][t].is_zero() {
                        done = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    if !a[t][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                // Divisibility condition: the pivot must divide the rest of the block.
                let bad = (t + 1..m).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| {
                    !(&a[i][j] % &a[t][t]).is_zero()
                });
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..n {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                        continue;
                    }
                }
            }
            // Move a smaller remainder into the pivot position.
            let mut best = (t, t);
            for i in t..m {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Index of the lattice generated by `vectors` inside its saturation
/// (its span intersected with the ambient lattice). `1` for the empty set.
pub fn saturation_index(vectors: &[IntVector]) -> BigInt {
    smith_invariants(vectors).into_iter().fold(BigInt::one(), |acc, d| acc * d)
}

/// A basis of the integer kernel `{x in Z^n : rows · x = 0}`.
pub fn integer_kernel(rows: &[IntVector], n: usize) -> Vec<IntVector> {
    // Column operations on rows, mirrored on an identity matrix.
    let m = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_op = |a: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in a.iter_mut() {
            let d = q * &row[src];
            row[dst] -= d;
        }
        for row in u.iter_mut() {
            let d = q * &row[src];
            row[dst] -= d;
        }
    };
    let swap_cols = |a: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in u.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut pc = 0;
    for r in 0..m {
        if pc == n {
            break;
        }
        loop {
            let nz: Vec<usize> = (pc..n).filter(|&j| !a[r][j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&j| a[r][j].abs()).unwrap();
            swap_cols(&mut a, &mut u, pc, piv);
            let mut clean = true;
            for j in pc + 1..n {
                if !a[r][j].is_zero() {
                    let q = a[r][j].div_floor(&a[r][pc]);
                    col_op(&mut a, &mut u, j, pc, &q);
                    if !a[r][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                pc += 1;
                break;
            }
        }
    }
    (pc..n).map(|j| IntVector(u.iter().map(|row| row[j].clone()).collect())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn determinants() {
        let m = vec![vec![1.into(), 2.into()], vec![3.into(), 4.into()]];
        assert_eq!(determinant(&m), BigInt::from(-2));
    }

    #[test]
    fn smith_of_small_matrices() {
        assert_eq!(smith_invariants(&[iv(&[2, 4]), iv(&[6, 8])]), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(saturation_index(&[iv(&[1, 0]), iv(&[1, 2])]), BigInt::from(2));
        assert_eq!(saturation_index(&[iv(&[1, 1, 1])]), BigInt::one());
        assert_eq!(saturation_index(&[iv(&[2, 2])]), BigInt::from(2));
        assert_eq!(saturation_index(&[]), BigInt::one());
    }

    #[test]
    fn kernel_is_saturated() {
        let k = integer_kernel(&[iv(&[2, -1, 0])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v.dot(&iv(&[2, -1, 0])).is_zero());
        }
        assert_eq!(saturation_index(&k), BigInt::one());
        let k = integer_kernel(&[iv(&[1, 0]), iv(&[0, 1])], 2);
        assert!(k.is_empty());
    }
}
