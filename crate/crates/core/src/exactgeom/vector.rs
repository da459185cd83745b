use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point of `Z^rank`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(rank: usize) -> Self {
        IntVector(vec![BigInt::zero(); rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = Self::zeros(rank);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        IntVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, a| g.gcd(a))
    }

    /// Divides out the gcd of the coordinates. The zero vector is returned unchanged.
    pub fn primitive(&self) -> IntVector {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntVector(self.0.iter().map(|a| a / &g).collect())
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Primitive representative of the line through `self` whose first nonzero
    /// coordinate is positive.
    pub fn line_normal(&self) -> IntVector {
        let p = self.primitive();
        match p.0.iter().find(|a| !a.is_zero()) {
            Some(a) if a.is_negative() => p.neg(),
            _ => p,
        }
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0.iter().map(|a| BigRational::from_integer(a.clone())).collect()
    }

    /// Smallest positive integer multiple of a rational vector, made primitive.
    pub fn from_rational(v: &[BigRational]) -> IntVector {
        let lcm = v.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        IntVector(v.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect()).primitive()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An integer matrix acting on column vectors: `target_rank` rows and
/// `source_rank` columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearMap {
    pub matrix: Vec<Vec<BigInt>>,
    pub source_rank: usize,
    pub target_rank: usize,
}

impl LinearMap {
    pub fn new(source_rank: usize, target_rank: usize, matrix: Vec<Vec<BigInt>>) -> Result<Self> {
        if matrix.len() != target_rank {
            return Err(Error::RankMismatch { expected: target_rank, found: matrix.len() });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != source_rank) {
            return Err(Error::RankMismatch { expected: source_rank, found: row.len() });
        }
        Ok(LinearMap { matrix, source_rank, target_rank })
    }

    pub fn from_i64_rows(source_rank: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let matrix = rows.iter().map(|r| r.iter().map(|&a| BigInt::from(a)).collect()).collect();
        Self::new(source_rank, rows.len(), matrix)
    }

    pub fn identity(rank: usize) -> Self {
        let matrix = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        LinearMap { matrix, source_rank: rank, target_rank: rank }
    }

    pub fn zero(source_rank: usize, target_rank: usize) -> Self {
        LinearMap { matrix: vec![vec![BigInt::zero(); source_rank]; target_rank], source_rank, target_rank }
    }

    /// The map sending basis vector `j` to basis vector `images[j]`.
    pub fn coordinate_map(target_rank: usize, images: &[usize]) -> Self {
        let mut m = Self::zero(images.len(), target_rank);
        for (j, &i) in images.iter().enumerate() {
            m.matrix[i][j] = BigInt::one();
        }
        m
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        debug_assert_eq!(v.rank(), self.source_rank);
        IntVector(self.matrix.iter().map(|row| row.iter().zip(&v.0).map(|(a, b)| a * b).sum()).collect())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMap) -> LinearMap {
        assert_eq!(self.source_rank, inner.target_rank, "composition rank mismatch");
        let matrix = (0..self.target_rank)
            .map(|i| {
                (0..inner.source_rank)
                    .map(|j| (0..self.source_rank).map(|k| &self.matrix[i][k] * &inner.matrix[k][j]).sum())
                    .collect()
            })
            .collect();
        LinearMap { matrix, source_rank: inner.source_rank, target_rank: self.target_rank }
    }

    pub fn transpose(&self) -> LinearMap {
        let matrix = (0..self.source_rank)
            .map(|j| (0..self.target_rank).map(|i| self.matrix[i][j].clone()).collect())
            .collect();
        LinearMap { matrix, source_rank: self.target_rank, target_rank: self.source_rank }
    }

    /// Pulls a covector on the target back to the source.
    pub fn pull_covector(&self, h: &IntVector) -> IntVector {
        self.transpose().apply(h)
    }

    pub fn column(&self, j: usize) -> IntVector {
        IntVector(self.matrix.iter().map(|r| r[j].clone()).collect())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.source_rank) && self.source_rank == self.target_rank
    }

    /// Integral left inverse, when the map is injective and a rational left
    /// inverse happens to be integral (always the case for partial
    /// permutation matrices).
    pub fn left_inverse(&self) -> Option<LinearMap> {
        if self.is_partial_permutation() {
            return Some(self.transpose());
        }
        let rows: Vec<Vec<BigRational>> = self
            .transpose()
            .matrix
            .iter()
            .map(|r| r.iter().map(|a| BigRational::from_integer(a.clone())).collect())
            .collect();
        // (M^T M)^{-1} M^T
        let mt = rows;
        let n = self.source_rank;
        let gram: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| mt[i].iter().zip(&mt[j]).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let inv = super::linalg::inverse(&gram)?;
        let mut out = Vec::with_capacity(n);
        for inv_row in &inv {
            let mut row = Vec::with_capacity(self.target_rank);
            for t in 0..self.target_rank {
                let q: BigRational = (0..n).map(|k| &inv_row[k] * &mt[k][t]).sum();
                if !q.is_integer() {
                    return None;
                }
                row.push(q.to_integer());
            }
            out.push(row);
        }
        Some(LinearMap { matrix: out, source_rank: self.target_rank, target_rank: n })
    }

    pub fn is_partial_permutation(&self) -> bool {
        let mut row_used = vec![false; self.target_rank];
        for j in 0..self.source_rank {
            let mut ones = 0;
            for i in 0..self.target_rank {
                let a = &self.matrix[i][j];
                if a.is_one() {
                    if row_used[i] {
                        return false;
                    }
                    row_used[i] = true;
                    ones += 1;
                } else if !a.is_zero() {
                    return false;
                }
            }
            if ones != 1 {
                return false;
            }
        }
        true
    }

    /// Determinant of a square map.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.source_rank, self.target_rank);
        super::lattice::determinant(&self.matrix)
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.matrix.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", IntVector(row.clone()))?;
        }
        write!(f, "]")
    }
}

// JSON: integers are emitted as numbers when they fit in an i64 and as
// decimal strings otherwise.

struct BigIntRepr<'a>(&'a BigInt);

impl Serialize for BigIntRepr<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct BigIntOwned(BigInt);

impl<'de> Deserialize<'de> for BigIntOwned {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = BigIntOwned;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                Ok(BigIntOwned(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(BigIntOwned(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                v.parse().map(BigIntOwned).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for a in &self.0 {
            seq.serialize_element(&BigIntRepr(a))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntVector;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(BigIntOwned(a)) = seq.next_element()? {
                    out.push(a);
                }
                Ok(IntVector(out))
            }
        }
        d.deserialize_seq(V)
    }
}

#[derive(Serialize, Deserialize)]
struct LinearMapRepr {
    matrix: Vec<IntVector>,
    /// Needed only when the matrix has no rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_rank: Option<usize>,
}

impl Serialize for LinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinearMapRepr {
            matrix: self.matrix.iter().map(|r| IntVector(r.clone())).collect(),
            source_rank: (self.target_rank == 0).then_some(self.source_rank),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LinearMapRepr::deserialize(d)?;
        let rows = repr.matrix.len();
        let source_rank = repr.source_rank.or_else(|| repr.matrix.first().map(IntVector::rank)).unwrap_or(0);
        LinearMap::new(source_rank, rows, repr.matrix.into_iter().map(|r| r.0).collect())
            .map_err(de::Error::custom)
    }
}
