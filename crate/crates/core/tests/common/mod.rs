//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's own linear algebra, enumeration or canonical forms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;

use tropprod::curves::DualGraph;
use tropprod::exactgeom::IntVector;
use tropprod::tropmaps::RubberMapType;

pub type Q = BigRational;

pub fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn to_q(v: &IntVector) -> Vec<Q> {
    v.coords().iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Every `(g, n)` with a stable moduli space of dimension at most 3.
pub fn small_moduli() -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for g in 0..=2u32 {
        for n in 0..=6usize {
            let dim = 3 * g as i64 - 3 + n as i64;
            if 2 * g as i64 - 2 + n as i64 > 0 && dim <= 3 {
                out.push((g, n));
            }
        }
    }
    out
}

/// Integer vectors of length `n` summing to zero whose positive entries sum
/// to at most `d`.
pub fn contact_vectors(n: usize, d: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-d; n];
    if n == 0 {
        return vec![Vec::new()];
    }
    loop {
        if v.iter().sum::<i64>() == 0 && v.iter().filter(|&&x| x > 0).sum::<i64>() <= d {
            out.push(v.clone());
        }
        let mut i = 0;
        while i < n {
            v[i] += 1;
            if v[i] <= d {
                break;
            }
            v[i] = -d;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

/// One vector per orbit under relabeling the markings.
pub fn contact_orbits(n: usize, d: i64) -> Vec<Vec<i64>> {
    let set: BTreeSet<Vec<i64>> = contact_vectors(n, d)
        .into_iter()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect();
    set.into_iter().collect()
}

/// One pair per orbit under simultaneous relabeling of markings and
/// swapping the two factors. In each representative the first vector is
/// sorted.
pub fn pair_orbits(n: usize, d: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    let vs = contact_vectors(n, d);
    let columns = |a: &[i64], b: &[i64]| {
        let mut c: Vec<(i64, i64)> = a.iter().copied().zip(b.iter().copied()).collect();
        c.sort();
        c
    };
    let mut set = BTreeSet::new();
    for a in &vs {
        for b in &vs {
            set.insert(columns(a, b).min(columns(b, a)));
        }
    }
    set.into_iter().map(|c| c.into_iter().unzip()).collect()
}

// Linear algebra over Q.

/// Rank by Gaussian elimination.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves `sum_j t_j cols[j] = x` for linearly independent `cols`.
pub fn solve(cols: &[Vec<Q>], x: &[Q]) -> Option<Vec<Q>> {
    let k = cols.len();
    let n = x.len();
    // Augmented system: n equations in k unknowns.
    let mut m: Vec<Vec<Q>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).chain([x[i].clone()]).collect()).collect();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { return None };
        m.swap(r, p);
        let inv = Q::from_integer(1.into()) / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=k {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

/// Caratheodory: `x` lies in the cone on `gens` iff it is a nonnegative
/// combination of some linearly independent subset of them.
pub fn cone_contains(gens: &[Vec<Q>], x: &[Q]) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    let k = gens.len();
    for mask in 1u32..(1 << k) {
        let sub: Vec<Vec<Q>> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| gens[i].clone()).collect();
        if sub.len() > x.len() || rank(&sub) < sub.len() {
            continue;
        }
        if let Some(t) = solve(&sub, x) {
            if t.iter().all(|c| !c.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Strictly positive combination of all `gens`: a point of the relative
/// interior of their cone.
pub fn random_interior_point<R: Rng>(rng: &mut R, gens: &[Vec<Q>], rank: usize) -> Vec<Q> {
    let mut x = vec![Q::zero(); rank];
    for g in gens {
        let c = Q::new(BigInt::from(rng.gen_range(1..30)), BigInt::from(rng.gen_range(1..8)));
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi += &c * gi;
        }
    }
    x
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Facet normals of the full-dimensional cone on `gens` in `Z^k`: normals of
/// hyperplanes through `k - 1` independent generators with every generator
/// on one side, made primitive.
pub fn facet_oracle(gens: &[Vec<i64>], k: usize) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let idx: Vec<usize> = (0..gens.len()).collect();
    for sub in subsets(&idx, k - 1) {
        // Cofactor normal of the (k-1) x k matrix of the chosen rows.
        let rows: Vec<Vec<i128>> = sub.iter().map(|&i| gens[i].iter().map(|&x| x as i128).collect()).collect();
        let mut normal: Vec<i128> = (0..k)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                if j % 2 == 0 {
                    det(&minor)
                } else {
                    -det(&minor)
                }
            })
            .collect();
        if normal.iter().all(|&x| x == 0) {
            continue;
        }
        let dots: Vec<i128> = gens.iter().map(|g| g.iter().zip(&normal).map(|(&a, &b)| a as i128 * b).sum()).collect();
        if dots.iter().any(|&d| d > 0) && dots.iter().any(|&d| d < 0) {
            continue;
        }
        if dots.iter().any(|&d| d < 0) {
            normal.iter_mut().for_each(|x| *x = -*x);
        }
        let g = normal.iter().fold(0, |a, &b| gcd(a, b));
        out.insert(normal.iter().map(|&x| (x / g) as i64).collect());
    }
    out
}

pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k - 1);
    for s in out.iter_mut() {
        s.insert(0, items[0]);
    }
    out.extend(subsets(&items[1..], k));
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

// Graphs and types.

/// Isomorphism-invariant key: genera, sorted edges with slopes (one slope
/// list per edge, oriented from the smaller vertex) and leg vertices,
/// minimized over all vertex relabelings.
pub type Key = (Vec<u32>, Vec<(usize, usize, Vec<i64>)>, Vec<usize>);

pub fn key(genera: &[u32], edges: &[(usize, usize)], slopes: &[Vec<i64>], legs: &[usize]) -> Key {
    let nv = genera.len();
    permutations(nv)
        .into_iter()
        .map(|p| {
            let mut g = vec![0; nv];
            for v in 0..nv {
                g[p[v]] = genera[v];
            }
            let mut es: Vec<(usize, usize, Vec<i64>)> = edges
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| {
                    let s: Vec<i64> = slopes.iter().map(|f| f[e]).collect();
                    let (a, b) = (p[u], p[v]);
                    if a <= b {
                        (a, b, s)
                    } else {
                        (b, a, s.iter().map(|x| -x).collect())
                    }
                })
                .collect();
            es.sort();
            (g, es, legs.iter().map(|&l| p[l]).collect())
        })
        .min()
        .expect("at least one permutation")
}

pub fn graph_key(g: &DualGraph) -> Key {
    key(&g.genera, &g.edges, &[], &g.legs)
}

pub fn type_key(t: &RubberMapType) -> Key {
    key(&t.graph.genera, &t.graph.edges, &t.slopes, &t.graph.legs)
}

fn connected(nv: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(u, v) in edges {
            for (a, b) in [(u, v), (v, u)] {
                if a == x && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn multisets(items: usize, k: usize, start: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in start..items {
        for mut rest in multisets(items, k - 1, i) {
            rest.insert(0, i);
            out.push(rest);
        }
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut r| {
                r.insert(0, first);
                r
            })
        })
        .collect()
}

/// A stable graph: genera, edges and leg vertices.
pub type RawGraph = (Vec<u32>, Vec<(usize, usize)>, Vec<usize>);

/// All stable graphs of genus `g` with `n` legs up to isomorphism, by
/// exhaustive generation of vertex counts, edge multisets, genera and leg
/// placements.
pub fn brute_force_graphs(g: u32, n: usize) -> BTreeMap<Key, RawGraph> {
    let max_e = (3 * g as i64 - 3 + n as i64).max(0) as usize;
    let max_v = (2 * g as i64 - 2 + n as i64).max(1) as usize;
    let mut out = BTreeMap::new();
    for nv in 1..=max_v {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u..nv).map(move |v| (u, v))).collect();
        for ne in 0..=max_e {
            if ne + 1 < nv {
                continue;
            }
            let b1 = (ne + 1 - nv) as u32;
            if b1 > g {
                continue;
            }
            for choice in multisets(pairs.len(), ne, 0) {
                let edges: Vec<(usize, usize)> = choice.iter().map(|&i| pairs[i]).collect();
                if !connected(nv, &edges) {
                    continue;
                }
                for genera in compositions(g - b1, nv) {
                    let mut legs = vec![0usize; n];
                    loop {
                        let stable = (0..nv).all(|v| {
                            let val = edges.iter().map(|&(a, b)| (a == v) as i64 + (b == v) as i64).sum::<i64>()
                                + legs.iter().filter(|&&l| l == v).count() as i64;
                            2 * genera[v] as i64 - 2 + val > 0
                        });
                        if stable {
                            let k = key(&genera, &edges, &[], &legs);
                            out.entry(k).or_insert_with(|| (genera.clone(), edges.clone(), legs.clone()));
                        }
                        let mut i = 0;
                        while i < n {
                            legs[i] += 1;
                            if legs[i] < nv {
                                break;
                            }
                            legs[i] = 0;
                            i += 1;
                        }
                        if i == n {
                            break;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Whether positive edge lengths exist making the heights consistent: the
/// zero-slope edges are merged, after which no nonzero-slope edge may be a
/// loop and the edges oriented upwards must form an acyclic digraph.
pub fn realizable_by_signs(nv: usize, edges: &[(usize, usize)], slopes: &[i64]) -> bool {
    let mut class: Vec<usize> = (0..nv).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] == x {
            x
        } else {
            let r = find(c, c[x]);
            c[x] = r;
            r
        }
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        if slopes[e] == 0 {
            let (a, b) = (find(&mut class, u), find(&mut class, v));
            class[a] = b;
        }
    }
    let mut arcs = Vec::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        if slopes[e] == 0 {
            continue;
        }
        let (a, b) = (find(&mut class, u), find(&mut class, v));
        if a == b {
            return false;
        }
        arcs.push(if slopes[e] > 0 { (a, b) } else { (b, a) });
    }
    // Kahn's algorithm.
    let mut indeg = vec![0usize; nv];
    for &(_, b) in &arcs {
        indeg[b] += 1;
    }
    let mut queue: Vec<usize> = (0..nv).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(x) = queue.pop() {
        removed += 1;
        for &(a, b) in &arcs {
            if a == x {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push(b);
                }
            }
        }
    }
    removed == nv
}

/// Every realizable balanced slope assignment with `|slope| <= d` on each
/// of `graphs` (from [`brute_force_graphs`]), up to isomorphism.
pub fn brute_force_types(graphs: &BTreeMap<Key, RawGraph>, a: &[i64], d: i64) -> BTreeSet<Key> {
    let mut out = BTreeSet::new();
    for (genera, edges, legs) in graphs.values().cloned() {
        let nv = genera.len();
        let ne = edges.len();
        let width = (2 * d + 1) as usize;
        for code in 0..width.pow(ne as u32) {
            let mut c = code;
            let s: Vec<i64> = (0..ne)
                .map(|_| {
                    let x = (c % width) as i64 - d;
                    c /= width;
                    x
                })
                .collect();
            let mut out_slope = vec![0i64; nv];
            for (e, &(u, v)) in edges.iter().enumerate() {
                out_slope[u] += s[e];
                out_slope[v] -= s[e];
            }
            for (i, &v) in legs.iter().enumerate() {
                out_slope[v] += a[i];
            }
            if out_slope.iter().any(|&x| x != 0) || !realizable_by_signs(nv, &edges, &s) {
                continue;
            }
            out.insert(key(&genera, &edges, &[s], &legs));
        }
    }
    out
}

/// Heights of a type at the given lengths satisfy `h(v) - h(u) = s * l` on
/// every edge.
pub fn heights_consistent(t: &RubberMapType, lengths: &[Q], heights: &[Vec<Q>]) -> bool {
    heights.iter().zip(&t.slopes).all(|(h, s)| {
        t.graph.edges.iter().enumerate().all(|(e, &(u, v))| &h[v] - &h[u] == q(s[e]) * &lengths[e])
    })
}

/// Rank of integer rows.
pub fn int_rank(rows: &[IntVector]) -> usize {
    rank(&rows.iter().map(to_q).collect::<Vec<_>>())
}
