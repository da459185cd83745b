use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::{canonical_form, DualGraph};
use crate::error::{Error, Result};
use crate::exactgeom::{IntVector, RationalCone};

/// Genus, number of markings and one slope vector per target factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContactData {
    pub genus: u32,
    pub markings: usize,
    pub factors: Vec<Vec<i64>>,
}

impl ContactData {
    pub fn new(genus: u32, markings: usize, factors: Vec<Vec<i64>>) -> Result<Self> {
        for (i, a) in factors.iter().enumerate() {
            if a.len() != markings {
                return Err(Error::Invalid(format!("factor {i} has {} slopes for {markings} markings", a.len())));
            }
            if a.iter().sum::<i64>() != 0 {
                return Err(Error::Invalid(format!("slopes of factor {i} do not sum to zero")));
            }
        }
        Ok(ContactData { genus, markings, factors })
    }

    /// Sum of the positive entries of factor `i`.
    pub fn degree(&self, i: usize) -> i64 {
        self.factors[i].iter().filter(|&&x| x > 0).sum()
    }

    pub fn euler_char(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.markings as i64
    }
}

/// Combinatorial type of a balanced piecewise linear map from a tropical
/// curve to a product of lines, up to translation. `slopes[f][e]` is the
/// slope of edge `e = (u, v)` in factor `f`, read from `u` towards `v`:
/// the height in that factor rises by `slope * length` along the edge.
/// `leg_slopes[f][i]` is the outgoing slope of leg `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RubberMapType {
    pub graph: DualGraph,
    pub slopes: Vec<Vec<i64>>,
    pub leg_slopes: Vec<Vec<i64>>,
}

/// Spanning tree chosen greedily in edge order (loops never enter), so the
/// tree is the lexicographically smallest edge set.
pub fn spanning_tree(g: &DualGraph) -> Vec<bool> {
    let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    g.edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                false
            } else {
                parent[a] = b;
                true
            }
        })
        .collect()
}

/// For every vertex, the signed edge path from vertex 0 inside the tree:
/// `(edge, +1)` when the edge is traversed from its first to its second end.
pub fn tree_paths(g: &DualGraph, tree: &[bool]) -> Vec<Vec<(usize, i64)>> {
    let n = g.num_vertices();
    let mut path: Vec<Option<Vec<(usize, i64)>>> = vec![None; n];
    path[0] = Some(Vec::new());
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for (e, &(u, v)) in g.edges.iter().enumerate() {
            if !tree[e] {
                continue;
            }
            let (y, sign) = if u == x { (v, 1) } else if v == x { (u, -1) } else { continue };
            if path[y].is_none() {
                let mut p = path[x].clone().unwrap();
                p.push((e, sign));
                path[y] = Some(p);
                stack.push(y);
            }
        }
    }
    path.into_iter().map(|p| p.expect("connected graph")).collect()
}

impl RubberMapType {
    pub fn new(graph: DualGraph, slopes: Vec<Vec<i64>>, leg_slopes: Vec<Vec<i64>>) -> Result<Self> {
        if slopes.len() != leg_slopes.len() {
            return Err(Error::Invalid("slope and leg-slope factor counts differ".into()));
        }
        if slopes.iter().any(|s| s.len() != graph.num_edges()) || leg_slopes.iter().any(|s| s.len() != graph.num_legs()) {
            return Err(Error::Invalid("slope vector length does not match the graph".into()));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(RubberMapType { graph, slopes, leg_slopes })
    }

    pub fn num_factors(&self) -> usize {
        self.slopes.len()
    }

    /// Signed sum of outgoing slopes at each vertex for factor `f`.
    pub fn imbalance(&self, f: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.graph.num_vertices()];
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            out[u] += self.slopes[f][e];
            out[v] -= self.slopes[f][e];
        }
        for (i, &v) in self.graph.legs.iter().enumerate() {
            out[v] += self.leg_slopes[f][i];
        }
        out
    }

    pub fn is_balanced(&self) -> bool {
        (0..self.num_factors()).all(|f| self.imbalance(f).iter().all(|&x| x == 0))
    }

    /// One row per non-tree edge per factor: total displacement around the
    /// fundamental cycle of that edge is zero.
    pub fn cycle_equations(&self) -> Vec<IntVector> {
        let g = &self.graph;
        let tree = spanning_tree(g);
        let paths = tree_paths(g, &tree);
        let ne = g.num_edges();
        let mut rows = Vec::new();
        for f in 0..self.num_factors() {
            let disp = |x: usize| {
                let mut d = vec![0i64; ne];
                for &(e, sign) in &paths[x] {
                    d[e] += sign * self.slopes[f][e];
                }
                d
            };
            for (e, &(u, v)) in g.edges.iter().enumerate() {
                if tree[e] {
                    continue;
                }
                // h(u) + s_e l_e - h(v) = 0
                let (du, dv) = (disp(u), disp(v));
                let mut row: Vec<i64> = du.iter().zip(&dv).map(|(a, b)| a - b).collect();
                row[e] += self.slopes[f][e];
                rows.push(IntVector::from_i64s(&row));
            }
        }
        rows
    }

    pub fn moduli_cone(&self) -> ModuliCone {
        let equations = self.cycle_equations();
        let ne = self.graph.num_edges();
        let units: Vec<IntVector> = (0..ne).map(|e| IntVector::unit(ne, e)).collect();
        let nonzero: Vec<IntVector> = equations.iter().filter(|r| !r.is_zero()).cloned().collect();
        let cone = RationalCone::from_inequalities(ne, &nonzero, &units).expect("subcone of the orthant");
        let degenerate = ne > 0 && cone.is_zero();
        ModuliCone { ty: self.clone(), cone, equations, degenerate }
    }

    /// Whether some choice of positive edge lengths realizes the type.
    pub fn is_realizable(&self) -> bool {
        let c = self.moduli_cone().cone;
        let p = c.interior_point();
        self.graph.num_edges() == 0 || p.coords().iter().all(Signed::is_positive)
    }

    /// Vertex heights per factor for edge lengths `lengths`, found by
    /// propagation from vertex 0. `None` if two paths disagree.
    pub fn heights(&self, lengths: &[BigRational]) -> Option<Vec<Vec<BigRational>>> {
        let g = &self.graph;
        let n = g.num_vertices();
        let mut out = Vec::new();
        for f in 0..self.num_factors() {
            let mut h: Vec<Option<BigRational>> = vec![None; n];
            h[0] = Some(BigRational::zero());
            let mut stack = vec![0];
            while let Some(x) = stack.pop() {
                let hx = h[x].clone().unwrap();
                for (e, &(u, v)) in g.edges.iter().enumerate() {
                    let d = BigRational::from_integer(BigInt::from(self.slopes[f][e])) * &lengths[e];
                    let mut visit = |y: usize, val: BigRational| -> bool {
                        match &h[y] {
                            Some(old) => *old == val,
                            None => {
                                h[y] = Some(val);
                                stack.push(y);
                                true
                            }
                        }
                    };
                    if u == x && !visit(v, &hx + &d) {
                        return None;
                    }
                    if v == x && !visit(u, &hx - &d) {
                        return None;
                    }
                }
            }
            out.push(h.into_iter().map(|x| x.expect("connected")).collect());
        }
        Some(out)
    }

    /// The type after contracting the given edges. Vertex renumbering may
    /// flip the stored orientation of a surviving edge; its slope is negated
    /// accordingly.
    pub fn contract(&self, set: &[usize]) -> Result<RubberMapType> {
        let (graph, surviving) = self.graph.contract_edges(set)?;
        let vmap = contraction_vertex_map(&self.graph, set);
        let slopes = self
            .slopes
            .iter()
            .map(|s| {
                surviving
                    .iter()
                    .map(|&e| {
                        let (u, v) = self.graph.edges[e];
                        if vmap[u] > vmap[v] {
                            -s[e]
                        } else {
                            s[e]
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(RubberMapType { graph, slopes, leg_slopes: self.leg_slopes.clone() })
    }

    /// Relabels vertices by `perm` and moves edge `e` to `edge_perm[e]`,
    /// negating slopes whose edge orientation flips.
    pub fn relabel(&self, perm: &[usize], edge_perm: &[usize]) -> RubberMapType {
        let graph = self.graph.relabel(perm, edge_perm);
        let mut slopes = vec![vec![0; self.graph.num_edges()]; self.num_factors()];
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            let flip = perm[u] > perm[v];
            for f in 0..self.num_factors() {
                slopes[f][edge_perm[e]] = if flip { -self.slopes[f][e] } else { self.slopes[f][e] };
            }
        }
        RubberMapType { graph, slopes, leg_slopes: self.leg_slopes.clone() }
    }

    /// Canonical representative and, for each edge of `self`, its position
    /// in the representative.
    pub fn canonical(&self) -> (RubberMapType, Vec<usize>) {
        let c = canonical_form(&self.graph);
        let base = self.relabel(&c.vertex_map, &c.edge_map);
        let mut best: Option<(RubberMapType, Vec<usize>)> = None;
        for a in &c.auts {
            let t = base.relabel(&a.vertices, &a.edges);
            if best.as_ref().is_none_or(|(b, _)| t.slopes < b.slopes) {
                let em = c.edge_map.iter().map(|&p| a.edges[p]).collect();
                best = Some((t, em));
            }
        }
        best.unwrap_or((base, c.edge_map))
    }

    /// Edge permutations of the (canonical) graph that preserve all slopes.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let c = canonical_form(&self.graph);
        debug_assert_eq!(c.graph, self.graph, "automorphisms of a canonical type");
        let mut out: Vec<Vec<usize>> =
            c.auts.iter().filter(|a| self.relabel(&a.vertices, &a.edges) == *self).map(|a| a.edges.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Whether some edge of nonzero length is contracted to a point in every
    /// factor while lying on a cycle.
    pub fn has_contracted_cycle(&self) -> bool {
        let tree = spanning_tree(&self.graph);
        self.graph
            .edges
            .iter()
            .enumerate()
            .any(|(e, _)| !tree[e] && self.slopes.iter().all(|s| s[e] == 0))
    }
}

/// Vertex renumbering performed by `DualGraph::contract_edges`.
pub(crate) fn contraction_vertex_map(g: &DualGraph, set: &[usize]) -> Vec<usize> {
    let nv = g.num_vertices();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        r
    }
    for &e in set {
        let (u, v) = g.edges[e];
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let roots: Vec<usize> = (0..nv).filter(|&v| find(&mut parent, v) == v).collect();
    (0..nv).map(|v| roots.binary_search(&find(&mut parent, v)).unwrap()).collect()
}

/// A moduli cone: edge lengths satisfying the cycle equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliCone {
    #[serde(rename = "type")]
    pub ty: RubberMapType,
    pub cone: RationalCone,
    pub equations: Vec<IntVector>,
    /// The cone is zero although the graph has edges.
    pub degenerate: bool,
}

#[derive(Serialize, Deserialize)]
struct TypeRepr {
    #[serde(flatten)]
    graph: DualGraph,
    slopes: BTreeMap<String, BTreeMap<String, (usize, usize, i64)>>,
    leg_slopes: BTreeMap<String, Vec<i64>>,
}

impl Serialize for RubberMapType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let slopes = self
            .slopes
            .iter()
            .enumerate()
            .map(|(f, sl)| {
                let m = self
                    .graph
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(e, &(u, v))| {
                        let x = sl[e];
                        let val = if x < 0 { (v, u, -x) } else { (u, v, x) };
                        (e.to_string(), val)
                    })
                    .collect();
                (f.to_string(), m)
            })
            .collect();
        let leg_slopes = self.leg_slopes.iter().enumerate().map(|(f, l)| (f.to_string(), l.clone())).collect();
        TypeRepr { graph: self.graph.clone(), slopes, leg_slopes }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RubberMapType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TypeRepr::deserialize(d)?;
        let nf = r.leg_slopes.len();
        let ne = r.graph.num_edges();
        let mut slopes = vec![vec![0i64; ne]; nf];
        for (f, m) in &r.slopes {
            let f: usize = f.parse().map_err(D::Error::custom)?;
            if f >= nf {
                return Err(D::Error::custom("slopes for an unknown factor"));
            }
            for (e, &(tail, head, x)) in m {
                let e: usize = e.parse().map_err(D::Error::custom)?;
                if e >= ne || x < 0 {
                    return Err(D::Error::custom("bad edge slope entry"));
                }
                let (u, v) = r.graph.edges[e];
                slopes[f][e] = if (tail, head) == (u, v) {
                    x
                } else if (tail, head) == (v, u) {
                    -x
                } else {
                    return Err(D::Error::custom("slope orientation does not match the edge"));
                };
            }
        }
        let mut leg_slopes = vec![Vec::new(); nf];
        for (f, l) in r.leg_slopes {
            let f: usize = f.parse().map_err(D::Error::custom)?;
            if f >= nf {
                return Err(D::Error::custom("leg slopes for an unknown factor"));
            }
            leg_slopes[f] = l;
        }
        RubberMapType::new(r.graph, slopes, leg_slopes).map_err(D::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The genus-2 degree-3 cover: theta graph, legs of slope 3 and -3 on
    /// the two vertices, all edges of slope 1.
    pub(crate) fn figure1() -> RubberMapType {
        let g = DualGraph::new(vec![0, 0], vec![(0, 1); 3], vec![0, 1]).unwrap();
        RubberMapType::new(g, vec![vec![-1, -1, -1]], vec![vec![3, -3]]).unwrap()
    }

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn figure1_cone_is_the_diagonal() {
        let t = figure1();
        assert!(t.is_balanced());
        let eqs = t.cycle_equations();
        assert_eq!(eqs, vec![iv(&[1, -1, 0]), iv(&[1, 0, -1])]);
        let m = t.moduli_cone();
        assert_eq!(m.cone.rays(), &[iv(&[1, 1, 1])]);
        assert!(!m.degenerate);
    }

    #[test]
    fn banana_with_slopes_one_and_three() {
        let g = DualGraph::new(vec![0, 0], vec![(0, 1), (0, 1)], vec![0, 1]).unwrap();
        let t = RubberMapType::new(g, vec![vec![1, 3]], vec![vec![-4, 4]]).unwrap();
        assert!(t.is_balanced());
        assert_eq!(t.moduli_cone().cone.rays(), &[iv(&[3, 1])]);
    }

    #[test]
    fn trees_have_no_equations() {
        let g = DualGraph::new(vec![0, 0], vec![(0, 1)], vec![0, 0, 1, 1]).unwrap();
        let t = RubberMapType::new(g, vec![vec![0]], vec![vec![1, -1, 1, -1]]).unwrap();
        assert!(t.cycle_equations().is_empty());
        assert_eq!(t.moduli_cone().cone, RationalCone::orthant(1));
    }

    #[test]
    fn degenerate_types_are_flagged() {
        let g = DualGraph::new(vec![0, 0], vec![(0, 1), (0, 1)], vec![0, 1]).unwrap();
        // Opposite slopes around a cycle force both lengths to vanish.
        let t = RubberMapType::new(g, vec![vec![1, -1]], vec![vec![0, 0]]).unwrap();
        assert!(t.is_balanced());
        assert!(t.moduli_cone().degenerate);
        assert!(!t.is_realizable());
    }

    #[test]
    fn heights_are_path_independent_on_the_cone() {
        let t = figure1();
        let one = BigRational::from_integer(1.into());
        let h = t.heights(&[one.clone(), one.clone(), one.clone()]).unwrap();
        assert_eq!(h[0][1], -one.clone());
        let two = BigRational::from_integer(2.into());
        assert!(t.heights(&[one.clone(), two, one]).is_none());
    }

    #[test]
    fn json_round_trip() {
        let t = figure1();
        let j = serde_json::to_string(&t).unwrap();
        assert!(j.contains(r#""slopes":{"0":{"0":[1,0,1],"1":[1,0,1],"2":[1,0,1]}}"#), "{j}");
        assert_eq!(serde_json::from_str::<RubberMapType>(&j).unwrap(), t);
    }

    #[test]
    fn contraction_keeps_balance() {
        let g = DualGraph::new(vec![0, 0, 0], vec![(0, 1), (1, 2), (0, 2)], vec![2, 0]).unwrap();
        let t = RubberMapType::new(g, vec![vec![-1, -1, 3]], vec![vec![2, -2]]).unwrap();
        assert!(t.is_balanced());
        for e in 0..3 {
            assert!(t.contract(&[e]).unwrap().is_balanced(), "edge {e}");
        }
    }
}
