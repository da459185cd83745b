use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactgeom::LinearMap;

/// A marked dual graph: vertex genera, edges as vertex pairs `(u, v)` with
/// `u <= v` (loops allowed), and the vertex carrying each leg. Leg `i` of the
/// list is the marking `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualGraph {
    pub genera: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
    pub legs: Vec<usize>,
}

impl DualGraph {
    pub fn new(genera: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<usize>) -> Result<Self> {
        let nv = genera.len();
        if nv == 0 {
            return Err(Error::Invalid("graph without vertices".into()));
        }
        if edges.iter().any(|&(u, v)| u >= nv || v >= nv) || legs.iter().any(|&v| v >= nv) {
            return Err(Error::Invalid("edge or leg refers to a missing vertex".into()));
        }
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Ok(DualGraph { genera, edges, legs })
    }

    /// The graph with one vertex of genus `g` carrying all `n` legs.
    pub fn smooth(g: u32, n: usize) -> Self {
        DualGraph { genera: vec![g], edges: Vec::new(), legs: vec![0; n] }
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    /// Edge ends plus legs at `v`; a loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        let ends: usize = self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum();
        ends + self.legs.iter().filter(|&&l| l == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn betti(&self) -> usize {
        self.num_edges() + 1 - self.num_vertices()
    }

    /// `h1 + sum of vertex genera`.
    pub fn genus(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.betti() as u32 + self.genera.iter().sum::<u32>())
    }

    pub fn vertex_is_stable(&self, v: usize) -> bool {
        2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 > 0
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.vertex_is_stable(v))
    }

    /// `2g - 2 + n` of the curve.
    pub fn euler_char(&self) -> Result<i64> {
        Ok(2 * self.genus()? as i64 - 2 + self.num_legs() as i64)
    }

    /// Contracts the given edges. Returns the contracted graph and, for each
    /// of its edges in order, the index of the surviving original edge.
    pub fn contract_edges(&self, set: &[usize]) -> Result<(DualGraph, Vec<usize>)> {
        if let Some(&e) = set.iter().find(|&&e| e >= self.num_edges()) {
            return Err(Error::NoSuchEdge(e));
        }
        // Union-find on vertices along contracted edges.
        let nv = self.num_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut genera = self.genera.clone();
        for &e in set {
            let (u, v) = self.edges[e];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                genera[ru] += 1;
            } else {
                let (lo, hi) = (ru.min(rv), ru.max(rv));
                parent[hi] = lo;
                genera[lo] += genera[hi];
            }
        }
        let roots: Vec<usize> = (0..nv).filter(|&v| find(&mut parent, v) == v).collect();
        let new_index: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let map = |v: usize, p: &mut [usize]| new_index[&find(p, v)];
        let mut edges = Vec::new();
        let mut surviving = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if set.contains(&i) {
                continue;
            }
            let (a, b) = (map(u, &mut parent), map(v, &mut parent));
            edges.push((a.min(b), a.max(b)));
            surviving.push(i);
        }
        let legs = self.legs.iter().map(|&v| map(v, &mut parent)).collect();
        let genera = roots.iter().map(|&r| genera[r]).collect();
        Ok((DualGraph { genera, edges, legs }, surviving))
    }

    /// Contracts edge `e`. The map is the inclusion of the remaining edge
    /// coordinates as the face `l_e = 0`.
    pub fn contract_edge(&self, e: usize) -> Result<(DualGraph, LinearMap)> {
        let (g, surviving) = self.contract_edges(&[e])?;
        Ok((g, LinearMap::coordinate_map(self.num_edges(), &surviving)))
    }

    /// Stabilization: repeatedly removes unmarked genus-0 leaves with their
    /// edge, merges the two edges at unmarked genus-0 vertices of valence two,
    /// and contracts the edge at genus-0 vertices carrying one leg and one
    /// edge. The map sends edge lengths to the lengths of the stabilized
    /// edges (sums along merged chains).
    pub fn stabilize(&self) -> Result<(DualGraph, LinearMap)> {
        let chi = self.euler_char()?;
        if chi <= 0 {
            return Err(Error::Unstable(chi));
        }
        let mut g = self.clone();
        // Each current edge as a set of original edges.
        let mut comp: Vec<Vec<usize>> = (0..self.num_edges()).map(|e| vec![e]).collect();
        loop {
            let Some(v) = (0..g.num_vertices()).find(|&v| !g.vertex_is_stable(v)) else {
                break;
            };
            let inc: Vec<usize> = (0..g.num_edges()).filter(|&e| g.edges[e].0 == v || g.edges[e].1 == v).collect();
            let nlegs = g.legs.iter().filter(|&&l| l == v).count();
            let loops = inc.iter().filter(|&&e| g.edges[e].0 == g.edges[e].1).count();
            if g.genera[v] != 0 || loops > 0 || inc.is_empty() {
                return Err(Error::Unstable(chi));
            }
            match (inc.len(), nlegs) {
                (1, 0) => {
                    // Leaf: drop the vertex and its edge.
                    let e = inc[0];
                    g.edges.remove(e);
                    comp.remove(e);
                    g = g.remove_isolated(v);
                }
                (2, 0) => {
                    let (e1, e2) = (inc[0], inc[1]);
                    let other = |e: usize| if g.edges[e].0 == v { g.edges[e].1 } else { g.edges[e].0 };
                    let (a, b) = (other(e1), other(e2));
                    g.edges[e1] = (a.min(b), a.max(b));
                    let moved = comp[e2].clone();
                    comp[e1].extend(moved);
                    comp[e1].sort();
                    g.edges.remove(e2);
                    comp.remove(e2);
                    g = g.remove_isolated(v);
                }
                (1, 1) => {
                    // A marked genus-0 tail: contract its edge.
                    let e = inc[0];
                    let (c, surviving) = g.contract_edges(&[e])?;
                    comp = surviving.into_iter().map(|i| comp[i].clone()).collect();
                    g = c;
                }
                _ => return Err(Error::Unstable(chi)),
            }
        }
        let mut rows = vec![vec![0i64; self.num_edges()]; g.num_edges()];
        for (i, c) in comp.iter().enumerate() {
            for &e in c {
                rows[i][e] = 1;
            }
        }
        let map = LinearMap::from_i64_rows(self.num_edges(), &rows)?;
        Ok((g, map))
    }

    /// Removes vertex `v`, which must have no edges; its legs must be gone.
    fn remove_isolated(&self, v: usize) -> DualGraph {
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let mut genera = self.genera.clone();
        genera.remove(v);
        DualGraph {
            genera,
            edges: self.edges.iter().map(|&(a, b)| (shift(a), shift(b))).collect(),
            legs: self.legs.iter().map(|&l| shift(l)).collect(),
        }
    }

    /// Applies a vertex relabeling `v -> perm[v]` and reorders edges by
    /// `edge_perm[e]` (the new position of edge `e`).
    pub fn relabel(&self, perm: &[usize], edge_perm: &[usize]) -> DualGraph {
        let mut genera = vec![0; self.num_vertices()];
        for (v, &p) in perm.iter().enumerate() {
            genera[p] = self.genera[v];
        }
        let mut edges = vec![(0, 0); self.num_edges()];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let (x, y) = (perm[a], perm[b]);
            edges[edge_perm[e]] = (x.min(y), x.max(y));
        }
        DualGraph { genera, edges, legs: self.legs.iter().map(|&l| perm[l]).collect() }
    }

    /// Graphviz rendering; legs are dangling half-edges labeled by marking.
    pub fn to_dot(&self, name: &str, slopes: Option<(&[i64], &[i64])>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        for (v, g) in self.genera.iter().enumerate() {
            let _ = writeln!(s, "  v{v} [label=\"{g}\"];");
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let lbl = match slopes {
                Some((es, _)) => format!("e{e}: {}", es[e]),
                None => format!("e{e}"),
            };
            let _ = writeln!(s, "  v{a} -- v{b} [label=\"{lbl}\"];");
        }
        for (i, &v) in self.legs.iter().enumerate() {
            let lbl = match slopes {
                Some((_, ls)) => format!("{}: {}", i + 1, ls[i]),
                None => format!("{}", i + 1),
            };
            let _ = writeln!(s, "  l{} [shape=point];", i + 1);
            let _ = writeln!(s, "  v{v} -- l{} [label=\"{lbl}\"];", i + 1);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    genus: u32,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<VertexRepr>,
    edges: Vec<(usize, usize)>,
    legs: BTreeMap<String, usize>,
}

impl Serialize for DualGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            vertices: self.genera.iter().map(|&genus| VertexRepr { genus }).collect(),
            edges: self.edges.clone(),
            legs: self.legs.iter().enumerate().map(|(i, &v)| ((i + 1).to_string(), v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = GraphRepr::deserialize(d)?;
        let mut legs = vec![usize::MAX; r.legs.len()];
        for (k, v) in r.legs {
            let i: usize = k.parse().map_err(D::Error::custom)?;
            if i == 0 || i > legs.len() {
                return Err(D::Error::custom(format!("leg label {i} out of range")));
            }
            legs[i - 1] = v;
        }
        DualGraph::new(r.vertices.into_iter().map(|v| v.genus).collect(), r.edges, legs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn theta() -> DualGraph {
        DualGraph::new(vec![0, 0], vec![(0, 1); 3], vec![]).unwrap()
    }

    #[test]
    fn genera() {
        assert_eq!(theta().genus(), Ok(2));
        assert_eq!(DualGraph::smooth(3, 0).genus(), Ok(3));
        assert_eq!(DualGraph::new(vec![1], vec![(0, 0)], vec![]).unwrap().genus(), Ok(2));
        let disc = DualGraph::new(vec![1, 1], vec![], vec![]).unwrap();
        assert_eq!(disc.genus(), Err(Error::Disconnected));
    }

    #[test]
    fn contractions() {
        let (g, m) = theta().contract_edge(0).unwrap();
        assert_eq!(g, DualGraph::new(vec![0], vec![(0, 0), (0, 0)], vec![]).unwrap());
        assert_eq!(g.genus(), Ok(2));
        assert_eq!(m, LinearMap::from_i64_rows(2, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap());
        let (g, _) = DualGraph::new(vec![0], vec![(0, 0)], vec![]).unwrap().contract_edge(0).unwrap();
        assert_eq!(g, DualGraph::smooth(1, 0));
        let (g, _) = DualGraph::new(vec![1, 1], vec![(0, 1)], vec![]).unwrap().contract_edge(0).unwrap();
        assert_eq!(g, DualGraph::smooth(2, 0));
        assert_eq!(theta().contract_edge(3).unwrap_err(), Error::NoSuchEdge(3));
    }

    #[test]
    fn stabilizing_a_chain() {
        let chain = DualGraph::new(vec![1, 0, 1], vec![(0, 1), (1, 2)], vec![]).unwrap();
        let (s, m) = chain.stabilize().unwrap();
        assert_eq!(s, DualGraph::new(vec![1, 1], vec![(0, 1)], vec![]).unwrap());
        assert_eq!(m, LinearMap::from_i64_rows(2, &[vec![1, 1]]).unwrap());
        let (s2, m2) = theta().stabilize().unwrap();
        assert_eq!(s2, theta());
        assert!(m2.is_identity());
    }

    #[test]
    fn stabilizing_a_subdivided_theta() {
        // Each theta edge split by a bivalent vertex 2, 3, 4.
        let g = DualGraph::new(vec![0; 5], vec![(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)], vec![]).unwrap();
        let (s, m) = g.stabilize().unwrap();
        assert_eq!(s, theta());
        let rows = vec![vec![1, 1, 0, 0, 0, 0], vec![0, 0, 1, 1, 0, 0], vec![0, 0, 0, 0, 1, 1]];
        assert_eq!(m, LinearMap::from_i64_rows(6, &rows).unwrap());
    }

    #[test]
    fn unstable_curves_are_rejected() {
        assert_eq!(DualGraph::smooth(1, 0).stabilize().unwrap_err(), Error::Unstable(0));
        assert_eq!(DualGraph::smooth(0, 2).stabilize().unwrap_err(), Error::Unstable(0));
    }

    #[test]
    fn json_shape() {
        let g = DualGraph::new(vec![0, 0], vec![(0, 1); 3], vec![0, 1]).unwrap();
        let j = serde_json::to_string(&g).unwrap();
        assert_eq!(j, r#"{"vertices":[{"genus":0},{"genus":0}],"edges":[[0,1],[0,1],[0,1]],"legs":{"1":0,"2":1}}"#);
        assert_eq!(serde_json::from_str::<DualGraph>(&j).unwrap(), g);
    }
}
