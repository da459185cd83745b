//! Overlaying two map types over a common stabilization.

use serde::{Deserialize, Serialize};

use super::types::RubberMapType;
use crate::curves::{canonical_form, DualGraph};
use crate::error::{Error, Result};
use crate::exactgeom::{image_cone, IntVector, LinearMap, RationalCone};

/// A type whose graph is a subdivision of `shared`: per shared edge, the
/// chain of edges of the type running from its tail to its head, each with
/// a flag telling whether the stored orientation agrees with the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub chains: Vec<Vec<(usize, bool)>>,
}

impl ChainDecomposition {
    /// Edge lengths of the type to edge lengths of the shared graph.
    pub fn length_map(&self, edges: usize) -> LinearMap {
        let mut m = LinearMap::zero(edges, self.chains.len());
        for (i, chain) in self.chains.iter().enumerate() {
            for &(e, _) in chain {
                m.matrix[i][e] += 1;
            }
        }
        m
    }
}

fn is_branch(g: &DualGraph, v: usize) -> bool {
    g.genera[v] > 0 || g.legs.contains(&v) || g.valence(v) != 2
}

/// Splits `g` into chains between branch vertices and identifies the
/// resulting graph with `shared`, literally if it already agrees, otherwise
/// through canonical forms.
pub fn decompose(g: &DualGraph, shared: &DualGraph) -> Result<ChainDecomposition> {
    let nv = g.num_vertices();
    for v in 0..nv {
        if !is_branch(g, v) && g.genera[v] == 0 && g.valence(v) == 2 {
            continue;
        }
        if !g.vertex_is_stable(v) {
            return Err(Error::UnsupportedDestabilization(format!("vertex {v} is unstable but not a chain vertex")));
        }
    }
    let branch: Vec<usize> = (0..nv).filter(|&v| is_branch(g, v)).collect();
    let index = |v: usize| branch.binary_search(&v).ok();
    let mut used = vec![false; g.num_edges()];
    let mut reduced_edges = Vec::new();
    let mut chains: Vec<Vec<(usize, bool)>> = Vec::new();
    for &a in &branch {
        for start in 0..g.num_edges() {
            let (u, v) = g.edges[start];
            if used[start] || (u != a && v != a) {
                continue;
            }
            let mut chain = Vec::new();
            let (mut e, mut at) = (start, a);
            loop {
                used[e] = true;
                let (u, v) = g.edges[e];
                let forward = u == at;
                let next = if forward { v } else { u };
                chain.push((e, forward));
                if index(next).is_some() {
                    at = next;
                    break;
                }
                e = (0..g.num_edges()).find(|&f| !used[f] && (g.edges[f].0 == next || g.edges[f].1 == next)).expect("2-valent");
                at = next;
            }
            let (ia, ib) = (index(a).unwrap(), index(at).unwrap());
            if ia > ib {
                chain.reverse();
                for x in chain.iter_mut() {
                    x.1 = !x.1;
                }
            }
            reduced_edges.push((ia.min(ib), ia.max(ib)));
            chains.push(chain);
        }
    }
    let reduced = DualGraph::new(
        branch.iter().map(|&v| g.genera[v]).collect(),
        reduced_edges,
        g.legs.iter().map(|&v| index(v).expect("legs sit on branch vertices")).collect(),
    )?;
    if reduced == *shared {
        return Ok(ChainDecomposition { chains });
    }
    let (cr, cs) = (canonical_form(&reduced), canonical_form(shared));
    if cr.graph != cs.graph {
        return Err(Error::IncompatibleStabilizations);
    }
    // reduced vertex v -> shared vertex; reduced edge -> shared edge.
    let mut s_vinv = vec![0; cs.vertex_map.len()];
    for (v, &p) in cs.vertex_map.iter().enumerate() {
        s_vinv[p] = v;
    }
    let mut s_einv = vec![0; cs.edge_map.len()];
    for (e, &p) in cs.edge_map.iter().enumerate() {
        s_einv[p] = e;
    }
    let mut out = vec![Vec::new(); shared.num_edges()];
    for (r, chain) in chains.into_iter().enumerate() {
        let e = s_einv[cr.edge_map[r]];
        let tail = s_vinv[cr.vertex_map[reduced.edges[r].0]];
        out[e] = if tail == shared.edges[e].0 {
            chain
        } else {
            chain.into_iter().rev().map(|(e, f)| (e, !f)).collect()
        };
    }
    Ok(ChainDecomposition { chains: out })
}

/// One chamber of the overlay: a type with the factors of both inputs and
/// the maps from its edge lengths to those of each input and of the shared
/// graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductType {
    #[serde(rename = "type")]
    pub ty: RubberMapType,
    pub cone: RationalCone,
    pub to_x: LinearMap,
    pub to_y: LinearMap,
    pub to_base: LinearMap,
}

/// Fiber product of the moduli cones of `tx` and `ty` over the orthant of
/// `shared`, in coordinates (x, y).
pub fn fiber_product_cone(tx: &RubberMapType, ty: &RubberMapType, shared: &DualGraph) -> Result<RationalCone> {
    let (dx, dy) = (decompose(&tx.graph, shared)?, decompose(&ty.graph, shared)?);
    let (ex, ey) = (tx.graph.num_edges(), ty.graph.num_edges());
    let n = ex + ey;
    let pad = |v: &IntVector, off: usize| {
        let mut c = vec![num_bigint::BigInt::from(0); n];
        for (i, a) in v.coords().iter().enumerate() {
            c[off + i] = a.clone();
        }
        IntVector(c)
    };
    let mut eqs: Vec<IntVector> = tx.cycle_equations().iter().map(|r| pad(r, 0)).collect();
    eqs.extend(ty.cycle_equations().iter().map(|r| pad(r, ex)));
    let (px, py) = (dx.length_map(ex), dy.length_map(ey));
    for i in 0..shared.num_edges() {
        let mut row = px.matrix[i].clone();
        row.extend(py.matrix[i].iter().map(|a| -a));
        eqs.push(IntVector(row));
    }
    let eqs: Vec<IntVector> = eqs.into_iter().filter(|r| !r.is_zero()).collect();
    let units: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
    RationalCone::from_inequalities(n, &eqs, &units)
}

/// Interleavings of `a` and `b` break points along a segment, as sequences
/// of steps: 1 passes an `a` break, 2 a `b` break, 3 both at once.
fn interleavings(a: usize, b: usize) -> Vec<Vec<u8>> {
    if a == 0 && b == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (step, da, db) in [(1u8, 1, 0), (2, 0, 1), (3, 1, 1)] {
        if a >= da && b >= db {
            for mut rest in interleavings(a - da, b - db) {
                rest.insert(0, step);
                out.push(rest);
            }
        }
    }
    out
}

/// Product types obtained by overlaying the piecewise linear structures of
/// `tx` and `ty` along the edges of `shared`. Only chambers are returned:
/// realizable overlays whose cone has the dimension of the fiber product.
pub fn superimpose(tx: &RubberMapType, ty: &RubberMapType, shared: &DualGraph) -> Result<Vec<ProductType>> {
    let (dx, dy) = (decompose(&tx.graph, shared)?, decompose(&ty.graph, shared)?);
    let fp = fiber_product_cone(tx, ty, shared)?;
    let (ex, ey) = (tx.graph.num_edges(), ty.graph.num_edges());
    let (fx, fy) = (tx.num_factors(), ty.num_factors());
    let per_edge: Vec<Vec<Vec<u8>>> = (0..shared.num_edges())
        .map(|e| interleavings(dx.chains[e].len() - 1, dy.chains[e].len() - 1))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; shared.num_edges()];
    loop {
        let mut genera = shared.genera.clone();
        let mut edges = Vec::new();
        let mut slopes = vec![Vec::new(); fx + fy];
        let mut to_x = vec![vec![0i64; 0]; ex];
        let mut to_y = vec![vec![0i64; 0]; ey];
        let mut to_base = vec![vec![0i64; 0]; shared.num_edges()];
        let mut cols: Vec<(usize, usize, usize)> = Vec::new();
        for (e, &(p, q)) in shared.edges.iter().enumerate() {
            let steps = &per_edge[e][choice[e]];
            let (mut i, mut j) = (0, 0);
            let mut at = p;
            for k in 0..=steps.len() {
                let next = if k == steps.len() {
                    q
                } else {
                    genera.push(0);
                    genera.len() - 1
                };
                let (xe, xf) = dx.chains[e][i];
                let (ye, yf) = dy.chains[e][j];
                let flip = at > next;
                for f in 0..fx {
                    let s = if xf { tx.slopes[f][xe] } else { -tx.slopes[f][xe] };
                    slopes[f].push(if flip { -s } else { s });
                }
                for f in 0..fy {
                    let s = if yf { ty.slopes[f][ye] } else { -ty.slopes[f][ye] };
                    slopes[fx + f].push(if flip { -s } else { s });
                }
                edges.push((at.min(next), at.max(next)));
                cols.push((xe, ye, e));
                at = next;
                if k < steps.len() {
                    let s = steps[k];
                    if s & 1 == 1 {
                        i += 1;
                    }
                    if s & 2 == 2 {
                        j += 1;
                    }
                }
            }
        }
        let nz = edges.len();
        for (row, rank, pick) in [(&mut to_x, ex, 0usize), (&mut to_y, ey, 1), (&mut to_base, shared.num_edges(), 2)] {
            for r in 0..rank {
                row[r] = cols.iter().map(|c| i64::from([c.0, c.1, c.2][pick] == r)).collect();
            }
        }
        let graph = DualGraph { genera, edges, legs: shared.legs.clone() };
        let leg_slopes = tx.leg_slopes.iter().chain(&ty.leg_slopes).cloned().collect();
        let ty_z = RubberMapType::new(graph, slopes, leg_slopes)?;
        if ty_z.is_realizable() {
            let cone = ty_z.moduli_cone().cone;
            let to_x = LinearMap::from_i64_rows(nz, &to_x)?;
            let to_y = LinearMap::from_i64_rows(nz, &to_y)?;
            let joint = LinearMap::from_i64_rows(nz, &to_x_rows(&to_x, &to_y))?;
            if image_cone(&joint, &cone)?.dim() == fp.dim() {
                let to_base = LinearMap::from_i64_rows(nz, &to_base)?;
                out.push(ProductType { ty: ty_z, cone, to_x, to_y, to_base });
            }
        }
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < per_edge[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    Ok(out)
}

/// Rows of the map z -> (x, y).
fn to_x_rows(x: &LinearMap, y: &LinearMap) -> Vec<Vec<i64>> {
    x.matrix
        .iter()
        .chain(&y.matrix)
        .map(|r| r.iter().map(|a| i64::try_from(a).expect("0/1 entries")).collect())
        .collect()
}

/// The joint map of a product type to the coordinates (x, y).
pub fn joint_map(p: &ProductType) -> LinearMap {
    let rows = to_x_rows(&p.to_x, &p.to_y);
    LinearMap::from_i64_rows(p.to_x.source_rank, &rows).expect("consistent ranks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::check_partition;
    use crate::tropmaps::types::tests::figure1;

    fn segment(chain: usize, slope: i64) -> RubberMapType {
        // Two marked genus-1 ends joined by a chain of `chain` edges.
        let n = chain + 1;
        let mut genera = vec![0; n];
        genera[0] = 1;
        genera[n - 1] = 1;
        let edges = (0..chain).map(|i| (i, i + 1)).collect();
        let g = DualGraph::new(genera, edges, vec![0, n - 1]).unwrap();
        RubberMapType::new(g, vec![vec![slope; chain]], vec![vec![-slope, slope]]).unwrap()
    }

    fn shared() -> DualGraph {
        DualGraph::new(vec![1, 1], vec![(0, 1)], vec![0, 1]).unwrap()
    }

    #[test]
    fn identical_single_edges_give_one_type() {
        let t = segment(1, 1);
        let out = superimpose(&t, &t, &shared()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].ty.graph, shared());
        assert_eq!(out[0].ty.slopes, vec![vec![1], vec![1]]);
        assert!(out[0].ty.is_balanced());
    }

    #[test]
    fn trivial_second_factor_copies_the_first() {
        let t = figure1();
        let zero = RubberMapType::new(t.graph.clone(), vec![vec![0, 0, 0]], vec![vec![0, 0]]).unwrap();
        let out = superimpose(&t, &zero, &t.graph).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].ty.graph, t.graph);
        assert_eq!(out[0].ty.slopes, vec![t.slopes[0].clone(), vec![0, 0, 0]]);
        assert_eq!(out[0].cone, t.moduli_cone().cone);
    }

    #[test]
    fn chain_against_single_edge() {
        let (tx, ty) = (segment(2, 1), segment(1, 2));
        let out = superimpose(&tx, &ty, &shared()).unwrap();
        assert_eq!(out.len(), 1);
        let p = &out[0];
        assert_eq!(p.ty.graph.num_edges(), 2);
        assert!(p.ty.is_balanced());
        assert!(p.ty.slopes[1].iter().all(|s| s.abs() == 2));
        // The image is the whole fiber product {x1 + x2 = y}.
        let fp = fiber_product_cone(&tx, &ty, &shared()).unwrap();
        assert_eq!(image_cone(&joint_map(p), &p.cone).unwrap(), fp);
    }

    #[test]
    fn two_chains_give_two_chambers() {
        // The coincident break points form the wall between the two orders.
        let (tx, ty) = (segment(2, 1), segment(2, 1));
        let out = superimpose(&tx, &ty, &shared()).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|p| p.ty.graph.num_edges() == 3 && p.ty.is_balanced()));
        let fp = fiber_product_cone(&tx, &ty, &shared()).unwrap();
        let cells: Vec<RationalCone> = out.iter().map(|p| image_cone(&joint_map(p), &p.cone).unwrap()).collect();
        assert_eq!(check_partition(&fp, &cells), Ok(()));
    }

    #[test]
    fn mismatched_graphs_are_rejected() {
        let t = segment(1, 1);
        assert_eq!(superimpose(&t, &figure1(), &shared()).unwrap_err(), Error::IncompatibleStabilizations);
    }
}
