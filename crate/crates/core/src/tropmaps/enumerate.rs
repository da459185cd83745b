use std::collections::BTreeSet;

use super::types::{spanning_tree, ContactData, RubberMapType};
use crate::curves::{enumerate_stable_graphs, DualGraph};
use crate::error::{Error, Result};

/// All balanced slope assignments on `g` for one factor with leg slopes
/// `legs` and edge slopes bounded by `bound` in absolute value. Loops get
/// slope zero; slopes of non-tree edges are free and the tree slopes are
/// then forced by balancing.
pub fn balanced_slopes(g: &DualGraph, legs: &[i64], bound: i64) -> Vec<Vec<i64>> {
    let tree = spanning_tree(g);
    let free: Vec<usize> = (0..g.num_edges()).filter(|&e| !tree[e] && g.edges[e].0 != g.edges[e].1).collect();
    // Root the tree at vertex 0: parent edge of each vertex and a post-order.
    let nv = g.num_vertices();
    let mut parent_edge: Vec<Option<usize>> = vec![None; nv];
    let mut order = vec![0];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for (e, &(u, v)) in g.edges.iter().enumerate() {
            if !tree[e] {
                continue;
            }
            let y = if u == x { v } else if v == x { u } else { continue };
            if !seen[y] {
                seen[y] = true;
                parent_edge[y] = Some(e);
                order.push(y);
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    let k = free.len();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(k as u32);
    for code in 0..total {
        let mut s = vec![0i64; g.num_edges()];
        let mut c = code;
        for &e in &free {
            s[e] = (c % width) as i64 - bound;
            c /= width;
        }
        // excess[v] = outgoing slope already fixed at v.
        let mut excess = vec![0i64; nv];
        for &e in &free {
            let (u, v) = g.edges[e];
            excess[u] += s[e];
            excess[v] -= s[e];
        }
        for (l, &v) in g.legs.iter().enumerate() {
            excess[v] += legs[l];
        }
        let mut ok = true;
        for &y in order.iter().rev() {
            let Some(e) = parent_edge[y] else { continue };
            let (u, v) = g.edges[e];
            // Edge must cancel the subtree excess at y.
            s[e] = if u == y { -excess[y] } else { excess[y] };
            if s[e].abs() > bound {
                ok = false;
                break;
            }
            let p = if u == y { v } else { u };
            excess[p] += excess[y];
            excess[y] = 0;
        }
        if ok && excess[0] == 0 {
            out.push(s);
        }
    }
    out
}

/// Realizable rubber map types with the given factors of the contact data,
/// on stable graphs, with edge slopes bounded by each factor's degree, up
/// to isomorphism. Sorted by graph then slopes.
pub fn enumerate_types(c: &ContactData, factors: &[usize]) -> Result<Vec<RubberMapType>> {
    let chi = c.euler_char();
    if chi <= 0 {
        return Err(Error::Unstable(chi));
    }
    if let Some(&f) = factors.iter().find(|&&f| f >= c.factors.len()) {
        return Err(Error::Invalid(format!("no factor {f}")));
    }
    let graphs = enumerate_stable_graphs(c.genus, c.markings)?;
    let mut out: Vec<RubberMapType> = Vec::new();
    for g in &graphs {
        let per_factor: Vec<Vec<Vec<i64>>> =
            factors.iter().map(|&f| balanced_slopes(g, &c.factors[f], c.degree(f))).collect();
        let leg_slopes: Vec<Vec<i64>> = factors.iter().map(|&f| c.factors[f].clone()).collect();
        let mut found: BTreeSet<RubberMapType> = BTreeSet::new();
        let mut idx = vec![0usize; factors.len()];
        if per_factor.iter().any(Vec::is_empty) {
            continue;
        }
        loop {
            let slopes = idx.iter().zip(&per_factor).map(|(&i, p)| p[i].clone()).collect();
            let t = RubberMapType { graph: g.clone(), slopes, leg_slopes: leg_slopes.clone() };
            if t.is_realizable() {
                found.insert(t.canonical().0);
            }
            let mut j = 0;
            while j < idx.len() {
                idx[j] += 1;
                if idx[j] < per_factor[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
        }
        out.extend(found);
    }
    Ok(out)
}

/// Realizable single-factor types for factor `i`.
pub fn enumerate_rubber_types(c: &ContactData, i: usize) -> Result<Vec<RubberMapType>> {
    enumerate_types(c, &[i])
}
