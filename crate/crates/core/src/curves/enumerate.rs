use std::collections::BTreeSet;

use super::canon::canonical_form;
use super::DualGraph;
use crate::error::{Error, Result};

/// Graphs obtained from `g` by one inverse contraction: adding a loop at a
/// vertex of positive genus, or splitting a vertex in two along a new edge.
/// Only stable results are kept.
pub fn splits(g: &DualGraph) -> Vec<DualGraph> {
    let mut out = Vec::new();
    for v in 0..g.num_vertices() {
        if g.genera[v] > 0 {
            let mut h = g.clone();
            h.genera[v] -= 1;
            h.edges.push((v, v));
            out.push(h);
        }
        // Half-edges at v: (edge, which end) and legs.
        let halves: Vec<(usize, usize)> = g
            .edges
            .iter()
            .enumerate()
            .flat_map(|(e, &(a, b))| {
                let mut x = Vec::new();
                if a == v {
                    x.push((e, 0));
                }
                if b == v {
                    x.push((e, 1));
                }
                x
            })
            .collect();
        let legs: Vec<usize> = (0..g.num_legs()).filter(|&i| g.legs[i] == v).collect();
        let k = halves.len() + legs.len();
        let w = g.num_vertices();
        for mask in 0u64..(1u64 << k) {
            for g1 in 0..=g.genera[v] {
                let mut h = g.clone();
                h.genera[v] = g1;
                h.genera.push(g.genera[v] - g1);
                for (i, &(e, end)) in halves.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        let (a, b) = h.edges[e];
                        h.edges[e] = if end == 0 { (w, b) } else { (a, w) };
                    }
                }
                for (j, &l) in legs.iter().enumerate() {
                    if mask >> (halves.len() + j) & 1 == 1 {
                        h.legs[l] = w;
                    }
                }
                h.edges = h.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                h.edges.push((v, w));
                if h.vertex_is_stable(v) && h.vertex_is_stable(w) {
                    out.push(h);
                }
            }
        }
    }
    out
}

/// All stable graphs of genus `g` with `n` legs up to isomorphism, as
/// canonical representatives sorted by edge count and then canonically.
pub fn enumerate_stable_graphs(g: u32, n: usize) -> Result<Vec<DualGraph>> {
    let chi = 2 * g as i64 - 2 + n as i64;
    if chi <= 0 {
        return Err(Error::Unstable(chi));
    }
    let mut all: Vec<DualGraph> = Vec::new();
    let mut level: BTreeSet<DualGraph> = BTreeSet::from([canonical_form(&DualGraph::smooth(g, n)).graph]);
    while !level.is_empty() {
        all.extend(level.iter().cloned());
        let next: BTreeSet<DualGraph> =
            level.iter().flat_map(splits).map(|h| canonical_form(&h).graph).collect();
        level = next;
    }
    Ok(all)
}
