//! Canonical labeling and automorphisms of dual graphs by invariant
//! refinement followed by brute force over the remaining ambiguity.

use serde::{Deserialize, Serialize};

use super::DualGraph;

/// A graph automorphism as permutations of vertices and edges
/// (`vertices[v]` is the image of `v`). Loop flips are not recorded since
/// they act trivially on edge lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphAut {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub graph: DualGraph,
    /// Vertex relabeling taking the input to `graph`.
    pub vertex_map: Vec<usize>,
    /// New position of each input edge in `graph`.
    pub edge_map: Vec<usize>,
    /// Automorphisms of `graph`.
    pub auts: Vec<GraphAut>,
}

fn vertex_invariant(g: &DualGraph, v: usize) -> (u32, Vec<usize>, usize, usize) {
    let legs: Vec<usize> = (0..g.num_legs()).filter(|&i| g.legs[i] == v).collect();
    let loops = g.edges.iter().filter(|&&(a, b)| a == v && b == v).count();
    // Legs are sorted ascending, so "has leg 1" sorts first after negation.
    (g.genera[v], legs.iter().map(|&i| usize::MAX - i).collect(), g.valence(v), loops)
}

/// Iterated refinement: a vertex's class is determined by its invariant and
/// the multiset of neighbor classes.
fn refined_classes(g: &DualGraph) -> Vec<usize> {
    let n = g.num_vertices();
    let inv: Vec<_> = (0..n).map(|v| vertex_invariant(g, v)).collect();
    let mut sorted = inv.clone();
    sorted.sort();
    sorted.dedup();
    let mut class: Vec<usize> = inv.iter().map(|x| sorted.binary_search(x).unwrap()).collect();
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g
                    .edges
                    .iter()
                    .filter_map(|&(a, b)| {
                        if a == v && b != v {
                            Some(class[b])
                        } else if b == v && a != v {
                            Some(class[a])
                        } else {
                            None
                        }
                    })
                    .collect();
                nb.sort();
                (class[v], nb)
            })
            .collect();
        let mut s = sig.clone();
        s.sort();
        s.dedup();
        let next: Vec<usize> = sig.iter().map(|x| s.binary_search(x).unwrap()).collect();
        let count = |c: &[usize]| {
            let mut v = c.to_vec();
            v.sort();
            v.dedup();
            v.len()
        };
        if count(&next) == count(&class) {
            return next;
        }
        class = next;
    }
}

/// Graph under a vertex relabeling, with edges sorted; also returns the new
/// position of each original edge (parallel edges keep their order).
fn apply(g: &DualGraph, perm: &[usize]) -> (DualGraph, Vec<usize>) {
    let mut tagged: Vec<((usize, usize), usize)> = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let (x, y) = (perm[a], perm[b]);
            ((x.min(y), x.max(y)), e)
        })
        .collect();
    tagged.sort();
    let mut edge_map = vec![0; g.num_edges()];
    for (pos, &(_, e)) in tagged.iter().enumerate() {
        edge_map[e] = pos;
    }
    (g.relabel(perm, &edge_map), edge_map)
}

/// All vertex bijections that send each class block to its positions.
fn block_permutations(class: &[usize]) -> Vec<Vec<usize>> {
    let n = class.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class[v], v));
    // Positions 0..n are assigned to classes in increasing order.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match blocks.last_mut() {
            Some(b) if class[b[0]] == class[v] => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    let mut out: Vec<Vec<usize>> = vec![vec![usize::MAX; n]];
    let mut start = 0;
    for b in &blocks {
        let perms = permutations(b.len());
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for p in &perms {
                let mut m = base.clone();
                for (i, &v) in b.iter().enumerate() {
                    m[v] = start + p[i];
                }
                next.push(m);
            }
        }
        out = next;
        start += b.len();
    }
    out
}

pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn key(g: &DualGraph) -> (&[u32], &[(usize, usize)], &[usize]) {
    (&g.genera, &g.edges, &g.legs)
}

/// Canonical representative, the relabeling onto it, and its automorphisms.
pub fn canonical_form(g: &DualGraph) -> Canonical {
    let class = refined_classes(g);
    let candidates = block_permutations(&class);
    let mut best: Option<(DualGraph, Vec<usize>, Vec<usize>)> = None;
    let mut hits: Vec<Vec<usize>> = Vec::new();
    for perm in candidates {
        let (h, em) = apply(g, &perm);
        match &best {
            Some((b, _, _)) if key(&h) > key(b) => {}
            Some((b, _, _)) if key(&h) == key(b) => hits.push(perm),
            _ => {
                best = Some((h, perm.clone(), em));
                hits = vec![perm];
            }
        }
    }
    let (graph, vertex_map, edge_map) = best.expect("at least one labeling");
    // Automorphisms of the canonical graph: p ∘ vertex_map^{-1} for each hit p,
    // times all permutations of parallel edge classes.
    let n = g.num_vertices();
    let mut inv = vec![0; n];
    for (v, &p) in vertex_map.iter().enumerate() {
        inv[p] = v;
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (e, &ed) in graph.edges.iter().enumerate() {
        match classes.last_mut() {
            Some(c) if graph.edges[c[0]] == ed => c.push(e),
            _ => classes.push(vec![e]),
        }
    }
    let mut auts = Vec::new();
    for p in &hits {
        let vmap: Vec<usize> = (0..n).map(|w| p[inv[w]]).collect();
        // Edge image respecting endpoints: edges of class (a,b) go to class
        // (vmap a, vmap b); combine with permutations inside the classes.
        let mut base = vec![0; graph.num_edges()];
        for c in &classes {
            let (a, b) = graph.edges[c[0]];
            let (x, y) = (vmap[a], vmap[b]);
            let target = classes.iter().find(|d| graph.edges[d[0]] == (x.min(y), x.max(y))).expect("automorphism");
            for (i, &e) in c.iter().enumerate() {
                base[e] = target[i];
            }
        }
        let mut maps = vec![base];
        for c in classes.iter().filter(|c| c.len() > 1) {
            let perms = permutations(c.len());
            let mut next = Vec::new();
            for m in &maps {
                for q in &perms {
                    let mut m2 = m.clone();
                    for (i, &e) in c.iter().enumerate() {
                        m2[e] = m[c[q[i]]];
                    }
                    next.push(m2);
                }
            }
            maps = next;
        }
        for edges in maps {
            auts.push(GraphAut { vertices: vmap.clone(), edges });
        }
    }
    auts.sort();
    auts.dedup();
    Canonical { graph, vertex_map, edge_map, auts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_aut(g: &DualGraph, a: &GraphAut) -> bool {
        g.relabel(&a.vertices, &a.edges) == *g
    }

    #[test]
    fn theta_automorphisms() {
        let t = DualGraph::new(vec![0, 0], vec![(0, 1); 3], vec![]).unwrap();
        let c = canonical_form(&t);
        assert_eq!(c.auts.len(), 12);
        assert!(c.auts.iter().all(|a| is_aut(&c.graph, a)));
        let tm = DualGraph::new(vec![0, 0], vec![(0, 1); 3], vec![0, 1]).unwrap();
        assert_eq!(canonical_form(&tm).auts.len(), 6);
    }

    #[test]
    fn asymmetric_tree() {
        let t = DualGraph::new(vec![0, 1, 0], vec![(0, 1), (1, 2)], vec![0, 0, 2, 2, 2]).unwrap();
        assert_eq!(canonical_form(&t).auts.len(), 1);
    }

    #[test]
    fn relabeled_graphs_agree() {
        let g = DualGraph::new(vec![0, 1, 0], vec![(0, 1), (1, 2), (0, 2), (2, 2)], vec![2, 0]).unwrap();
        let h = g.relabel(&[2, 0, 1], &[3, 1, 0, 2]);
        assert_eq!(canonical_form(&g).graph, canonical_form(&h).graph);
        let c = canonical_form(&g);
        assert_eq!(g.relabel(&c.vertex_map, &c.edge_map), c.graph);
    }
}
