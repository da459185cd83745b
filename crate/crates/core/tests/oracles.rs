//! Enumeration against brute force at a scale that runs in seconds; the
//! acceptance target covers the full range.

mod common;

use std::collections::BTreeSet;

use common::*;
use tropprod::curves::{build_moduli_complex, enumerate_stable_graphs};
use tropprod::tropmaps::{enumerate_rubber_types, enumerate_types, ContactData};

#[test]
fn stable_graphs_match_brute_force() {
    for (g, n) in [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 0)] {
        let lib = enumerate_stable_graphs(g, n).unwrap();
        let keys: BTreeSet<Key> = lib.iter().map(graph_key).collect();
        let oracle = brute_force_graphs(g, n);
        assert_eq!(keys.len(), lib.len(), "duplicates for g={g} n={n}");
        assert_eq!(keys, oracle.keys().cloned().collect::<BTreeSet<_>>(), "g={g} n={n}");
    }
}

#[test]
fn moduli_complex_has_one_cone_per_graph() {
    for (g, n) in [(0, 4), (1, 2), (2, 0)] {
        let m = build_moduli_complex(g, n).unwrap();
        assert_eq!(m.complex.cones.len(), brute_force_graphs(g, n).len());
        for (id, cone) in &m.complex.cones {
            assert_eq!(cone.dim(), m.graph(*id).num_edges());
        }
    }
}

#[test]
fn rubber_types_match_brute_force() {
    for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2), (1, 3), (2, 0)] {
        let graphs = brute_force_graphs(g, n);
        for a in contact_vectors(n, 2) {
            let c = ContactData::new(g, n, vec![a.clone()]).unwrap();
            let lib = enumerate_rubber_types(&c, 0).unwrap();
            let keys: BTreeSet<Key> = lib.iter().map(type_key).collect();
            assert_eq!(keys.len(), lib.len(), "duplicates for g={g} A={a:?}");
            assert_eq!(keys, brute_force_types(&graphs, &a, c.degree(0)), "g={g} A={a:?}");
        }
    }
}

#[test]
fn two_factor_types_realize_both_factors() {
    // Every two-factor type restricts to a realizable type of each factor.
    let c = ContactData::new(1, 2, vec![vec![2, -2], vec![1, -1]]).unwrap();
    let singles: Vec<BTreeSet<Key>> = (0..2)
        .map(|i| enumerate_rubber_types(&c, i).unwrap().iter().map(type_key).collect())
        .collect();
    let joint = enumerate_types(&c, &[0, 1]).unwrap();
    assert!(!joint.is_empty());
    for t in &joint {
        for (f, single) in singles.iter().enumerate() {
            let k = key(&t.graph.genera, &t.graph.edges, &[t.slopes[f].clone()], &t.graph.legs);
            assert!(single.contains(&k), "{t:?} factor {f}");
        }
    }
}

#[test]
fn unstable_data_is_rejected() {
    let c = ContactData::new(0, 2, vec![vec![1, -1]]).unwrap();
    assert!(enumerate_rubber_types(&c, 0).is_err());
}
