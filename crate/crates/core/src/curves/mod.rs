//! Stable marked dual graphs and the tropical moduli complex of curves.

mod canon;
mod enumerate;
mod graph;
mod moduli;

pub use canon::{canonical_form, Canonical, GraphAut};
pub use enumerate::{enumerate_stable_graphs, splits};
pub use graph::DualGraph;
pub use moduli::{build_moduli_complex, edge_permutation_map, graph_label, CurveModuliComplex};

