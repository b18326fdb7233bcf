//! Exhaustive catalogs of small unlabeled graphs and trees.

use std::collections::BTreeMap;

use crate::canon::{canonical_form, CanonicalForm};
use crate::enumeration::{enumerate_shapes, EnumError, Limits, TreeMode};
use crate::graph::SimpleGraph;

/// Connected graphs on exactly `n` vertices, one per isomorphism class, in
/// canonical order. Practical up to about 8 vertices.
pub fn connected_graphs(n: usize) -> Vec<SimpleGraph> {
    connected_graph_layers(n).pop().unwrap_or_default()
}

/// Connected graphs on 1..=n vertices.
pub fn connected_graphs_up_to(n: usize) -> Vec<SimpleGraph> {
    connected_graph_layers(n).into_iter().flatten().collect()
}

// Every connected graph has a vertex whose removal keeps it connected, so
// each layer is obtained from the previous one by attaching a new vertex.
fn connected_graph_layers(n: usize) -> Vec<Vec<SimpleGraph>> {
    assert!(n <= 10, "catalog is limited to 10 vertices");
    let mut layers: Vec<Vec<SimpleGraph>> = Vec::new();
    if n == 0 {
        return layers;
    }
    layers.push(vec![SimpleGraph::empty(1)]);
    for m in 2..=n {
        let mut seen: BTreeMap<CanonicalForm, SimpleGraph> = BTreeMap::new();
        for g in &layers[m - 2] {
            let base = g.edge_list();
            for subset in 1u32..1 << (m - 1) {
                let mut edges = base.clone();
                edges.extend(
                    (0..m - 1)
                        .filter(|&v| subset >> v & 1 == 1)
                        .map(|v| (v, m - 1)),
                );
                let h = SimpleGraph::new(m, edges).expect("augmentation is simple");
                let form = canonical_form(&h, false);
                seen.entry(form.clone()).or_insert_with(|| form.to_graph());
            }
        }
        layers.push(seen.into_values().collect());
    }
    layers
}

/// Unlabeled trees on `n` vertices.
pub fn free_trees(n: usize) -> Result<Vec<SimpleGraph>, EnumError> {
    let k = n.max(2) as u32;
    Ok(
        enumerate_shapes(k, n, TreeMode::FreeCanonical, &Limits::default())?
            .into_iter()
            .map(|t| t.to_graph())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_connected_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
        assert_eq!(connected_graphs_up_to(6).len(), 143);
    }

    #[test]
    fn known_tree_counts() {
        let counts: Vec<usize> = (1..=9).map(|n| free_trees(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47]);
        assert!(free_trees(7).unwrap().iter().all(SimpleGraph::is_tree));
    }
}
