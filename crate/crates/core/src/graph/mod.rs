//! Graph representation, on-disk format, synthetic generation, ego-net
//! extraction and few-shot splits.

mod csbm;
mod io;
mod split;
mod subgraph;

pub use csbm::{generate_csbm, CsbmParams};
pub use io::{load_graph, save_graph, GraphMeta};
pub use split::{sample_k_shot, LabeledSplit};
pub use subgraph::{khop_egonet, khop_nodes, khop_subgraph, EgoNet, Subgraph};

use crate::error::{Error, Result};
use crate::nn::DenseMatrix;

/// Undirected, attributed graph. Immutable after construction.
///
/// Edges are stored once with `u < v`, sorted; a CSR index gives neighbour
/// iteration from either endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    features: DenseMatrix,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    labels: Option<Vec<Option<usize>>>,
    num_classes: usize,
}

impl Graph {
    /// Build a graph, canonicalising edge orientation and rejecting
    /// self-loops, duplicates and out-of-range endpoints.
    pub fn new(
        num_nodes: usize,
        features: DenseMatrix,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: Option<Vec<Option<usize>>>,
        num_classes: usize,
    ) -> Result<Self> {
        if features.rows() != num_nodes {
            return Err(Error::InvalidGraph(format!(
                "feature rows {} ≠ n {num_nodes}",
                features.rows()
            )));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has endpoint ≥ n {num_nodes}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        if let Some(labels) = &labels {
            if labels.len() != num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "label count {} ≠ n {num_nodes}",
                    labels.len()
                )));
            }
            if let Some((i, c)) = labels
                .iter()
                .enumerate()
                .find_map(|(i, l)| l.filter(|&c| c >= num_classes).map(|c| (i, c)))
            {
                return Err(Error::InvalidGraph(format!(
                    "node {i} has label {c} ≥ num_classes {num_classes}"
                )));
            }
        }

        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in &canon {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..num_nodes].to_vec();
        let mut neighbors = vec![0usize; canon.len() * 2];
        for &(u, v) in &canon {
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }
        for i in 0..num_nodes {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }

        Ok(Self { num_nodes, features, edges: canon, offsets, neighbors, labels, num_classes })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    /// Canonical `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> Option<&[Option<usize>]> {
        self.labels.as_deref()
    }

    pub fn label(&self, node: usize) -> Option<usize> {
        self.labels.as_ref().and_then(|l| l[node])
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn path_graph(n: usize) -> Graph {
        let features = DenseMatrix::from_vec(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        Graph::new(n, features, (1..n).map(|i| (i - 1, i)), None, 0).unwrap()
    }

    #[test]
    fn canonicalises_and_indexes_both_directions() {
        let x = DenseMatrix::zeros(3, 1);
        let g = Graph::new(3, x, [(2, 1), (0, 1)], None, 0).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn rejects_invariant_violations() {
        let x = || DenseMatrix::zeros(3, 1);
        assert!(Graph::new(3, x(), [(1, 1)], None, 0).is_err());
        assert!(Graph::new(3, x(), [(0, 1), (1, 0)], None, 0).is_err());
        assert!(Graph::new(3, x(), [(0, 3)], None, 0).is_err());
        assert!(Graph::new(2, x(), [], None, 0).is_err());
        assert!(Graph::new(3, x(), [], Some(vec![Some(0), None, Some(2)]), 2).is_err());
    }
}
