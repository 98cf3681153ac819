use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Uniformly sample `count` distinct unordered non-adjacent pairs `(u, v)`,
/// `u < v`.
pub fn sample_negative_pairs(graph: &Graph, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let n = graph.num_nodes();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let available = all_pairs - graph.num_edges();
    if count > available {
        return Err(Error::Infeasible(format!(
            "requested {count} non-edges but the graph has only {available}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Dense regime: enumerate and subsample. Sparse regime: rejection.
    if count * 2 >= available {
        let mut non_edges = Vec::with_capacity(available);
        for u in 0..n {
            for v in u + 1..n {
                if !graph.has_edge(u, v) {
                    non_edges.push((u, v));
                }
            }
        }
        return Ok(sample(&mut rng, available, count).into_iter().map(|i| non_edges[i]).collect());
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || graph.has_edge(u, v) {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::DenseMatrix;

    #[test]
    fn complete_graph_has_no_negatives() {
        let edges = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v)));
        let g = Graph::new(4, DenseMatrix::zeros(4, 1), edges, None, 0).unwrap();
        assert!(sample_negative_pairs(&g, 1, 0).is_err());
    }

    #[test]
    fn empty_graph_exhaustive() {
        let g = Graph::new(4, DenseMatrix::zeros(4, 1), [], None, 0).unwrap();
        let mut pairs = sample_negative_pairs(&g, 6, 0).unwrap();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn path_graph_reproducible_and_non_adjacent() {
        let g = crate::graph::tests::path_graph(10);
        let a = sample_negative_pairs(&g, 2, 42).unwrap();
        assert_eq!(a, sample_negative_pairs(&g, 2, 42).unwrap());
        for &(u, v) in &a {
            assert!(u < v && !g.has_edge(u, v));
        }
        assert_ne!(a[0], a[1]);
    }
}
