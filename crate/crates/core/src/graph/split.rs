use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// k-shot train set plus every other labelled node as test set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSplit {
    /// `(node, label)`, grouped by class.
    pub train: Vec<(usize, usize)>,
    /// `(node, label)`, ascending node id.
    pub test: Vec<(usize, usize)>,
    pub shots: usize,
    pub seed: u64,
}

/// Draw `k` train nodes per class uniformly without replacement; all other
/// labelled nodes become test nodes.
pub fn sample_k_shot(graph: &Graph, k: usize, seed: u64) -> Result<LabeledSplit> {
    let labels = graph
        .labels()
        .ok_or_else(|| Error::InvalidGraph("graph has no labels".into()))?;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); graph.num_classes()];
    for (i, l) in labels.iter().enumerate() {
        if let Some(c) = *l {
            by_class[c].push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut in_train = vec![false; graph.num_nodes()];
    for (c, nodes) in by_class.iter_mut().enumerate() {
        if nodes.is_empty() {
            continue;
        }
        if nodes.len() <= k {
            return Err(Error::Infeasible(format!(
                "class {c} has {} labelled nodes, need more than k = {k}",
                nodes.len()
            )));
        }
        let (picked, _) = nodes.partial_shuffle(&mut rng, k);
        for &v in picked.iter() {
            train.push((v, c));
            in_train[v] = true;
        }
    }
    let test = labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.filter(|_| !in_train[i]).map(|c| (i, c)))
        .collect();
    Ok(LabeledSplit { train, test, shots: k, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::DenseMatrix;

    fn labelled(counts: &[usize]) -> Graph {
        let labels: Vec<Option<usize>> = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat(Some(c)).take(n))
            .chain(std::iter::once(None))
            .collect();
        let n = labels.len();
        Graph::new(n, DenseMatrix::zeros(n, 1), [], Some(labels), counts.len()).unwrap()
    }

    #[test]
    fn counts_and_disjointness() {
        let g = labelled(&[10, 8, 12]);
        let s = sample_k_shot(&g, 5, 1).unwrap();
        assert_eq!(s.train.len(), 15);
        assert_eq!(s.test.len(), 30 - 15);
        for c in 0..3 {
            assert_eq!(s.train.iter().filter(|t| t.1 == c).count(), 5);
        }
        for (v, _) in &s.train {
            assert!(s.test.iter().all(|(t, _)| t != v));
        }
        assert!(s.test.iter().all(|&(v, c)| g.label(v) == Some(c)));
    }

    #[test]
    fn deficient_class_is_named() {
        let g = labelled(&[10, 4]);
        let err = sample_k_shot(&g, 5, 0).unwrap_err().to_string();
        assert!(err.contains("class 1"), "{err}");
    }

    #[test]
    fn deterministic() {
        let g = labelled(&[20, 20]);
        assert_eq!(sample_k_shot(&g, 5, 9).unwrap(), sample_k_shot(&g, 5, 9).unwrap());
        assert_ne!(sample_k_shot(&g, 5, 9).unwrap(), sample_k_shot(&g, 5, 10).unwrap());
    }
}
