use rand::Rng;

use super::gumbel::{sample_gumbel, selector_from_noise};
use super::projector::{clamp_prob, Projector};
use super::RewireScope;
use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::nn::{sigmoid, DenseMatrix};

/// Local index pairs `(a, b)`, `a < b`, that carry a learned selector.
pub fn candidate_pairs(m: usize, scope: RewireScope) -> Vec<(usize, usize)> {
    match scope {
        RewireScope::TargetOnly => (1..m).map(|j| (Subgraph::TARGET, j)).collect(),
        RewireScope::AllPairs => (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect(),
    }
}

/// Ego-net with relaxed, sampled edge selectors on its candidate pairs.
#[derive(Clone, Debug)]
pub struct PromptedSubgraph<'a> {
    pub base: &'a Subgraph,
    pub soft_adjacency: DenseMatrix,
    pub pairs: Vec<(usize, usize)>,
    pub probs: Vec<f64>,
}

/// Projected rows `h · W₁` for every node of the ego-net.
pub(crate) fn project_rows(
    sub: &Subgraph,
    embeddings: &DenseMatrix,
    projector: &Projector,
) -> Result<DenseMatrix> {
    if let Some(&g) = sub.local_to_global.iter().find(|&&g| g >= embeddings.rows()) {
        return Err(Error::OutOfRange(format!(
            "no embedding row for node {g} ({} rows)",
            embeddings.rows()
        )));
    }
    embeddings.select_rows(&sub.local_to_global).matmul(&projector.w1)
}

/// Clamped probability and clamp flag for every pair.
pub(crate) fn pair_probs(
    projector: &Projector,
    projected: &DenseMatrix,
    pairs: &[(usize, usize)],
    eps: f64,
) -> Vec<(f64, bool)> {
    pairs
        .iter()
        .map(|&(a, b)| {
            let logit = projector.logit_from_projected(projected.row(a), projected.row(b));
            clamp_prob(sigmoid(logit), eps)
        })
        .collect()
}

/// Copy of the base adjacency with each pair's entries replaced by `values`.
pub(crate) fn overwrite_pairs(base: &DenseMatrix, pairs: &[(usize, usize)], values: &[f64]) -> DenseMatrix {
    let mut s = base.clone();
    for (&(a, b), &v) in pairs.iter().zip(values) {
        s[(a, b)] = v;
        s[(b, a)] = v;
    }
    s
}

/// Selector values for fixed probabilities and per-pair noise `g₁ − g₂`.
pub(crate) fn selectors(probs: &[f64], noise: &[f64], tau: f64) -> Vec<f64> {
    probs.iter().zip(noise).map(|(&p, &g)| selector_from_noise(p, g, tau)).collect()
}

/// Draw one `g₁ − g₂` per pair, in pair order.
pub(crate) fn draw_noise<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| sample_gumbel(rng) - sample_gumbel(rng)).collect()
}

/// Sample a prompted ego-net: fresh Gumbel noise per candidate pair, shared
/// by both mirrored entries; every other entry copied from the base.
pub fn build_prompted_subgraph<'a, R: Rng + ?Sized>(
    sub: &'a Subgraph,
    projector: &Projector,
    embeddings: &DenseMatrix,
    tau: f64,
    rng: &mut R,
    scope: RewireScope,
    eps: f64,
) -> Result<PromptedSubgraph<'a>> {
    let pairs = candidate_pairs(sub.len(), scope);
    let projected = project_rows(sub, embeddings, projector)?;
    let probs: Vec<f64> = pair_probs(projector, &projected, &pairs, eps).into_iter().map(|p| p.0).collect();
    let noise = draw_noise(pairs.len(), rng);
    let soft_adjacency = overwrite_pairs(&sub.base_adjacency, &pairs, &selectors(&probs, &noise, tau));
    Ok(PromptedSubgraph { base: sub, soft_adjacency, pairs, probs })
}
