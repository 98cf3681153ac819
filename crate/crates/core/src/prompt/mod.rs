//! Learned edge-rewiring prompts over ego-nets of a frozen GCN.

mod checkpoint;
mod gumbel;
mod infer;
mod local;
mod objective;
mod projector;
mod rewire;
mod tune;

pub use checkpoint::{load_prompt, save_prompt, write_log_csv, PromptCheckpoint};
pub use gumbel::{gumbel_edge_probability, sample_gumbel, soft_edge_selector, soft_edge_selector_grad};
pub use infer::{
    evaluate, fit_probe, hard_rewired_embedding, infer_node, probe_accuracy, train_linear_probe,
    EdgeScorer, LabelOracle, LearnedScorer, Predictor,
};
pub use objective::{
    prompt_objective, EgoStructure, Objective, PromptGrads, PromptProblem, TargetContext,
};
pub use projector::{projector_prob, Projector};
pub use rewire::{build_prompted_subgraph, candidate_pairs, PromptedSubgraph};
pub use tune::{
    temperature, temperature_with_floor, tune_prompt, tune_prompt_observed, tune_prompt_with_embeddings,
    EpochLog,
    TrainedPrompt,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which node pairs of an ego-net receive a learned edge selector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RewireScope {
    /// Only pairs involving the target node.
    #[default]
    TargetOnly,
    /// Every unordered pair in the ego-net.
    AllPairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptConfig {
    /// Weight of the entropy regulariser.
    pub lambda1: f64,
    /// Weight of the sparsity regulariser.
    pub lambda2: f64,
    /// Target mean edge probability per node.
    pub gamma: f64,
    pub epochs: usize,
    pub lr: f64,
    pub rho: usize,
    pub tau_floor: f64,
    /// Probabilities are clamped to `[ε, 1−ε]`.
    pub prob_clamp: f64,
    pub projector_hidden: usize,
    pub seed: u64,
    pub rewire_scope: RewireScope,
}

impl Default for PromptConfig {
    fn default() -> Self {
        Self {
            lambda1: 0.0,
            lambda2: 0.0,
            gamma: 0.5,
            epochs: 500,
            lr: 0.005,
            rho: 2,
            tau_floor: 0.1,
            prob_clamp: 1e-6,
            projector_hidden: 128,
            seed: 0,
            rewire_scope: RewireScope::TargetOnly,
        }
    }
}

impl PromptConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) {
            return bad(format!("lambdas must be ≥ 0, got {} and {}", self.lambda1, self.lambda2));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma {} not in (0, 1)", self.gamma));
        }
        if !(self.tau_floor > 0.0 && self.tau_floor <= 1.0) {
            return bad(format!("tau_floor {} not in (0, 1]", self.tau_floor));
        }
        if !(self.prob_clamp > 0.0 && self.prob_clamp < 0.5) {
            return bad(format!("prob_clamp {} not in (0, 0.5)", self.prob_clamp));
        }
        if self.epochs == 0 || self.rho == 0 || self.projector_hidden == 0 {
            return bad("epochs, rho and projector_hidden must be ≥ 1".into());
        }
        if !(self.lr >= 0.0) {
            return bad(format!("lr {} must be ≥ 0", self.lr));
        }
        Ok(())
    }
}

/// Bernoulli entropy `−[p ln p + (1−p) ln(1−p)]`.
#[inline]
pub fn bernoulli_entropy(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}
