use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{khop_nodes, Graph, LabeledSplit};
use crate::nn::{embed_full_graph, GcnModel};
use crate::par;
use crate::prompt::{tune_prompt_observed, PromptConfig, RewireScope};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum BenchOutcome {
    Completed { seconds: f64, median_epoch_seconds: f64 },
    /// Not run: the estimated working set exceeds the budget.
    OutOfMemory { estimated_bytes: u64, budget_bytes: u64 },
}

impl BenchOutcome {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            BenchOutcome::Completed { seconds, .. } => Some(*seconds),
            BenchOutcome::OutOfMemory { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub epochs: usize,
    pub rho: usize,
    pub target_only: BenchOutcome,
    pub all_pairs: BenchOutcome,
}

impl BenchReport {
    /// `(seconds_target_only, seconds_all_pairs)` when both completed.
    pub fn seconds(&self) -> Option<(f64, f64)> {
        Some((self.target_only.seconds()?, self.all_pairs.seconds()?))
    }
}

/// `MemAvailable` from `/proc/meminfo`, if readable.
pub fn available_memory_bytes() -> Option<u64> {
    let text = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = text.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Rough working-set estimate for one all-pairs objective evaluation: a
/// handful of dense `m × m` buffers per ego-net plus per-pair vectors kept
/// for every target until the reduction.
pub fn estimate_all_pairs_bytes(ego_sizes: &[usize]) -> u64 {
    let per_pair: u64 = ego_sizes.iter().map(|&m| (m * m.saturating_sub(1) / 2) as u64 * 4).sum();
    let dense: u64 = ego_sizes.iter().map(|&m| (m * m) as u64 * 8).max().unwrap_or(0);
    8 * (per_pair + dense)
}

/// Wall-clock of [`tune_prompt`](crate::prompt::tune_prompt) under each scope
/// with the same seed and epoch budget, on a single thread. Embeddings are
/// computed once, outside the timed region.
pub fn bench_rewire_scope(
    graph: &Graph,
    model: &GcnModel,
    split: &LabeledSplit,
    config: &PromptConfig,
    memory_budget_bytes: Option<u64>,
) -> Result<BenchReport> {
    config.validate()?;
    let h = embed_full_graph(model, graph)?;
    let mut sizes = Vec::with_capacity(split.train.len());
    for &(v, _) in &split.train {
        sizes.push(khop_nodes(graph, v, config.rho)?.len());
    }
    let budget = memory_budget_bytes.or_else(available_memory_bytes);

    let run = |scope: RewireScope| -> Result<BenchOutcome> {
        let cfg = PromptConfig { rewire_scope: scope, ..config.clone() };
        par::single_threaded(|| {
            let mut epoch_times = Vec::with_capacity(cfg.epochs);
            let start = Instant::now();
            let mut last = start;
            tune_prompt_observed(model, graph, &h, split, &cfg, &mut |_| {
                let now = Instant::now();
                epoch_times.push((now - last).as_secs_f64());
                last = now;
            })?;
            let seconds = start.elapsed().as_secs_f64();
            epoch_times.sort_by(f64::total_cmp);
            let median_epoch_seconds = epoch_times[epoch_times.len() / 2];
            Ok(BenchOutcome::Completed { seconds, median_epoch_seconds })
        })
    };

    let target_only = run(RewireScope::TargetOnly)?;
    let estimated = estimate_all_pairs_bytes(&sizes);
    let all_pairs = match budget {
        Some(b) if estimated > b => BenchOutcome::OutOfMemory { estimated_bytes: estimated, budget_bytes: b },
        _ => run(RewireScope::AllPairs)?,
    };
    Ok(BenchReport { epochs: config.epochs, rho: config.rho, target_only, all_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_csbm, sample_k_shot, CsbmParams};
    use rand::SeedableRng;

    fn setup() -> (Graph, GcnModel, LabeledSplit) {
        let g = generate_csbm(&CsbmParams::symmetric(120, 4, 2.0, 0.05, 0.01), 0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        (g.clone(), GcnModel::init(4, 8, &mut rng), sample_k_shot(&g, 2, 0).unwrap())
    }

    #[test]
    fn smoke_single_epoch() {
        let (g, m, s) = setup();
        let cfg = PromptConfig { epochs: 1, projector_hidden: 4, ..Default::default() };
        let r = bench_rewire_scope(&g, &m, &s, &cfg, None).unwrap();
        let (a, b) = r.seconds().unwrap();
        assert!(a > 0.0 && b > 0.0);
    }

    #[test]
    fn tiny_budget_reports_oom() {
        let (g, m, s) = setup();
        let cfg = PromptConfig { epochs: 1, projector_hidden: 4, ..Default::default() };
        let r = bench_rewire_scope(&g, &m, &s, &cfg, Some(1)).unwrap();
        assert!(matches!(r.all_pairs, BenchOutcome::OutOfMemory { budget_bytes: 1, .. }));
        assert!(r.target_only.seconds().is_some());
    }

    #[test]
    fn estimate_by_hand() {
        // m = 3: 3 pairs · 4 values plus 8 dense 3×3 buffers, 8 bytes each.
        assert_eq!(estimate_all_pairs_bytes(&[3]), 8 * (12 + 72));
        assert_eq!(estimate_all_pairs_bytes(&[]), 0);
    }
}
