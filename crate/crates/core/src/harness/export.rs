use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{khop_nodes, Graph, LabeledSplit};
use crate::nn::{embed_full_graph, GcnModel};
use crate::par;
use crate::prompt::{candidate_pairs, EdgeScorer, LearnedScorer, TrainedPrompt};

/// Learned probabilities of every candidate pair, per train target, in split
/// order.
pub fn candidate_probabilities(
    model: &GcnModel,
    prompt: &TrainedPrompt,
    graph: &Graph,
    split: &LabeledSplit,
) -> Result<Vec<Vec<f64>>> {
    let h = embed_full_graph(model, graph)?;
    let scorer = LearnedScorer::new(&prompt.projector, &h, prompt.config.prob_clamp)?;
    par::try_map(&split.train, |&(v, _)| {
        let nodes = khop_nodes(graph, v, prompt.config.rho)?;
        Ok(scorer.probs(&nodes, &candidate_pairs(nodes.len(), prompt.config.rewire_scope)))
    })
}

/// CSV `bin_center,count` over `[0, 1]` split into `bins` equal bins; a value
/// of exactly 1 falls in the last bin.
pub fn write_prob_histogram(probs: &[Vec<f64>], bins: usize, out: &mut dyn Write) -> Result<()> {
    if bins == 0 {
        return Err(Error::InvalidParams("bins must be ≥ 1".into()));
    }
    let mut counts = vec![0usize; bins];
    for &p in probs.iter().flatten() {
        counts[((p * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let io = |e| Error::io("<histogram>", e);
    writeln!(out, "bin_center,count").map_err(io)?;
    for (i, c) in counts.iter().enumerate() {
        writeln!(out, "{},{}", (i as f64 + 0.5) / bins as f64, c).map_err(io)?;
    }
    Ok(())
}

/// CSV `node,mean_prob,candidates`, one row per train target, then a summary
/// row `all,<mean of per-node means>,<total candidates>`. Targets without
/// candidates get an empty `mean_prob` and are left out of the summary mean.
pub fn write_edge_density(nodes: &[usize], probs: &[Vec<f64>], out: &mut dyn Write) -> Result<f64> {
    let io = |e| Error::io("<density>", e);
    writeln!(out, "node,mean_prob,candidates").map_err(io)?;
    let mut means = Vec::new();
    for (&v, ps) in nodes.iter().zip(probs) {
        if ps.is_empty() {
            writeln!(out, "{v},,0").map_err(io)?;
        } else {
            let m = ps.iter().sum::<f64>() / ps.len() as f64;
            means.push(m);
            writeln!(out, "{v},{m},{}", ps.len()).map_err(io)?;
        }
    }
    let global = super::mean(&means);
    let total: usize = probs.iter().map(Vec::len).sum();
    writeln!(out, "all,{global},{total}").map_err(io)?;
    Ok(global)
}

fn create(out: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out).map_err(|e| Error::io(out, e))?))
}

pub fn export_prob_histogram(
    model: &GcnModel,
    prompt: &TrainedPrompt,
    graph: &Graph,
    split: &LabeledSplit,
    bins: usize,
    out: impl AsRef<Path>,
) -> Result<()> {
    let probs = candidate_probabilities(model, prompt, graph, split)?;
    let mut w = create(out.as_ref())?;
    write_prob_histogram(&probs, bins, &mut w)?;
    w.flush().map_err(|e| Error::io(out.as_ref(), e))
}

/// Writes the density CSV and returns the global mean.
pub fn export_edge_density(
    model: &GcnModel,
    prompt: &TrainedPrompt,
    graph: &Graph,
    split: &LabeledSplit,
    out: impl AsRef<Path>,
) -> Result<f64> {
    let probs = candidate_probabilities(model, prompt, graph, split)?;
    let nodes: Vec<usize> = split.train.iter().map(|t| t.0).collect();
    let mut w = create(out.as_ref())?;
    let global = write_edge_density(&nodes, &probs, &mut w)?;
    w.flush().map_err(|e| Error::io(out.as_ref(), e))?;
    Ok(global)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_csbm, sample_k_shot, CsbmParams};
    use crate::prompt::{Projector, PromptConfig};
    use crate::nn::LinearProbe;
    use rand::SeedableRng;

    #[test]
    fn histogram_rows_and_conservation() {
        let probs = vec![vec![0.0, 0.05, 0.5], vec![], vec![0.99, 1.0]];
        let mut buf = Vec::new();
        write_prob_histogram(&probs, 10, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[0], "bin_center,count");
        assert_eq!(lines[1], "0.05,2");
        assert_eq!(lines[6], "0.55,1");
        assert_eq!(lines[10], "0.95,2");
        let total: usize = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, 5);
    }

    #[test]
    fn density_summary_weights_nodes_equally() {
        let probs = vec![vec![0.2, 0.4], vec![0.9], vec![]];
        let mut buf = Vec::new();
        let g = write_edge_density(&[7, 3, 5], &probs, &mut buf).unwrap();
        assert!((g - 0.6).abs() < 1e-15);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("node,mean_prob,candidates\n7,0.30000000000000004,2\n3,0.9,1\n5,,0\n"));
        let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
        assert_eq!((last[0], last[2]), ("all", "3"));
        assert_eq!(last[1].parse::<f64>().unwrap(), g);
    }

    #[test]
    fn zero_projector_puts_everything_at_half() {
        let g = generate_csbm(&CsbmParams::symmetric(80, 3, 2.0, 0.1, 0.02), 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let model = GcnModel::init(3, 6, &mut rng);
        let split = sample_k_shot(&g, 2, 0).unwrap();
        let prompt = TrainedPrompt {
            projector: Projector::zeros(6, 4),
            probe: LinearProbe::zeros(6, 2),
            config: PromptConfig { projector_hidden: 4, ..Default::default() },
            log: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let hist = dir.path().join("h.csv");
        export_prob_histogram(&model, &prompt, &g, &split, 10, &hist).unwrap();
        let probs = candidate_probabilities(&model, &prompt, &g, &split).unwrap();
        let total: usize = probs.iter().map(Vec::len).sum();
        let text = std::fs::read_to_string(&hist).unwrap();
        assert!(text.lines().any(|l| l == format!("0.55,{total}")));
        let global = export_edge_density(&model, &prompt, &g, &split, dir.path().join("d.csv")).unwrap();
        assert_eq!(global, 0.5);
    }
}
