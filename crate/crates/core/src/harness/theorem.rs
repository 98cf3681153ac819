use serde::{Deserialize, Serialize};

use crate::checkpoint::FORMAT_VERSION;
use crate::error::{Error, Result};
use crate::graph::{generate_csbm, CsbmParams, Graph};
use crate::par;
use crate::prompt::gumbel_edge_probability;

pub const THEOREM1_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Relative tolerance for the empirical centroid distances.
pub const THEOREM2_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub p: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub format_version: u32,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<Theorem1Row>,
    pub all_pass: bool,
}

/// Monte-Carlo check that `G₁ − G₂ + logit p ≥ 0` has probability `p`, at
/// three standard errors.
pub fn verify_theorem1(probabilities: &[f64], samples: usize, seed: u64) -> Result<Theorem1Report> {
    let mut rows = Vec::with_capacity(probabilities.len());
    for &p in probabilities {
        let estimate = gumbel_edge_probability(p, samples, seed)?;
        let std_error = (p * (1.0 - p) / samples as f64).sqrt();
        let deviation = (estimate - p).abs();
        rows.push(Theorem1Row { p, estimate, std_error, deviation, pass: deviation <= 3.0 * std_error });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(Theorem1Report { format_version: FORMAT_VERSION, samples, seed, rows, all_pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub format_version: u32,
    pub params: CsbmParams,
    pub seed: u64,
    pub num_edges: usize,
    pub dist_empirical: f64,
    pub dist_closed_form: f64,
    pub dist_rewired: f64,
    pub ratio_empirical: f64,
    pub ratio_theoretical: f64,
    pub dist_rel_error: f64,
    pub ratio_rel_error: f64,
    pub pass: bool,
}

/// Class-centroid distances of a linear two-layer mean-aggregation GCN
/// (self-loops, identity weights) before and after oracle rewiring.
///
/// Rewiring is done per target: node `t` is disconnected from everything and
/// reconnected to exactly the same-class nodes within two hops, while every
/// other edge is kept. `Dist′` is the centroid distance of these per-target
/// representations.
pub fn verify_theorem2(params: &CsbmParams, seed: u64) -> Result<Theorem2Report> {
    params.validate()?;
    let (p, q) = (params.intra_prob, params.inter_prob);
    if p == q {
        return Err(Error::InvalidParams("ratio undefined at p=q".into()));
    }
    let graph = generate_csbm(params, seed)?;
    let labels: Vec<usize> = (0..graph.num_nodes())
        .map(|v| graph.label(v).expect("csbm labels every node"))
        .collect();
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::Infeasible("both classes must be populated".into()));
    }
    let n = graph.num_nodes();
    let d = graph.num_features();
    let x = graph.features();

    // Closed neighbourhood sums and sizes on the original graph.
    let sums: Vec<Vec<f64>> = par::map_range(n, |k| closed_sum(&graph, k, |m| x.row(m)));
    let size = |k: usize| (graph.degree(k) + 1) as f64;
    let h1: Vec<Vec<f64>> = (0..n).map(|k| scaled(&sums[k], 1.0 / size(k))).collect();
    let h2: Vec<Vec<f64>> = par::map_range(n, |k| scaled(&closed_sum(&graph, k, |m| &h1[m]), 1.0 / size(k)));

    let rewired: Vec<Vec<f64>> = par::map_range(n, |t| {
        let same = same_class_two_hop(&graph, &labels, t);
        let denom = (same.len() + 1) as f64;
        let mut h1_t = x.row(t).to_vec();
        let mut acc = vec![0.0; d];
        for &k in &same {
            add(&mut h1_t, x.row(k));
            // k gains an edge to t unless it already had one.
            if graph.has_edge(k, t) {
                add(&mut acc, &h1[k]);
            } else {
                let mut s = sums[k].clone();
                add(&mut s, x.row(t));
                add(&mut acc, &scaled(&s, 1.0 / (size(k) + 1.0)));
            }
        }
        add(&mut acc, &scaled(&h1_t, 1.0 / denom));
        scaled(&acc, 1.0 / denom)
    });

    let dist_empirical = centroid_distance(&h2, &labels);
    let dist_rewired = centroid_distance(&rewired, &labels);
    let dist_closed_form = ((p - q) / (p + q)).powi(2) * params.mean_separation();
    let ratio_theoretical = (p + q) / (p - q).abs();
    let ratio_empirical = dist_rewired / dist_empirical;
    let dist_rel_error = (dist_empirical - dist_closed_form).abs() / dist_closed_form;
    let ratio_rel_error = (ratio_empirical - ratio_theoretical).abs() / ratio_theoretical;
    Ok(Theorem2Report {
        format_version: FORMAT_VERSION,
        params: params.clone(),
        seed,
        num_edges: graph.num_edges(),
        dist_empirical,
        dist_closed_form,
        dist_rewired,
        ratio_empirical,
        ratio_theoretical,
        dist_rel_error,
        ratio_rel_error,
        pass: dist_rel_error <= THEOREM2_TOLERANCE && ratio_rel_error <= THEOREM2_TOLERANCE,
    })
}

fn closed_sum<'a>(graph: &Graph, k: usize, row: impl Fn(usize) -> &'a [f64]) -> Vec<f64> {
    let mut s = row(k).to_vec();
    for &m in graph.neighbors(k) {
        add(&mut s, row(m));
    }
    s
}

fn add(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn scaled(v: &[f64], c: f64) -> Vec<f64> {
    v.iter().map(|x| x * c).collect()
}

/// Same-class nodes at distance 1 or 2 from `t`, ascending.
fn same_class_two_hop(graph: &Graph, labels: &[usize], t: usize) -> Vec<usize> {
    let mut seen = vec![false; graph.num_nodes()];
    seen[t] = true;
    let mut out = Vec::new();
    for &a in graph.neighbors(t) {
        for &b in std::iter::once(&a).chain(graph.neighbors(a)) {
            if !seen[b] {
                seen[b] = true;
                if labels[b] == labels[t] {
                    out.push(b);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn centroid_distance(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let d = rows[0].len();
    let mut c = [vec![0.0; d], vec![0.0; d]];
    let mut counts = [0usize; 2];
    for (r, &l) in rows.iter().zip(labels) {
        add(&mut c[l], r);
        counts[l] += 1;
    }
    (0..d)
        .map(|j| c[0][j] / counts[0] as f64 - c[1][j] / counts[1] as f64)
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}
