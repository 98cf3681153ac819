use serde::{Deserialize, Serialize};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for a single value.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    pub per_seed: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl AccuracySummary {
    pub fn from_values(per_seed: Vec<f64>) -> Self {
        let (mean, std) = (mean(&per_seed), sample_std(&per_seed));
        Self { per_seed, mean, std }
    }
}
