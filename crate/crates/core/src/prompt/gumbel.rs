use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::sigmoid;
use crate::par;

/// One draw from Gumbel(0, 1): `−ln(−ln u)` with `u` uniform on (0, 1).
pub fn sample_gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return -(-u.ln()).ln();
        }
    }
}

/// Relaxed Bernoulli selector `σ((g₁ − g₂ + ln(p/(1−p))) / τ)`.
///
/// The argument is clipped to ±36 so the result stays strictly inside (0, 1).
pub fn soft_edge_selector(p: f64, g1: f64, g2: f64, tau: f64) -> f64 {
    selector_from_noise(p, g1 - g2, tau)
}

#[inline]
pub(crate) fn selector_from_noise(p: f64, noise: f64, tau: f64) -> f64 {
    let x = ((noise + (p / (1.0 - p)).ln()) / tau).clamp(-36.0, 36.0);
    sigmoid(x)
}

/// `∂s/∂p` for the selector at fixed noise.
#[inline]
pub fn soft_edge_selector_grad(p: f64, g1: f64, g2: f64, tau: f64) -> f64 {
    let s = soft_edge_selector(p, g1, g2, tau);
    selector_grad_from_value(s, p, tau)
}

#[inline]
pub(crate) fn selector_grad_from_value(s: f64, p: f64, tau: f64) -> f64 {
    s * (1.0 - s) / (tau * p * (1.0 - p))
}

const BLOCK: usize = 1 << 15;

/// Monte-Carlo estimate of `Pr(G₁ − G₂ + ln(p/(1−p)) ≥ 0)`.
///
/// Samples are drawn in fixed-size blocks, each from its own ChaCha stream, so
/// the estimate does not depend on how blocks are scheduled.
pub fn gumbel_edge_probability(p: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams(format!("p = {p} must lie strictly inside (0, 1)")));
    }
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let logit = (p / (1.0 - p)).ln();
    let blocks = samples.div_ceil(BLOCK);
    let hits = par::map_range(blocks, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let n = BLOCK.min(samples - b * BLOCK);
        (0..n)
            .filter(|_| sample_gumbel(&mut rng) - sample_gumbel(&mut rng) + logit >= 0.0)
            .count()
    });
    Ok(hits.iter().sum::<usize>() as f64 / samples as f64)
}
