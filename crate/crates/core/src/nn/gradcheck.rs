use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn rel_err(fd: f64, analytic: f64) -> f64 {
    (fd - analytic).abs() / (fd.abs() + analytic.abs()).max(1e-8)
}

fn central<F: FnMut(&[f64]) -> f64>(loss: &mut F, x: &mut [f64], i: usize, h: f64) -> Result<f64> {
    let orig = x[i];
    x[i] = orig + h;
    let up = loss(x);
    x[i] = orig - h;
    let down = loss(x);
    x[i] = orig;
    if !up.is_finite() || !down.is_finite() {
        return Err(Error::NonFinite(format!("loss at coordinate {i}")));
    }
    Ok((up - down) / (2.0 * h))
}

/// Max relative error between central differences and `analytic` over every
/// coordinate of `params`.
pub fn finite_diff_check<F>(mut loss: F, params: &[f64], analytic: &[f64], step: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    if params.len() != analytic.len() {
        return Err(Error::Shape(format!(
            "{} params vs {} gradient entries",
            params.len(),
            analytic.len()
        )));
    }
    let mut x = params.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let fd = central(&mut loss, &mut x, i, step)?;
        worst = worst.max(rel_err(fd, analytic[i]));
    }
    Ok(worst)
}

/// As [`finite_diff_check`], on a seeded random subset of `count`
/// coordinates (all coordinates if `count ≥ params.len()`).
pub fn finite_diff_check_subset<F>(
    mut loss: F,
    params: &[f64],
    analytic: &[f64],
    step: f64,
    count: usize,
    seed: u64,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    if count >= params.len() {
        return finite_diff_check(loss, params, analytic, step);
    }
    if params.len() != analytic.len() {
        return Err(Error::Shape("params and gradient differ in length".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = params.to_vec();
    let mut worst = 0.0f64;
    for i in sample(&mut rng, params.len(), count) {
        let fd = central(&mut loss, &mut x, i, step)?;
        worst = worst.max(rel_err(fd, analytic[i]));
    }
    Ok(worst)
}
