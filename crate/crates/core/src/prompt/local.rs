//! Target-only prompted GCN on a sparse ego-net.
//!
//! Only the target's row and column of the adjacency carry selectors, so the
//! forward pass and its gradient w.r.t. the selectors need one pass over the
//! ego-net's edges instead of dense `m × m` products.

use crate::error::Result;
use crate::graph::EgoNet;
use crate::nn::{dot, DenseMatrix, GcnModel};

/// Neighbours of a non-target node, with any base edge to the target dropped
/// (those entries are replaced by selectors).
fn non_target(nb: &[usize]) -> &[usize] {
    match nb.first() {
        Some(0) => &nb[1..],
        _ => nb,
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) struct LocalForward {
    r: Vec<f64>,
    z1: DenseMatrix,
    mixed: DenseMatrix,
    pub h: Vec<f64>,
}

/// Target embedding with `S[0,j] = S[j,0] = s[j]` for every `j ≥ 1`; `s[0]`
/// is ignored. `xw1` holds the ego-net rows of `X·W₁`.
pub(crate) fn local_forward(model: &GcnModel, ego: &EgoNet, xw1: &DenseMatrix, s: &[f64]) -> Result<LocalForward> {
    let m = ego.len();
    let mut r = vec![0.0; m];
    r[0] = 1.0 / (1.0 + s[1..].iter().sum::<f64>()).sqrt();
    for k in 1..m {
        r[k] = 1.0 / (1.0 + non_target(&ego.neighbors[k]).len() as f64 + s[k]).sqrt();
    }
    let mut z1 = DenseMatrix::zeros(m, model.hidden_dim());
    {
        let row = z1.row_mut(0);
        axpy(row, r[0] * r[0], xw1.row(0));
        for j in 1..m {
            axpy(row, s[j] * r[0] * r[j], xw1.row(j));
        }
    }
    for k in 1..m {
        let row = z1.row_mut(k);
        axpy(row, r[k] * r[k], xw1.row(k));
        for &l in non_target(&ego.neighbors[k]) {
            axpy(row, r[k] * r[l], xw1.row(l));
        }
        axpy(row, s[k] * r[k] * r[0], xw1.row(0));
    }
    let mixed = z1.map(|v| model.activation.apply(v)).matmul(&model.layer2)?;
    let mut h = vec![0.0; model.hidden_dim()];
    axpy(&mut h, r[0] * r[0], mixed.row(0));
    for j in 1..m {
        axpy(&mut h, s[j] * r[0] * r[j], mixed.row(j));
    }
    Ok(LocalForward { r, z1, mixed, h })
}

/// `∂L/∂s[j]` for every `j ≥ 1` given `∂L/∂h`; entry 0 is 0.
pub(crate) fn local_backward(
    model: &GcnModel,
    ego: &EgoNet,
    xw1: &DenseMatrix,
    s: &[f64],
    fwd: &LocalForward,
    d_h: &[f64],
) -> Vec<f64> {
    let m = ego.len();
    let r = &fwd.r;
    let v = model.layer2.mul_vec(d_h);
    // Â[0,k], the target row.
    let a0: Vec<f64> = (0..m).map(|k| if k == 0 { r[0] * r[0] } else { s[k] * r[0] * r[k] }).collect();
    let mut d_z1 = DenseMatrix::zeros(m, model.hidden_dim());
    for k in 0..m {
        if a0[k] == 0.0 {
            continue;
        }
        let z = fwd.z1.row(k);
        for (c, g) in d_z1.row_mut(k).iter_mut().enumerate() {
            *g = a0[k] * v[c] * model.activation.grad(z[c]);
        }
    }
    let q = |a: usize, b: usize| dot(d_z1.row(a), xw1.row(b));

    // t[j] = ∂L/∂Â[0,j] + ∂L/∂Â[j,0], the second layer adding Mⱼ·dh.
    let mut t = vec![0.0; m];
    for j in 1..m {
        t[j] = q(0, j) + q(j, 0) + dot(fwd.mixed.row(j), d_h);
    }
    // Degree gradients −½ r_a² Σ_b (∂L/∂Â_ab + ∂L/∂Â_ba) Â_ab.
    let mut g = vec![0.0; m];
    let mut acc0 = 2.0 * (q(0, 0) + dot(fwd.mixed.row(0), d_h)) * a0[0];
    for j in 1..m {
        acc0 += t[j] * a0[j];
    }
    g[0] = -0.5 * r[0] * r[0] * acc0;
    for k in 1..m {
        let mut acc = 2.0 * q(k, k) * r[k] * r[k] + t[k] * a0[k];
        for &l in non_target(&ego.neighbors[k]) {
            acc += (q(k, l) + q(l, k)) * r[k] * r[l];
        }
        g[k] = -0.5 * r[k] * r[k] * acc;
    }
    let mut ds = vec![0.0; m];
    for j in 1..m {
        ds[j] = t[j] * r[0] * r[j] + g[0] + g[j];
    }
    ds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_csbm, khop_egonet, khop_subgraph, CsbmParams};
    use crate::nn::{finite_diff_check, gcn_forward, normalize_adjacency, Activation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_target_embedding(model: &GcnModel, sub: &crate::graph::Subgraph, s: &[f64]) -> Vec<f64> {
        let mut adj = sub.base_adjacency.clone();
        for j in 1..sub.len() {
            adj[(0, j)] = s[j];
            adj[(j, 0)] = s[j];
        }
        gcn_forward(model, &normalize_adjacency(&adj).unwrap(), &sub.features).unwrap().row(0).to_vec()
    }

    #[test]
    fn forward_matches_dense_and_backward_matches_fd() {
        let g = generate_csbm(&CsbmParams::symmetric(60, 3, 1.5, 0.12, 0.04), 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for act in [Activation::Relu, Activation::Identity] {
            let mut model = GcnModel::init(3, 5, &mut rng);
            model.activation = act;
            for target in [0, 31, 59] {
                let sub = khop_subgraph(&g, target, 2).unwrap();
                let ego = khop_egonet(&g, target, 2).unwrap();
                let xw1 = sub.features.matmul(&model.layer1).unwrap();
                let mut s: Vec<f64> = (0..ego.len()).map(|_| rng.gen_range(0.05..0.95)).collect();
                s[0] = 0.0;
                let fwd = local_forward(&model, &ego, &xw1, &s).unwrap();
                let want = dense_target_embedding(&model, &sub, &s);
                for (a, b) in fwd.h.iter().zip(&want) {
                    assert!((a - b).abs() < 1e-12);
                }
                let w: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let ds = local_backward(&model, &ego, &xw1, &s, &fwd, &w);
                let loss = |v: &[f64]| dot(&local_forward(&model, &ego, &xw1, v).unwrap().h, &w);
                let err = finite_diff_check(loss, &s, &ds, 1e-6).unwrap();
                // ReLU kinks near zero pre-activations cost some FD accuracy.
                let tol = if act == Activation::Identity { 1e-6 } else { 1e-5 };
                assert!(err < tol, "{act:?} target {target}: {err}");
            }
        }
    }

    #[test]
    fn hard_selectors_match_dense() {
        let g = generate_csbm(&CsbmParams::symmetric(50, 2, 1.0, 0.15, 0.05), 2).unwrap();
        let model = GcnModel::init(2, 4, &mut ChaCha8Rng::seed_from_u64(0));
        let sub = khop_subgraph(&g, 7, 2).unwrap();
        let ego = khop_egonet(&g, 7, 2).unwrap();
        let xw1 = sub.features.matmul(&model.layer1).unwrap();
        let s: Vec<f64> = (0..ego.len()).map(|j| f64::from(u8::from(j % 3 == 1))).collect();
        let h = local_forward(&model, &ego, &xw1, &s).unwrap().h;
        let want = dense_target_embedding(&model, &sub, &s);
        for (a, b) in h.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
