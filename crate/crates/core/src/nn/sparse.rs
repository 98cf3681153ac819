use super::DenseMatrix;
use crate::graph::Graph;
use crate::par;

/// Symmetric-normalised adjacency with self-loops in CSR form, for
/// full-graph propagation.
#[derive(Clone, Debug)]
pub struct SparseNormAdj {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseNormAdj {
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.num_nodes();
        let inv_sqrt: Vec<f64> = (0..n).map(|i| ((graph.degree(i) + 1) as f64).powf(-0.5)).collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(2 * graph.num_edges() + n);
        let mut vals = Vec::with_capacity(cols.capacity());
        offsets.push(0);
        for i in 0..n {
            let mut self_done = false;
            for &j in graph.neighbors(i) {
                if !self_done && j > i {
                    cols.push(i);
                    vals.push(inv_sqrt[i] * inv_sqrt[i]);
                    self_done = true;
                }
                cols.push(j);
                vals.push(inv_sqrt[i] * inv_sqrt[j]);
            }
            if !self_done {
                cols.push(i);
                vals.push(inv_sqrt[i] * inv_sqrt[i]);
            }
            offsets.push(cols.len());
        }
        Self { offsets, cols, vals }
    }

    pub fn num_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `Â · dense`. Since `Â` is symmetric this is also `Âᵀ · dense`.
    pub fn spmm(&self, dense: &DenseMatrix) -> DenseMatrix {
        let d = dense.cols();
        let rows = par::map_range(self.num_rows(), |i| {
            let mut acc = vec![0.0; d];
            for k in self.offsets[i]..self.offsets[i + 1] {
                let w = self.vals[k];
                for (a, x) in acc.iter_mut().zip(dense.row(self.cols[k])) {
                    *a += w * x;
                }
            }
            acc
        });
        DenseMatrix::from_vec(self.num_rows(), d, rows.concat()).expect("row lengths are uniform")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{normalize_adjacency, DenseMatrix};

    #[test]
    fn matches_dense_normalization() {
        let params = crate::graph::CsbmParams::symmetric(25, 2, 1.0, 0.3, 0.1);
        let g = crate::graph::generate_csbm(&params, 3).unwrap();
        let mut dense = DenseMatrix::zeros(25, 25);
        for &(u, v) in g.edges() {
            dense[(u, v)] = 1.0;
            dense[(v, u)] = 1.0;
        }
        let want = normalize_adjacency(&dense).unwrap().matmul(g.features()).unwrap();
        let got = SparseNormAdj::from_graph(&g).spmm(g.features());
        for (a, b) in got.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
