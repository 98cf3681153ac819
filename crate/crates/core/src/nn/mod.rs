//! Dense kernels, the frozen GCN backbone, the linear probe, Adam, and the
//! finite-difference gradient oracle.

mod adam;
mod gcn;
mod gradcheck;
mod matrix;
pub(crate) mod probe;
mod sparse;

pub use adam::{adam_step, AdamState};
pub use gcn::{
    embed_full_graph, gcn_forward, normalize_adjacency, normalize_backward, Activation, GcnModel,
    NormalizedAdjacency,
};
pub use gradcheck::{finite_diff_check, finite_diff_check_subset};
pub use matrix::{dot, sigmoid, DenseMatrix};
pub use probe::{probe_loss, LinearProbe, ProbeGrad};
pub use sparse::SparseNormAdj;
