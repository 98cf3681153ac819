use std::collections::VecDeque;

use super::Graph;
use crate::error::{Error, Result};
use crate::nn::DenseMatrix;

/// Induced ρ-hop ego-net around a target node. The target is local index 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph {
    pub local_to_global: Vec<usize>,
    pub features: DenseMatrix,
    pub base_adjacency: DenseMatrix,
    pub hop: usize,
}

impl Subgraph {
    pub const TARGET: usize = 0;

    pub fn len(&self) -> usize {
        self.local_to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local_to_global.is_empty()
    }

    pub fn target_global(&self) -> usize {
        self.local_to_global[Self::TARGET]
    }
}

/// Sparse ρ-hop ego-net: nodes in BFS order (target first) and each node's
/// neighbours inside the ball, as sorted local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EgoNet {
    pub local_to_global: Vec<usize>,
    pub neighbors: Vec<Vec<usize>>,
    pub hop: usize,
}

impl EgoNet {
    pub fn len(&self) -> usize {
        self.local_to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local_to_global.is_empty()
    }
}

/// Nodes within `rho` hops of `target`, BFS order, target first.
pub fn khop_nodes(graph: &Graph, target: usize, rho: usize) -> Result<Vec<usize>> {
    if target >= graph.num_nodes() {
        return Err(Error::OutOfRange(format!(
            "target {target} ≥ num_nodes {}",
            graph.num_nodes()
        )));
    }
    let mut order = vec![target];
    let mut depth = std::collections::HashMap::from([(target, 0usize)]);
    let mut queue = VecDeque::from([target]);
    while let Some(u) = queue.pop_front() {
        let du = depth[&u];
        if du == rho {
            continue;
        }
        for &v in graph.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(v) {
                e.insert(du + 1);
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    Ok(order)
}

fn local_index(order: &[usize]) -> std::collections::HashMap<usize, usize> {
    order.iter().enumerate().map(|(i, &g)| (g, i)).collect()
}

/// Sparse form of [`khop_subgraph`] with the same node order.
pub fn khop_egonet(graph: &Graph, target: usize, rho: usize) -> Result<EgoNet> {
    let order = khop_nodes(graph, target, rho)?;
    let local = local_index(&order);
    let neighbors = order
        .iter()
        .map(|&u| {
            let mut nb: Vec<usize> = graph.neighbors(u).iter().filter_map(|v| local.get(v).copied()).collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    Ok(EgoNet { local_to_global: order, neighbors, hop: rho })
}

/// Breadth-first ball of radius `rho` around `target`, with its induced
/// adjacency. Nodes appear in BFS order, target first.
pub fn khop_subgraph(graph: &Graph, target: usize, rho: usize) -> Result<Subgraph> {
    let order = khop_nodes(graph, target, rho)?;
    let local = local_index(&order);
    let m = order.len();
    let mut adj = DenseMatrix::zeros(m, m);
    for (a, &u) in order.iter().enumerate() {
        for v in graph.neighbors(u) {
            if let Some(&b) = local.get(v) {
                adj[(a, b)] = 1.0;
            }
        }
    }
    Ok(Subgraph {
        features: graph.features().select_rows(&order),
        local_to_global: order,
        base_adjacency: adj,
        hop: rho,
    })
}
