//! Topology-oriented prompting for frozen graph neural networks.
//!
//! A pre-trained two-layer GCN is kept frozen; a small projector learns, for
//! each labelled target node, which edges between the target and the rest of
//! its ρ-hop ego-net should exist. Discrete edge choices are relaxed with
//! Gumbel noise and an annealed temperature, regularised towards confident
//! and sparse decisions, and hard-thresholded at inference.

pub mod checkpoint;
pub mod error;
pub mod graph;
pub mod harness;
pub mod nn;
pub mod par;
pub mod pretrain;
pub mod prompt;

pub use error::{Error, Result};
