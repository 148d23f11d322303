//! Fidelity measures for subgraph explanations of graph classifiers, with
//! exact enumeration tools for the information-theoretic quantities behind
//! them.

pub mod classifiers;
pub mod datasets;
pub mod error;
pub mod evaluation;
pub mod fidelity;
pub mod graph;
pub mod io;
pub mod matching;
pub mod rng;
pub mod samplers;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{edit_distance, remove_edges, union_edges, Edge, EdgeSet, Explanation, Features, Graph, LabeledGraph};
pub use matching::{contains_subgraph, Containment};
pub use rng::StreamRng;
pub use samplers::{perturb_explanation, round_count, sample_edges, SampleMode};
