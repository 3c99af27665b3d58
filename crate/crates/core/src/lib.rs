//! Continuous-time quantum walks and random walks on threshold network models.
//!
//! A threshold graph is sampled from i.i.d. hidden values `X_i` with an edge
//! `i ~ j` iff `X_i + X_j > theta`. Its creation sequence splits the vertices
//! into levels, each holding a clique block `V_i^(1)` and an independent block
//! `V_i^(0)`. That structure makes the Laplacian spectrum integral and its
//! eigenvectors explicit, so both walks can be evaluated exactly:
//!
//! - [`graph`]: sampling, creation sequences, block structure, canonical order.
//! - [`spectral`]: the exact eigendecomposition and spectral projectors.
//! - [`quantum`]: `exp(i t L)` by closed form or spectral synthesis, and exact
//!   time averages.
//! - [`classical`]: `exp(-t L)` and its long-time behaviour.
//! - [`oracle`]: dense O(n^3) reference code (scaling-and-squaring `expm`,
//!   Jacobi eigensolver, numeric time averaging) used to check all of the above.
//! - [`sweep`]: seed sweeps over binary graphs.
//!
//! ```
//! use threshold_walk::{graph::HiddenVariableConfig, quantum, ThresholdGraph};
//!
//! let g = ThresholdGraph::generate(&HiddenVariableConfig::explicit(vec![1.0, 1.0, 1.0, 0.0, 0.0], 0.5)).unwrap();
//! let avg = quantum::time_averaged(&g, 0).unwrap();
//! assert!((avg.masses[0] - 0.68).abs() < 1e-12);
//! ```

pub mod classical;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod quantum;
pub mod spectral;
pub mod sweep;

pub use classical::{classical_evolve, classical_time_average, ClassicalDistribution};
pub use error::{Error, Result};
pub use graph::{
    generate, Block, BlockStructure, GraphFile, HiddenDistribution, HiddenVariableConfig, Part,
    ThresholdGraph,
};
pub use quantum::{
    evolve, probability, time_averaged, AmplitudeVector, Method, ProbabilityDistribution,
};
pub use spectral::{decompose, SpectralDecomposition};
