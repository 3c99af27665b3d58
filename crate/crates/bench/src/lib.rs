//! Fixtures shared by the benchmarks.

use threshold_walk::{HiddenDistribution, HiddenVariableConfig, ThresholdGraph};

/// Binary graph `G_n(1/2)` with a fixed seed.
pub fn binary_graph(n: usize) -> ThresholdGraph {
    ThresholdGraph::generate(&HiddenVariableConfig::binary(n, 0.5, 2024)).expect("binary fixture")
}

/// Connected multi-level graph from uniform hidden values; reseeds until the
/// sample is connected.
pub fn uniform_graph(n: usize) -> ThresholdGraph {
    (0..)
        .map(|seed| {
            ThresholdGraph::generate(&HiddenVariableConfig {
                n,
                distribution: HiddenDistribution::Uniform {
                    low: 0.0,
                    high: 1.0,
                },
                theta: 1.0,
                seed,
            })
            .expect("uniform fixture")
        })
        .find(ThresholdGraph::is_connected)
        .unwrap()
}
