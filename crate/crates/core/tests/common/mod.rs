#![allow(dead_code)]

use proptest::prelude::*;
use threshold_walk::{HiddenDistribution, HiddenVariableConfig, ThresholdGraph};

pub fn cases(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Connected threshold graph from a random creation sequence (last bit forced to 1).
pub fn connected_sequence(max_n: usize) -> impl Strategy<Value = ThresholdGraph> {
    prop::collection::vec(0u8..=1, 2..=max_n).prop_map(|mut bits| {
        *bits.last_mut().unwrap() = 1;
        bits[0] = bits[1];
        ThresholdGraph::from_creation_sequence(&bits).unwrap()
    })
}

pub fn binary(max_n: usize) -> impl Strategy<Value = ThresholdGraph> {
    (2..=max_n, 1usize..=max_n).prop_map(|(n, k)| {
        let k = k.min(n);
        if n - k <= 1 {
            ThresholdGraph::from_runs(vec![n], vec![0]).unwrap()
        } else {
            ThresholdGraph::from_runs(vec![0, k], vec![n - k, 0]).unwrap()
        }
    })
}

/// First connected uniform-model graph at or after `seed`.
pub fn uniform_connected(n: usize, theta: f64, seed: u64) -> ThresholdGraph {
    (seed..)
        .map(|s| {
            ThresholdGraph::generate(&HiddenVariableConfig {
                n,
                distribution: HiddenDistribution::Uniform {
                    low: 0.0,
                    high: 1.0,
                },
                theta,
                seed: s,
            })
            .unwrap()
        })
        .find(ThresholdGraph::is_connected)
        .unwrap()
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}
