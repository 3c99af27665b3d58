//! Continuous-time random walk `exp(-t L)` on threshold graphs, evaluated on
//! the same spectral decomposition as the quantum walk.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{HiddenVariableConfig, ThresholdGraph};
use crate::quantum::spectral_column;
use crate::spectral::{decompose, SpectralDecomposition};

/// Negative masses down to this size are rounding noise and clamped silently.
const NEGATIVE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDistribution {
    pub masses: Vec<f64>,
    pub time: f64,
}

impl ClassicalDistribution {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

fn clamp(masses: &mut [f64]) {
    for m in masses.iter_mut() {
        if *m < 0.0 {
            if *m < -NEGATIVE_TOL {
                log::warn!("clamping negative probability mass {m:e}");
            }
            *m = 0.0;
        }
    }
}

/// Column `start` of `exp(-t L)`.
pub fn classical_evolve(
    graph: &ThresholdGraph,
    start: usize,
    t: f64,
) -> Result<ClassicalDistribution> {
    if !graph.is_connected() {
        return Err(Error::Disconnected("classical evolution"));
    }
    graph.check_vertex(start)?;
    let dec = decompose(graph)?;
    classical_evolve_with(&dec, start, t)
}

pub fn classical_evolve_with(
    dec: &SpectralDecomposition,
    start: usize,
    t: f64,
) -> Result<ClassicalDistribution> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Argument(format!(
            "classical time must be non-negative, got {t}"
        )));
    }
    if start >= dec.n() {
        return Err(Error::VertexOutOfRange {
            vertex: start,
            n: dec.n(),
        });
    }
    // exp underflows to 0 for large t * lambda
    let column = spectral_column(dec, start, |l| Complex64::new((-t * l).exp(), 0.0));
    let mut masses: Vec<f64> = column.into_iter().map(|z| z.re).collect();
    clamp(&mut masses);
    Ok(ClassicalDistribution { masses, time: t })
}

/// Long-time average of the random walk: only the kernel projector survives,
/// so the result is `E_0 e_start`.
pub fn classical_time_average(
    graph: &ThresholdGraph,
    start: usize,
) -> Result<ClassicalDistribution> {
    if !graph.is_connected() {
        return Err(Error::Disconnected("classical time averaging"));
    }
    graph.check_vertex(start)?;
    let dec = decompose(graph)?;
    let mut delta = vec![0.0; graph.n()];
    delta[start] = 1.0;
    let mut masses = dec.projector_apply(0, &delta)?;
    clamp(&mut masses);
    Ok(ClassicalDistribution {
        masses,
        time: f64::INFINITY,
    })
}

/// `max_y |n P_t(y) - 1|`.
pub fn spread_deviation(dist: &ClassicalDistribution) -> f64 {
    let n = dist.masses.len() as f64;
    dist.masses
        .iter()
        .fold(0.0, |m, &p| f64::max(m, (n * p - 1.0).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadSample {
    pub n: usize,
    pub seed: u64,
    pub deviation: f64,
}

/// `max_y |n P_t(y) - 1|` for the random walk started in the top clique block
/// of binary graphs `G_n(p)`, for every `(n, seed)`. Rows sorted by `(n, seed)`;
/// disconnected samples are skipped.
pub fn classical_spread_check(
    p: f64,
    t: f64,
    sizes: &[usize],
    seeds: &[u64],
) -> Result<Vec<SpreadSample>> {
    let pairs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut rows: Vec<SpreadSample> = pairs
        .par_iter()
        .map(|&(n, seed)| -> Result<Option<SpreadSample>> {
            let graph = ThresholdGraph::generate(&HiddenVariableConfig::binary(n, p, seed))?;
            let Some(start) = graph.top_clique_vertex().filter(|_| graph.is_connected()) else {
                return Ok(None);
            };
            let dec = decompose(&graph)?;
            let dist = classical_evolve_with(&dec, start, t)?;
            Ok(Some(SpreadSample {
                n,
                seed,
                deviation: spread_deviation(&dist),
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}
