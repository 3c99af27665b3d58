//! Seed sweeps over binary graphs and their tabular summaries.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{classical_evolve_with, classical_spread_check};
use crate::error::{Error, Result};
use crate::graph::{HiddenVariableConfig, ThresholdGraph};
use crate::quantum::{evolve_with, localization_rates};
use crate::spectral::decompose;

/// One `(n, seed, quantity, value)` record. Median rows carry `seed = None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: Option<u64>,
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// `n (1 - Pbar(v1))`, `n (1 - Pbar(v0))` and the reference `2 - 2/n`, `2/(1-p)`.
    Rates,
    /// `max_y |n P_t(y) - 1|` for the random walk.
    Spread,
    /// Quantum and classical `P_t(start)` side by side, start in the top clique.
    Contrast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub p: f64,
    pub t: f64,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Raw rows for a sweep, sorted by `(n, seed, quantity)`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.seeds.is_empty() {
        return Err(Error::Argument("sweep needs at least one seed".into()));
    }
    if spec.sizes.is_empty() {
        return Err(Error::Argument("sweep needs at least one size".into()));
    }
    let mut rows = Vec::new();
    match spec.kind {
        SweepKind::Rates => {
            for r in localization_rates(spec.p, &spec.sizes, &spec.seeds)? {
                let nf = r.n as f64;
                let seed = Some(r.seed);
                rows.push(row(r.n, seed, "clique_rate", r.clique_rate));
                rows.push(row(r.n, seed, "clique_rate_exact", 2.0 - 2.0 / nf));
                if let Some(v0) = r.independent_rate {
                    rows.push(row(r.n, seed, "independent_rate", v0));
                    rows.push(row(
                        r.n,
                        seed,
                        "independent_rate_limit",
                        2.0 / (1.0 - spec.p),
                    ));
                }
            }
        }
        SweepKind::Spread => {
            for r in classical_spread_check(spec.p, spec.t, &spec.sizes, &spec.seeds)? {
                rows.push(row(r.n, Some(r.seed), "spread_deviation", r.deviation));
            }
        }
        SweepKind::Contrast => rows.extend(contrast_rows(spec)?),
    }
    rows.sort_by(|a, b| (a.n, a.seed, &a.quantity).cmp(&(b.n, b.seed, &b.quantity)));
    Ok(rows)
}

fn row(n: usize, seed: Option<u64>, quantity: &str, value: f64) -> SweepRow {
    SweepRow {
        n,
        seed,
        quantity: quantity.to_string(),
        value,
    }
}

fn contrast_rows(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let pairs: Vec<(usize, u64)> = spec
        .sizes
        .iter()
        .flat_map(|&n| spec.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let nested = pairs
        .par_iter()
        .map(|&(n, seed)| -> Result<Vec<SweepRow>> {
            let graph = ThresholdGraph::generate(&HiddenVariableConfig::binary(n, spec.p, seed))?;
            let Some(start) = graph.top_clique_vertex().filter(|_| graph.is_connected()) else {
                return Ok(Vec::new());
            };
            let dec = decompose(&graph)?;
            let quantum = evolve_with(&dec, start, spec.t)?.probabilities().masses[start];
            let classical = classical_evolve_with(&dec, start, spec.t)?.masses[start];
            Ok(vec![
                row(n, Some(seed), "quantum_p_start", quantum),
                row(n, Some(seed), "classical_p_start", classical),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Append one median row per `(n, quantity)` after the per-seed rows.
pub fn with_medians(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut groups: BTreeMap<(usize, &str), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.n, &r.quantity)).or_default().push(r.value);
    }
    let mut out = rows.to_vec();
    for ((n, quantity), mut values) in groups {
        if let Some(m) = median(&mut values) {
            out.push(row(n, None, quantity, m));
        }
    }
    out
}
