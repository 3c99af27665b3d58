//! Continuous-time quantum walk `U_t = exp(i t L)` on threshold graphs.
//!
//! Two evaluators are provided. Spectral synthesis sums `e^{i t lambda} E_lambda`
//! over the exact eigenspaces and is the general-purpose path. The closed-form
//! path evaluates the propagator entries level by level in O(m) each, so a
//! whole column costs O(n + m^2); entries outside its index coverage are
//! taken from the transposed entry (U is symmetric) or, failing that, from
//! the spectral projectors.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{HiddenVariableConfig, Part, ThresholdGraph};
use crate::oracle::ComplexMatrix;
use crate::spectral::{decompose, SpectralDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Spectral,
}

/// `Psi_t = U_t e_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    pub entries: Vec<Complex64>,
    pub time: f64,
    pub start: usize,
}

impl AmplitudeVector {
    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> ProbabilityDistribution {
        ProbabilityDistribution {
            masses: self.entries.iter().map(Complex64::norm_sqr).collect(),
            kind: DistributionKind::Instant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Instant,
    TimeAveraged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    pub masses: Vec<f64>,
    pub kind: DistributionKind,
}

impl ProbabilityDistribution {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

fn phase(t: f64, lambda: f64) -> Complex64 {
    Complex64::new(0.0, t * lambda).exp()
}

fn require_connected(graph: &ThresholdGraph, what: &'static str) -> Result<()> {
    if graph.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected(what))
    }
}

/// Entry of the propagator of a complete split graph (clique of size `k_G`
/// joined to an independent set of size `l_G`).
pub fn propagator_entry_binary(
    graph: &ThresholdGraph,
    v: usize,
    w: usize,
    t: f64,
) -> Result<Complex64> {
    let (k, l) = graph.binary_split().ok_or(Error::NotBinary)?;
    graph.check_vertex(v)?;
    graph.check_vertex(w)?;
    let n = graph.n() as f64;
    let delta = if v == w { 1.0 } else { 0.0 };
    let e_n = phase(t, n);
    let one = Complex64::new(1.0, 0.0);
    Ok(match (v < k, w < k) {
        (true, true) => e_n * delta + (one - e_n) / n,
        (true, false) | (false, true) => (one - e_n) / n,
        (false, false) => {
            let (kf, lf) = (k as f64, l as f64);
            let e_k = phase(t, kf);
            e_k * delta + (one / n + e_n * kf / (n * lf) - e_k / lf)
        }
    })
}

/// Whether the level-wise closed form covers `(v, w)` directly: `v` in a
/// clique block of level `i` and `w` in a clique block of level `2..=i` or an
/// independent block of level `1..i`; or `v` in an independent block of level
/// `i` and `w` anywhere in levels `1..=i` (levels 1-based).
pub fn closed_form_covers(graph: &ThresholdGraph, v: usize, w: usize) -> bool {
    let (iv, pv) = graph.level_of(v);
    let (iw, pw) = graph.level_of(w);
    match (pv, pw) {
        (Part::Clique, Part::Clique) => iw >= 1 && iw <= iv,
        (Part::Clique, Part::Independent) => iw < iv,
        (Part::Independent, _) => iw <= iv,
    }
}

/// Level-wise closed form of `(U_t)_{v,w}` for connected threshold graphs.
/// Fails with [`Error::Coverage`] for pairs the closed form does not address
/// directly; see [`closed_form_covers`].
pub fn propagator_entry_general(
    graph: &ThresholdGraph,
    v: usize,
    w: usize,
    t: f64,
) -> Result<Complex64> {
    require_connected(graph, "the closed-form propagator")?;
    graph.check_vertex(v)?;
    graph.check_vertex(w)?;
    if !closed_form_covers(graph, v, w) {
        return Err(Error::Coverage { v, w });
    }
    let b = graph.blocks();
    let m = b.levels();
    let dk: Vec<i64> = b.degrees_k.iter().map(|&d| d as i64).collect();
    let dl: Vec<i64> = b.degrees_l.iter().map(|&d| d as i64).collect();
    let n = graph.n() as f64;
    let e = |x: i64| phase(t, x as f64);
    let delta = if v == w { 1.0 } else { 0.0 };

    // clique-eigenvalue weight of level j >= 1 (0-based): k_j / (d_j (k_j + d_j))
    let clique_term = |j: usize| {
        let num = (dl[j - 1] - dl[j]) as f64;
        let den = ((dk[j] - dl[j - 1] + 1) * (dk[j] - dl[j] + 1)) as f64;
        e(dk[j] + 1) * (num / den)
    };
    // independent-eigenvalue weight of level j <= m-2: l_j / ((k_j + d_j) d_{j+1})
    let indep_term = |j: usize| {
        let num = (dk[j + 1] - dk[j]) as f64;
        let den = ((dk[j] - dl[j] + 1) * (dk[j + 1] - dl[j] + 1)) as f64;
        e(dl[j]) * (num / den)
    };

    let (i, part) = graph.level_of(v);
    let mut value = Complex64::new(1.0 / n, 0.0);
    match part {
        Part::Clique => {
            let own = (dk[i] - dl[i] + 1) as f64;
            value += e(dk[i] + 1) * (delta - 1.0 / own);
            value += (i + 1..m).map(clique_term).sum::<Complex64>();
            value += (i..m.saturating_sub(1)).map(indep_term).sum::<Complex64>();
        }
        Part::Independent => {
            let own = (dk[i + 1] - dl[i] + 1) as f64;
            value += e(dl[i]) * (delta - 1.0 / own);
            value += (i + 1..m).map(clique_term).sum::<Complex64>();
            value += (i + 1..m.saturating_sub(1))
                .map(indep_term)
                .sum::<Complex64>();
        }
    }
    Ok(value)
}

/// `(U_t)_{v,w}` from the spectral projectors.
pub fn propagator_entry_spectral(
    dec: &SpectralDecomposition,
    v: usize,
    w: usize,
    t: f64,
) -> Complex64 {
    dec.eigenspaces()
        .iter()
        .map(|e| phase(t, e.eigenvalue as f64) * e.entry(v, w))
        .sum()
}

/// Any entry of `U_t`: closed form, then its transpose, then spectral projectors.
pub fn propagator_entry(graph: &ThresholdGraph, v: usize, w: usize, t: f64) -> Result<Complex64> {
    let mut fallback = None;
    entry_with_fallback(graph, v, w, t, &mut fallback)
}

fn entry_with_fallback(
    graph: &ThresholdGraph,
    v: usize,
    w: usize,
    t: f64,
    fallback: &mut Option<SpectralDecomposition>,
) -> Result<Complex64> {
    match propagator_entry_general(graph, v, w, t) {
        Err(Error::Coverage { .. }) => {}
        other => return other,
    }
    match propagator_entry_general(graph, w, v, t) {
        Err(Error::Coverage { .. }) => {}
        other => return other,
    }
    if fallback.is_none() {
        *fallback = Some(SpectralDecomposition::build(graph)?);
    }
    Ok(propagator_entry_spectral(
        fallback.as_ref().unwrap(),
        v,
        w,
        t,
    ))
}

/// Sum `weight(lambda) E_lambda e_start` over all eigenspaces.
pub(crate) fn spectral_column(
    dec: &SpectralDecomposition,
    start: usize,
    weight: impl Fn(f64) -> Complex64,
) -> Vec<Complex64> {
    let mut delta = vec![0.0; dec.n()];
    delta[start] = 1.0;
    let mut out = vec![Complex64::new(0.0, 0.0); dec.n()];
    for space in dec.eigenspaces() {
        let w = weight(space.eigenvalue as f64);
        for (o, x) in out.iter_mut().zip(space.apply(&delta)) {
            *o += w * x;
        }
    }
    out
}

/// Column `start` of `U_t`.
pub fn evolve(
    graph: &ThresholdGraph,
    start: usize,
    t: f64,
    method: Method,
) -> Result<AmplitudeVector> {
    require_connected(graph, "quantum evolution")?;
    graph.check_vertex(start)?;
    let entries = match method {
        Method::Spectral => {
            let dec = decompose(graph)?;
            spectral_column(&dec, start, |l| phase(t, l))
        }
        Method::ClosedForm => closed_form_column(graph, start, t)?,
    };
    Ok(AmplitudeVector {
        entries,
        time: t,
        start,
    })
}

/// Column `start` of `U_t` with a precomputed decomposition.
pub fn evolve_with(dec: &SpectralDecomposition, start: usize, t: f64) -> Result<AmplitudeVector> {
    if start >= dec.n() {
        return Err(Error::VertexOutOfRange {
            vertex: start,
            n: dec.n(),
        });
    }
    Ok(AmplitudeVector {
        entries: spectral_column(dec, start, |l| phase(t, l)),
        time: t,
        start,
    })
}

/// The column is constant on every block apart from the start vertex, so one
/// representative entry per block suffices.
fn closed_form_column(graph: &ThresholdGraph, start: usize, t: f64) -> Result<Vec<Complex64>> {
    let mut fallback = None;
    let mut out = vec![Complex64::new(0.0, 0.0); graph.n()];
    for block in graph.layout() {
        let rep = block.range().find(|&p| p != start);
        if let Some(rep) = rep {
            let value = entry_with_fallback(graph, rep, start, t, &mut fallback)?;
            out[block.range()].fill(value);
        }
    }
    out[start] = entry_with_fallback(graph, start, start, t, &mut fallback)?;
    Ok(out)
}

/// `P_t(x) = |Psi_t(x)|^2`, closed-form path.
pub fn probability(
    graph: &ThresholdGraph,
    start: usize,
    t: f64,
) -> Result<ProbabilityDistribution> {
    probability_with(graph, start, t, Method::ClosedForm)
}

pub fn probability_with(
    graph: &ThresholdGraph,
    start: usize,
    t: f64,
    method: Method,
) -> Result<ProbabilityDistribution> {
    Ok(evolve(graph, start, t, method)?.probabilities())
}

/// Full `U_t` assembled column by column.
pub fn propagator_matrix(graph: &ThresholdGraph, t: f64, method: Method) -> Result<ComplexMatrix> {
    require_connected(graph, "the propagator")?;
    let n = graph.n();
    let columns: Vec<Vec<Complex64>> = match method {
        Method::Spectral => {
            let dec = decompose(graph)?;
            (0..n)
                .map(|s| spectral_column(&dec, s, |l| phase(t, l)))
                .collect()
        }
        Method::ClosedForm => (0..n)
            .map(|s| closed_form_column(graph, s, t))
            .collect::<Result<_>>()?,
    };
    Ok(ComplexMatrix::from_fn(n, n, |i, j| columns[j][i]))
}

/// Full `U_t` from the complete-split-graph formula.
pub fn binary_propagator_matrix(graph: &ThresholdGraph, t: f64) -> Result<ComplexMatrix> {
    graph.binary_split().ok_or(Error::NotBinary)?;
    let n = graph.n();
    let mut u = ComplexMatrix::zeros(n, n);
    for v in 0..n {
        for w in 0..n {
            u[(v, w)] = propagator_entry_binary(graph, v, w, t)?;
        }
    }
    Ok(u)
}

/// Exact long-time average `lim (1/T) int_0^T P_t dt = sum_lambda |E_lambda e_start|^2`.
pub fn time_averaged(graph: &ThresholdGraph, start: usize) -> Result<ProbabilityDistribution> {
    require_connected(graph, "time averaging")?;
    graph.check_vertex(start)?;
    let dec = decompose(graph)?;
    Ok(time_averaged_with(&dec, start))
}

pub fn time_averaged_with(dec: &SpectralDecomposition, start: usize) -> ProbabilityDistribution {
    let mut delta = vec![0.0; dec.n()];
    delta[start] = 1.0;
    let mut masses = vec![0.0; dec.n()];
    for space in dec.eigenspaces() {
        for (m, x) in masses.iter_mut().zip(space.apply(&delta)) {
            *m += x * x;
        }
    }
    ProbabilityDistribution {
        masses,
        kind: DistributionKind::TimeAveraged,
    }
}

/// Closed-form time average, available for a start in the top clique block
/// `V_m^(1)` of any connected graph, and for a start in the independent set
/// of a complete split graph.
pub fn time_averaged_closed_form(
    graph: &ThresholdGraph,
    start: usize,
) -> Result<ProbabilityDistribution> {
    require_connected(graph, "time averaging")?;
    graph.check_vertex(start)?;
    let n = graph.n() as f64;
    let (level, part) = graph.level_of(start);
    let masses = if part == Part::Clique && level == graph.blocks().levels() - 1 {
        (0..graph.n())
            .map(|x| {
                if x == start {
                    (1.0 - 1.0 / n).powi(2) + 1.0 / (n * n)
                } else {
                    2.0 / (n * n)
                }
            })
            .collect()
    } else {
        let (k, l) = graph.binary_split().ok_or_else(|| {
            Error::Argument(
                "closed-form time average needs a top-clique start or a binary graph".into(),
            )
        })?;
        let (kf, lf) = (k as f64, l as f64);
        let shared = (kf / (n * lf)).powi(2) + 1.0 / (n * n);
        (0..graph.n())
            .map(|x| {
                if x < k {
                    2.0 / (n * n)
                } else if x == start {
                    (1.0 - 1.0 / lf).powi(2) + shared
                } else {
                    1.0 / (lf * lf) + shared
                }
            })
            .collect()
    };
    Ok(ProbabilityDistribution {
        masses,
        kind: DistributionKind::TimeAveraged,
    })
}

/// One binary-model sample of the localization rates `n (1 - Pbar(start))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSample {
    pub n: usize,
    pub seed: u64,
    pub k_g: usize,
    pub l_g: usize,
    /// Start in the clique.
    pub clique_rate: f64,
    /// Start in the independent set; `None` when it is empty.
    pub independent_rate: Option<f64>,
}

/// `n (1 - Pbar(v1))` and `n (1 - Pbar(v0))` on binary graphs `G_n(p)` for every
/// `(n, seed)` pair, computed from the spectral projectors. Rows are sorted
/// by `(n, seed)`. Samples whose graph is disconnected (no clique vertex) are
/// skipped.
pub fn localization_rates(p: f64, sizes: &[usize], seeds: &[u64]) -> Result<Vec<RateSample>> {
    let pairs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut rows: Vec<RateSample> = pairs
        .par_iter()
        .map(|&(n, seed)| -> Result<Option<RateSample>> {
            let graph = ThresholdGraph::generate(&HiddenVariableConfig::binary(n, p, seed))?;
            let Some((k_g, l_g)) = graph.binary_split() else {
                return Ok(None);
            };
            if !graph.is_connected() {
                return Ok(None);
            }
            let dec = decompose(&graph)?;
            let nf = n as f64;
            let rate = |start: usize| nf * (1.0 - time_averaged_with(&dec, start).masses[start]);
            Ok(Some(RateSample {
                n,
                seed,
                k_g,
                l_g,
                clique_rate: rate(0),
                independent_rate: (l_g > 0).then(|| rate(k_g)),
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}
