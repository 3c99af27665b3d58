//! Exact Laplacian eigendecomposition of a connected threshold graph.
//!
//! Every eigenvalue is an integer: `D_{k_i} + 1` on clique blocks, `D_{l_i}`
//! on independent blocks, and `0` for the constant vector. Eigenvectors are
//! stored implicitly: within-block Helmert difference vectors are grouped
//! into a per-block centering projector, and the between-block vectors are
//! two-valued step vectors over contiguous canonical ranges. Projectors then
//! cost O(n) to apply and O(1) per matrix entry.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ThresholdGraph;

/// Up to this size every eigenvector is residual-checked at construction;
/// above it one representative per block pattern is checked.
pub const DENSE_LIMIT: usize = 4096;

const RESIDUAL_TOL: f64 = 1e-10;

/// A vector equal to `head_value` on `head`, `tail_value` on `tail`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct StepVector {
    pub head: Range<usize>,
    pub head_value: f64,
    pub tail: Range<usize>,
    pub tail_value: f64,
}

impl StepVector {
    pub fn value_at(&self, p: usize) -> f64 {
        if self.head.contains(&p) {
            self.head_value
        } else if self.tail.contains(&p) {
            self.tail_value
        } else {
            0.0
        }
    }

    pub fn dot(&self, psi: &[f64]) -> f64 {
        self.head_value * psi[self.head.clone()].iter().sum::<f64>()
            + self.tail_value * psi[self.tail.clone()].iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenVector {
    /// `(1, ..., 1, -j, 0, ...)/sqrt(j(j+1))` with `j` ones starting at `start`.
    Difference {
        start: usize,
        j: usize,
    },
    Step(StepVector),
}

impl EigenVector {
    pub fn value_at(&self, p: usize) -> f64 {
        match self {
            EigenVector::Difference { start, j } => {
                let norm = ((j * (j + 1)) as f64).sqrt();
                if (*start..start + j).contains(&p) {
                    1.0 / norm
                } else if p == start + j {
                    -(*j as f64) / norm
                } else {
                    0.0
                }
            }
            EigenVector::Step(s) => s.value_at(p),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        (0..n).map(|p| self.value_at(p)).collect()
    }
}

/// Orthogonal pieces of one eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// The span of all difference vectors of one block, i.e. the
    /// mean-removing projector restricted to that block.
    Centering(Range<usize>),
    Step(StepVector),
}

impl Component {
    pub fn dimension(&self) -> usize {
        match self {
            Component::Centering(r) => r.len().saturating_sub(1),
            Component::Step(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace {
    pub eigenvalue: u64,
    pub components: Vec<Component>,
}

impl Eigenspace {
    pub fn dimension(&self) -> usize {
        self.components.iter().map(Component::dimension).sum()
    }

    /// Explicit orthonormal basis of the eigenspace.
    pub fn vectors(&self) -> impl Iterator<Item = EigenVector> + '_ {
        self.components
            .iter()
            .flat_map(|c| -> Box<dyn Iterator<Item = EigenVector>> {
                match c {
                    Component::Centering(r) => {
                        let start = r.start;
                        Box::new((1..r.len()).map(move |j| EigenVector::Difference { start, j }))
                    }
                    Component::Step(s) => Box::new(std::iter::once(EigenVector::Step(s.clone()))),
                }
            })
    }

    /// `E_lambda psi`.
    pub fn apply(&self, psi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; psi.len()];
        for c in &self.components {
            match c {
                Component::Centering(r) => {
                    let mean = psi[r.clone()].iter().sum::<f64>() / r.len() as f64;
                    for p in r.clone() {
                        out[p] += psi[p] - mean;
                    }
                }
                Component::Step(s) => {
                    let coef = s.dot(psi);
                    for p in s.head.clone() {
                        out[p] += coef * s.head_value;
                    }
                    for p in s.tail.clone() {
                        out[p] += coef * s.tail_value;
                    }
                }
            }
        }
        out
    }

    /// `(E_lambda)_{v,w}`.
    pub fn entry(&self, v: usize, w: usize) -> f64 {
        self.components
            .iter()
            .map(|c| match c {
                Component::Centering(r) if r.contains(&v) && r.contains(&w) => {
                    f64::from(u8::from(v == w)) - 1.0 / r.len() as f64
                }
                Component::Centering(_) => 0.0,
                Component::Step(s) => s.value_at(v) * s.value_at(w),
            })
            .sum()
    }
}

/// `u_i` and `d_i`: vertex counts above and below level `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelOffsets {
    pub above: usize,
    pub below: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    n: usize,
    eigenspaces: Vec<Eigenspace>,
    offsets: Vec<LevelOffsets>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumEntry {
    pub eigenvalue: u64,
    pub multiplicity: usize,
}

/// Residual-checked eigendecomposition of a connected threshold graph.
pub fn decompose(graph: &ThresholdGraph) -> Result<SpectralDecomposition> {
    SpectralDecomposition::new(graph)
}

impl SpectralDecomposition {
    pub fn new(graph: &ThresholdGraph) -> Result<Self> {
        let dec = Self::build(graph)?;
        dec.validate(graph)?;
        Ok(dec)
    }

    /// Assemble the eigenspaces from the block structure without the residual
    /// check. O(m).
    pub(crate) fn build(graph: &ThresholdGraph) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::Disconnected("spectral decomposition"));
        }
        let b = graph.blocks();
        let n = graph.n();
        let mut spaces: BTreeMap<u64, Vec<Component>> = BTreeMap::new();
        let mut offsets = Vec::with_capacity(b.levels());
        for i in 0..b.levels() {
            let (above, below) = (b.above(i), b.below(i));
            offsets.push(LevelOffsets { above, below });
            let (k, l) = (b.k[i], b.l[i]);

            if k > 0 {
                let clique = above + l..above + l + k;
                let entry = spaces.entry(b.degrees_k[i] as u64 + 1).or_default();
                if k >= 2 {
                    entry.push(Component::Centering(clique.clone()));
                }
                if below > 0 {
                    let norm = ((k * below * (k + below)) as f64).sqrt();
                    entry.push(Component::Step(StepVector {
                        head: clique.clone(),
                        head_value: below as f64 / norm,
                        tail: clique.end..n,
                        tail_value: -(k as f64) / norm,
                    }));
                }
            }

            if l > 0 {
                let indep = above..above + l;
                let entry = spaces.entry(b.degrees_l[i] as u64).or_default();
                if l >= 2 {
                    entry.push(Component::Centering(indep.clone()));
                }
                let rest = k + below;
                if rest > 0 {
                    let norm = ((rest * l * (n - above)) as f64).sqrt();
                    entry.push(Component::Step(StepVector {
                        head: indep.clone(),
                        head_value: rest as f64 / norm,
                        tail: indep.end..n,
                        tail_value: -(l as f64) / norm,
                    }));
                }
            }
        }
        spaces
            .entry(0)
            .or_default()
            .push(Component::Step(StepVector {
                head: 0..n,
                head_value: 1.0 / (n as f64).sqrt(),
                tail: n..n,
                tail_value: 0.0,
            }));

        let eigenspaces = spaces
            .into_iter()
            .filter(|(_, c)| c.iter().any(|c| c.dimension() > 0))
            .map(|(eigenvalue, components)| Eigenspace {
                eigenvalue,
                components,
            })
            .collect();
        Ok(Self {
            n,
            eigenspaces,
            offsets,
        })
    }

    fn validate(&self, graph: &ThresholdGraph) -> Result<()> {
        let total: usize = self.eigenspaces.iter().map(Eigenspace::dimension).sum();
        if total != self.n {
            return Err(Error::Consistency(format!(
                "eigenspace dimensions sum to {total}, expected {}",
                self.n
            )));
        }
        let trace: u64 = self
            .eigenspaces
            .iter()
            .map(|e| e.eigenvalue * e.dimension() as u64)
            .sum();
        if trace != 2 * graph.edge_count() as u64 {
            return Err(Error::Consistency(format!(
                "eigenvalue sum {trace} differs from degree sum {}",
                2 * graph.edge_count()
            )));
        }
        let exhaustive = self.n <= DENSE_LIMIT;
        for space in &self.eigenspaces {
            let lambda = space.eigenvalue as f64;
            for comp in &space.components {
                let vectors: Vec<EigenVector> = match comp {
                    Component::Step(s) => vec![EigenVector::Step(s.clone())],
                    Component::Centering(r) if exhaustive => (1..r.len())
                        .map(|j| EigenVector::Difference { start: r.start, j })
                        .collect(),
                    Component::Centering(r) => {
                        let mut reps = vec![EigenVector::Difference {
                            start: r.start,
                            j: 1,
                        }];
                        if r.len() > 2 {
                            reps.push(EigenVector::Difference {
                                start: r.start,
                                j: r.len() - 1,
                            });
                        }
                        reps
                    }
                };
                for v in vectors {
                    let dense = v.to_dense(self.n);
                    let norm_sq: f64 = dense.iter().map(|x| x * x).sum();
                    let lv = graph.laplacian_apply(&dense);
                    let residual = lv
                        .iter()
                        .zip(&dense)
                        .fold(0.0, |m, (a, b)| f64::max(m, (a - lambda * b).abs()));
                    if residual > RESIDUAL_TOL || (norm_sq - 1.0).abs() > RESIDUAL_TOL {
                        return Err(Error::Consistency(format!(
                            "eigenvector {v:?} for eigenvalue {lambda}: residual {residual:e}, norm^2 {norm_sq}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Eigenspaces in increasing eigenvalue order.
    pub fn eigenspaces(&self) -> &[Eigenspace] {
        &self.eigenspaces
    }

    pub fn offsets(&self) -> &[LevelOffsets] {
        &self.offsets
    }

    pub fn spectrum(&self) -> Vec<SpectrumEntry> {
        self.eigenspaces
            .iter()
            .map(|e| SpectrumEntry {
                eigenvalue: e.eigenvalue,
                multiplicity: e.dimension(),
            })
            .collect()
    }

    /// Every eigenvalue repeated by multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<u64> {
        self.eigenspaces
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.dimension()))
            .collect()
    }

    pub fn eigenspace(&self, eigenvalue: u64) -> Result<&Eigenspace> {
        self.eigenspaces
            .binary_search_by_key(&eigenvalue, |e| e.eigenvalue)
            .map(|i| &self.eigenspaces[i])
            .map_err(|_| Error::UnknownEigenvalue { eigenvalue })
    }

    /// `E_lambda psi`.
    pub fn projector_apply(&self, eigenvalue: u64, psi: &[f64]) -> Result<Vec<f64>> {
        if psi.len() != self.n {
            return Err(Error::Argument(format!(
                "vector has length {}, expected {}",
                psi.len(),
                self.n
            )));
        }
        Ok(self.eigenspace(eigenvalue)?.apply(psi))
    }

    /// All eigenvectors as `(eigenvalue, dense vector)` rows.
    pub fn dense_vectors(&self) -> Vec<(u64, Vec<f64>)> {
        self.eigenspaces
            .iter()
            .flat_map(|e| e.vectors().map(move |v| (e.eigenvalue, v.to_dense(self.n))))
            .collect()
    }
}
