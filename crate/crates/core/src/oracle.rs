//! Brute-force reference implementations used to arbitrate every closed form.
//!
//! Everything here is dense and O(n^3); inputs are capped at
//! [`ORACLE_LIMIT`] vertices. Nothing in this module reads the block
//! structure of a graph: Laplacians are rebuilt from the raw edge rule
//! `X_u + X_w > theta`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::ThresholdGraph;

/// Largest dimension the dense oracle accepts.
pub const ORACLE_LIMIT: usize = 512;

const TAYLOR_DEGREE: usize = 18;
const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-13;

/// Row-major dense square-or-rectangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> DenseMatrix<T>
where
    T: Copy + Zero + One + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub type RealMatrix = DenseMatrix<f64>;
pub type ComplexMatrix = DenseMatrix<Complex64>;

impl RealMatrix {
    pub fn to_complex(&self) -> ComplexMatrix {
        self.map(|x| Complex64::new(x, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

impl ComplexMatrix {
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|x| x * s)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).norm()))
    }

    /// `max |(U* U - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n > ORACLE_LIMIT {
        Err(Error::DimensionOverflow {
            dim: n,
            limit: ORACLE_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Adjacency straight from the edge rule, original vertex labels.
pub fn raw_adjacency(x: &[f64], theta: f64) -> Vec<Vec<bool>> {
    let n = x.len();
    (0..n)
        .map(|u| (0..n).map(|w| u != w && x[u] + x[w] > theta).collect())
        .collect()
}

pub fn raw_edge_list(x: &[f64], theta: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..x.len() {
        for w in u + 1..x.len() {
            if x[u] + x[w] > theta {
                edges.push((u, w));
            }
        }
    }
    edges
}

/// Breadth-first connectivity test.
pub fn bfs_connected(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for w in 0..n {
            if adj[u][w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Dense Laplacian in canonical coordinates, built from the raw edge rule.
pub fn laplacian(graph: &ThresholdGraph) -> Result<RealMatrix> {
    let n = graph.n();
    check_dim(n)?;
    let x = graph.hidden_values();
    let theta = graph.theta();
    let adj = |p: usize, q: usize| p != q && x[graph.vertex_at(p)] + x[graph.vertex_at(q)] > theta;
    let mut lap = RealMatrix::from_fn(n, n, |p, q| if adj(p, q) { -1.0 } else { 0.0 });
    for p in 0..n {
        lap[(p, p)] = (0..n).filter(|&q| adj(p, q)).count() as f64;
    }
    Ok(lap)
}

/// `exp(scale * A)` by scaling and squaring of a degree-18 Taylor polynomial.
pub fn expm(a: &RealMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    check_dim(a.rows())?;
    expm_complex(&a.to_complex().scale(scale))
}

pub fn expm_complex(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = x.rows();
    check_dim(n)?;
    if x.cols() != n {
        return Err(Error::Argument("expm needs a square matrix".into()));
    }
    let norm = x.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = x.scale(Complex64::new(0.5f64.powi(squarings), 0.0));
    // Horner: I + Y(I + Y/2(I + Y/3(...)))
    let id = ComplexMatrix::identity(n);
    let mut p = id.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        let mut next = y.matmul(&p).scale(Complex64::new(1.0 / k as f64, 0.0));
        for i in 0..n {
            next[(i, i)] += Complex64::new(1.0, 0.0);
        }
        p = next;
    }
    for _ in 0..squarings {
        p = p.matmul(&p);
    }
    Ok(p)
}

/// Eigenvalues and orthonormal eigenvectors (as columns) of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

impl SymEigen {
    /// `V diag(f(lambda)) V^T`.
    pub fn synthesize(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let weights: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, w) in weights.iter().enumerate() {
                    acc += w * (self.vectors[(i, k)] * self.vectors[(j, k)]);
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Orthogonal projector onto the eigenvectors whose eigenvalue lies within
    /// `tol` of `lambda`.
    pub fn projector(&self, lambda: f64, tol: f64) -> RealMatrix {
        let n = self.values.len();
        let picked: Vec<usize> = (0..n)
            .filter(|&k| (self.values[k] - lambda).abs() <= tol)
            .collect();
        RealMatrix::from_fn(n, n, |i, j| {
            picked
                .iter()
                .map(|&k| self.vectors[(i, k)] * self.vectors[(j, k)])
                .sum()
        })
    }

    pub fn reconstruction_error(&self, a: &RealMatrix) -> f64 {
        let back = self.synthesize(|l| Complex64::new(l, 0.0));
        back.map(|z| z.re).max_abs_diff(a)
    }
}

/// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal Frobenius norm is
/// at most `1e-13 * ||A||_F`.
pub fn sym_eigen(a: &RealMatrix) -> Result<SymEigen> {
    let n = a.rows();
    check_dim(n)?;
    if a.cols() != n {
        return Err(Error::Argument("sym_eigen needs a square matrix".into()));
    }
    let asym = a.max_abs_diff(&a.transpose());
    let scale_ref = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0, |m, (i, j)| f64::max(m, a[(i, j)].abs()));
    if asym > 1e-12 * scale_ref.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let mut m = a.clone();
    let mut v = RealMatrix::identity(n);
    let frob = |m: &RealMatrix, off_only: bool| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if !off_only || i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let target = JACOBI_TOL * frob(&m, false).max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if frob(&m, true) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && frob(&m, true) > target {
        return Err(Error::Consistency(
            "Jacobi iteration did not converge".into(),
        ));
    }
    Ok(SymEigen {
        values: (0..n).map(|i| m[(i, i)]).collect(),
        vectors: v,
    })
}

/// `exp(scale * A)` through the eigendecomposition; the second, independent
/// oracle path.
pub fn expm_via_eigen(a: &RealMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    let eig = sym_eigen(a)?;
    Ok(eig.synthesize(|l| (scale * l).exp()))
}

/// Running trapezoidal mean of equally spaced vector samples.
#[derive(Debug, Clone)]
pub struct TrapezoidMean {
    sum: Vec<f64>,
    last: Option<Vec<f64>>,
    intervals: usize,
}

impl TrapezoidMean {
    pub fn new(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            last: None,
            intervals: 0,
        }
    }

    pub fn push(&mut self, sample: Vec<f64>) {
        if let Some(prev) = self.last.take() {
            for ((s, a), b) in self.sum.iter_mut().zip(&prev).zip(&sample) {
                *s += 0.5 * (a + b);
            }
            self.intervals += 1;
        }
        self.last = Some(sample);
    }

    pub fn mean(&self) -> Vec<f64> {
        match (self.intervals, &self.last) {
            (0, Some(only)) => only.clone(),
            (0, None) => self.sum.clone(),
            (k, _) => self.sum.iter().map(|s| s / k as f64).collect(),
        }
    }
}

/// Trapezoidal estimate of `(1/T) int_0^T P_t dt` for the quantum walk from
/// `start`, stepping the state with a single oracle `exp(i dt L)`.
pub fn numeric_time_average(
    graph: &ThresholdGraph,
    start: usize,
    horizon: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Argument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if steps < 1000 {
        return Err(Error::Argument(format!(
            "need at least 1000 steps, got {steps}"
        )));
    }
    graph.check_vertex(start)?;
    let lap = laplacian(graph)?;
    let dt = horizon / steps as f64;
    let step = expm(&lap, Complex64::new(0.0, dt))?;
    let n = graph.n();
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[start] = Complex64::new(1.0, 0.0);
    let mut acc = TrapezoidMean::new(n);
    acc.push(psi.iter().map(|z| z.norm_sqr()).collect());
    for _ in 0..steps {
        psi = step.matvec(&psi);
        acc.push(psi.iter().map(|z| z.norm_sqr()).collect());
    }
    Ok(acc.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{HiddenVariableConfig, ThresholdGraph};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = RealMatrix::zeros(4, 4);
        let e = expm(&z, c(0.0, 3.0)).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn expm_of_diagonal_is_entrywise() {
        let d = RealMatrix::from_fn(3, 3, |i, j| if i == j { [0.5, -2.0, 7.0][i] } else { 0.0 });
        let e = expm(&d, c(1.0, 0.0)).unwrap();
        for (i, v) in [0.5f64, -2.0, 7.0].into_iter().enumerate() {
            assert!((e[(i, i)] - c(v.exp(), 0.0)).norm() < 1e-12 * v.exp());
        }
        let e = expm(&d, c(0.0, 2.0)).unwrap();
        for (i, v) in [0.5f64, -2.0, 7.0].into_iter().enumerate() {
            assert!((e[(i, i)] - c(0.0, 2.0 * v).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn expm_single_edge_laplacian() {
        // L = [[1,-1],[-1,1]] has eigenvalues 0 and 2.
        let l = RealMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { -1.0 });
        for t in [0.3, 1.0, 17.5] {
            let u = expm(&l, c(0.0, t)).unwrap();
            let e2 = c(0.0, 2.0 * t).exp();
            let diag = (c(1.0, 0.0) + e2) * 0.5;
            let off = (c(1.0, 0.0) - e2) * 0.5;
            assert!((u[(0, 0)] - diag).norm() < 1e-13);
            assert!((u[(0, 1)] - off).norm() < 1e-13);
        }
    }

    #[test]
    fn oracle_size_limit() {
        let big = RealMatrix::zeros(ORACLE_LIMIT + 1, ORACLE_LIMIT + 1);
        assert!(matches!(
            expm(&big, c(0.0, 1.0)),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(matches!(
            sym_eigen(&big),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn sym_eigen_rejects_asymmetric() {
        let a = RealMatrix::from_fn(2, 2, |i, j| (i * 2 + j) as f64);
        assert!(matches!(sym_eigen(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn sym_eigen_diagonal_gives_identity_vectors() {
        let d = RealMatrix::from_fn(3, 3, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let e = sym_eigen(&d).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert!(e.vectors.max_abs_diff(&RealMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn complete_graph_spectrum() {
        let n = 6;
        let l = RealMatrix::from_fn(n, n, |i, j| if i == j { (n - 1) as f64 } else { -1.0 });
        let e = sym_eigen(&l).unwrap();
        assert!(e.reconstruction_error(&l) < 1e-10);
        let mut values = e.values.clone();
        values.sort_by(f64::total_cmp);
        assert!(values[0].abs() < 1e-12);
        for v in &values[1..] {
            assert!((v - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_five_vertex_spectrum() {
        let g = crate::graph::generate(&HiddenVariableConfig::explicit(
            vec![1.0, 1.0, 1.0, 0.0, 0.0],
            0.5,
        ))
        .unwrap();
        let l = laplacian(&g).unwrap();
        let mut e = sym_eigen(&l).unwrap();
        e.values.sort_by(f64::total_cmp);
        let want = [0.0, 3.0, 5.0, 5.0, 5.0];
        for (got, want) in e.values.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let trace: f64 = (0..5).map(|i| l[(i, i)]).sum();
        assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-9 * trace);
    }

    #[test]
    fn two_expm_paths_agree() {
        let g = ThresholdGraph::from_creation_sequence(&[0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 1]).unwrap();
        let l = laplacian(&g).unwrap();
        for t in [0.37, 3.0, 10.0] {
            let a = expm(&l, c(0.0, t)).unwrap();
            let b = expm_via_eigen(&l, c(0.0, t)).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10);
            assert!(a.unitarity_defect() < 1e-11);
        }
    }

    #[test]
    fn trapezoid_of_constant_is_constant() {
        let mut acc = TrapezoidMean::new(3);
        for _ in 0..1001 {
            acc.push(vec![0.2, 0.3, 0.5]);
        }
        let m = acc.mean();
        for (a, b) in m.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn numeric_average_argument_checks() {
        let g = ThresholdGraph::from_creation_sequence(&[1, 1, 1]).unwrap();
        assert!(numeric_time_average(&g, 0, 0.0, 1000).is_err());
        assert!(numeric_time_average(&g, 0, 10.0, 999).is_err());
        assert!(numeric_time_average(&g, 5, 10.0, 1000).is_err());
    }

    #[test]
    fn bfs_detects_isolated_vertex() {
        let x = [1.0, 2.0, -3.0, -4.0, 5.0, -6.0, 7.0, -8.0];
        assert!(!bfs_connected(&raw_adjacency(&x, 0.0)));
        assert!(bfs_connected(&raw_adjacency(&x[..7], 0.0)));
    }
}
