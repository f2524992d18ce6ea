//! Dense matrices and the matrix norms the graph metrics are built on:
//! entrywise p-norms, operator 1/∞ norms, spectral norm, and the exact
//! cut norm with witness sets.

use serde::{Deserialize, Serialize};

use crate::GraphsimError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GraphsimError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(GraphsimError::InvalidArgument("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Rearranges rows by `pi` and columns by `rho`:
    /// `out(pi[i], rho[j]) = self(i, j)`.
    pub fn permuted(&self, pi: &[usize], rho: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(pi[i], rho[j], self.get(i, j));
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// The matrix-norm family used by the alignment metrics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    /// `(Σ |A(i,j)|^p)^{1/p}`; `p = ∞` means max absolute entry.
    Entrywise(f64),
    /// Operator norm for p ∈ {1, ∞}: max column / row absolute sum.
    Operator(f64),
    /// Spectral norm (operator 2-norm).
    Spectral,
    Cut,
    Frobenius,
}

pub fn entrywise_norm(a: &Matrix, p: f64) -> Result<f64, GraphsimError> {
    if p < 1.0 {
        return Err(GraphsimError::InvalidArgument(format!(
            "entrywise norm needs p >= 1, got {p}"
        )));
    }
    if p.is_infinite() {
        return Ok(a.row_major().iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    if p == 1.0 {
        return Ok(a.row_major().iter().map(|x| x.abs()).sum());
    }
    if p == 2.0 {
        return Ok(a.row_major().iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    Ok(a.row_major()
        .iter()
        .map(|x| x.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p))
}

/// Operator p-norm for p ∈ {1, ∞}: max column sum / max row sum of
/// absolute values.
pub fn operator_norm(a: &Matrix, p: f64) -> Result<f64, GraphsimError> {
    if p == 1.0 {
        let mut best = 0.0f64;
        for j in 0..a.cols() {
            let s: f64 = (0..a.rows()).map(|i| a.get(i, j).abs()).sum();
            best = best.max(s);
        }
        Ok(best)
    } else if p.is_infinite() {
        let mut best = 0.0f64;
        for i in 0..a.rows() {
            let s: f64 = (0..a.cols()).map(|j| a.get(i, j).abs()).sum();
            best = best.max(s);
        }
        Ok(best)
    } else {
        Err(GraphsimError::InvalidArgument(format!(
            "operator norm only for p in {{1, inf}}, got {p}"
        )))
    }
}

/// Largest absolute eigenvalue of a symmetric matrix by power iteration
/// on `A·A` (deterministic all-ones start, cap 10^4 iterations).
pub fn spectral_norm(a: &Matrix, tol: f64) -> Result<f64, GraphsimError> {
    assert!(a.is_symmetric(), "spectral_norm expects a symmetric matrix");
    let n = a.rows();
    if n == 0 {
        return Ok(0.0);
    }
    if a.row_major().iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let a2 = a.matmul(a);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                w[i] += a2.get(i, j) * v[j];
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        for x in &mut w {
            *x /= norm;
        }
        let next = norm; // Rayleigh quotient of the unit iterate
        let converged = (next.sqrt() - lambda.sqrt().max(0.0)).abs() <= tol && lambda > 0.0;
        lambda = next;
        v = w;
        if converged {
            return Ok(lambda.sqrt());
        }
    }
    Err(GraphsimError::NoConvergence {
        what: "spectral norm power iteration".into(),
        best: lambda.sqrt(),
    })
}

/// Exact cut norm with a maximizing pair of index sets.
#[derive(Clone, Debug, PartialEq)]
pub struct CutWitness {
    pub value: f64,
    pub row_set: Vec<usize>,
    pub col_set: Vec<usize>,
}

/// Exact cut norm `max_{S,T} |Σ_{i∈S,j∈T} A(i,j)|` by enumerating column
/// subsets and choosing the optimal row set greedily per sign. Ties are
/// broken toward the lexicographically smallest (S, T) encoding.
pub fn cut_norm_exact(a: &Matrix) -> Result<CutWitness, GraphsimError> {
    let (r, c) = (a.rows(), a.cols());
    // Enumerate over the smaller side.
    if c > r {
        let w = cut_norm_exact(&a.transpose())?;
        return Ok(CutWitness {
            value: w.value,
            row_set: w.col_set,
            col_set: w.row_set,
        });
    }
    if c > 24 {
        return Err(GraphsimError::BudgetExceeded(format!(
            "cut norm enumeration over {c} columns exceeds the 2^24 budget"
        )));
    }
    if r == 0 || c == 0 {
        return Ok(CutWitness {
            value: 0.0,
            row_set: vec![],
            col_set: vec![],
        });
    }
    let mut best = CutWitness {
        value: -1.0,
        row_set: vec![],
        col_set: vec![],
    };
    let mut row_sums = vec![0.0f64; r];
    // Gray-code walk so each subset update touches one column.
    let mut prev: u32 = 0;
    for t in 0u32..(1u32 << c) {
        let gray = t ^ (t >> 1);
        let diff = gray ^ prev;
        if diff != 0 {
            let j = diff.trailing_zeros() as usize;
            let sign = if gray & diff != 0 { 1.0 } else { -1.0 };
            for i in 0..r {
                row_sums[i] += sign * a.get(i, j);
            }
        }
        prev = gray;
        for sign in [1.0f64, -1.0] {
            let total: f64 = row_sums.iter().map(|&s| (sign * s).max(0.0)).sum();
            if total > best.value - 1e-12 {
                let row_set: Vec<usize> = (0..r).filter(|&i| sign * row_sums[i] > 0.0).collect();
                let col_set: Vec<usize> = (0..c).filter(|&j| gray >> j & 1 == 1).collect();
                let better = total > best.value + 1e-12
                    || (best.value < 0.0
                        || (total - best.value).abs() <= 1e-12
                            && (&row_set, &col_set) < (&best.row_set, &best.col_set));
                if better {
                    best = CutWitness {
                        value: total,
                        row_set,
                        col_set,
                    };
                }
            }
        }
    }
    Ok(best)
}

/// Tensor blow-up `A^{⊙ℓ}`: entry `((i,j),(i',j')) = A(i,i')`, indices
/// i-major, matching `Graph::blow_up`.
pub fn tensor_blow_up(a: &Matrix, l: usize) -> Result<Matrix, GraphsimError> {
    if l == 0 {
        return Err(GraphsimError::InvalidArgument("blow-up factor 0".into()));
    }
    let (r, c) = (a.rows(), a.cols());
    let mut out = Matrix::zeros(r * l, c * l);
    for i in 0..r {
        for ip in 0..c {
            let v = a.get(i, ip);
            if v == 0.0 {
                continue;
            }
            for j in 0..l {
                for jp in 0..l {
                    out.set(i * l + j, ip * l + jp, v);
                }
            }
        }
    }
    Ok(out)
}

pub fn norm(a: &Matrix, kind: NormKind, tol: f64) -> Result<f64, GraphsimError> {
    match kind {
        NormKind::Entrywise(p) => entrywise_norm(a, p),
        NormKind::Frobenius => entrywise_norm(a, 2.0),
        NormKind::Operator(p) => operator_norm(a, p),
        NormKind::Spectral => spectral_norm(a, tol),
        NormKind::Cut => Ok(cut_norm_exact(a)?.value),
    }
}
