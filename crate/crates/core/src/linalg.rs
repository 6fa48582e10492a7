//! Dense symmetric matrices, the symmetric eigendecomposition and a Cholesky
//! factorization that reports the failing pivot.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative asymmetry above which ingestion logs a warning before symmetrizing.
const ASYMMETRY_WARN: f64 = 1e-12;

/// A real symmetric matrix stored as a full square.
///
/// `entries(i,j) == entries(j,i)` holds bit for bit; every constructor
/// symmetrizes its input.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Wraps a square matrix, replacing it by `(M + Mᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!(
                "symmetric matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::Input("symmetric matrix must have dim >= 1".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix entries"));
        }
        let norm = m.norm();
        let asym = (&m - m.transpose()).amax();
        if asym > ASYMMETRY_WARN * norm.max(f64::MIN_POSITIVE) {
            log::warn!("input matrix asymmetric by {asym:e} (norm {norm:e}); symmetrizing");
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without validation. Callers guarantee a finite square input.
    pub(crate) fn symmetrized(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Frobenius inner product `trace(AᵀB)`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Column-major entries; equal to row-major because of symmetry.
    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

/// `M = U·Diag(λ)·Uᵀ` with `λ` sorted in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U·Diag(f(λ))·Uᵀ`, touching only the columns where `f(λ) != 0`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let keep: Vec<(usize, f64)> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, f(l)))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        if keep.is_empty() {
            return SymMatrix::zeros(n);
        }
        let mut left = DMatrix::zeros(n, keep.len());
        let mut right = DMatrix::zeros(n, keep.len());
        for (k, &(i, v)) in keep.iter().enumerate() {
            let col = self.eigenvectors.column(i);
            left.set_column(k, &(col * v));
            right.set_column(k, &col);
        }
        SymMatrix::symmetrized(left * right.transpose())
    }
}

/// Symmetric eigendecomposition, eigenvalues descending.
///
/// Each eigenvector is sign-normalized so that its largest-magnitude entry
/// is positive (first such entry on ties), which makes the output
/// reproducible across calls.
pub fn eig_sym(m: &SymMatrix) -> Result<SpectralDecomp> {
    let n = m.dim();
    let a = m.as_matrix();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eig_sym input"));
    }
    if n == 1 {
        return Ok(SpectralDecomp {
            eigenvalues: DVector::from_element(1, a[(0, 0)]),
            eigenvectors: DMatrix::identity(1, 1),
        });
    }
    let max_abs = a.amax();
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or(Error::EigenFailure { dim: n, max_abs })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut values = DVector::zeros(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        values[k] = eig.eigenvalues[i];
        let col = eig.eigenvectors.column(i);
        let mut best = 0;
        for r in 1..n {
            if col[r].abs() > col[best].abs() {
                best = r;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(k, &(col * sign));
    }
    Ok(SpectralDecomp {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Lower-triangular Cholesky factor `L` of an SPD matrix, `M = L·Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DMatrix<f64>,
}

impl Cholesky {
    /// Factorizes `m`. A pivot below `rel_tol · max_diag` is reported as rank
    /// deficiency with its index.
    pub fn factor(m: &DMatrix<f64>, rel_tol: f64) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::Shape("Cholesky input must be square".into()));
        }
        let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
        let floor = rel_tol * scale.max(f64::MIN_POSITIVE);
        let mut l = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > floor) {
                return Err(Error::RankDeficient { pivot: j, value: d });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solves `M x = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= self.l[(i, k)] * rhs[k];
            }
            rhs[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * rhs[k];
            }
            rhs[i] = s / self.l[(i, i)];
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
