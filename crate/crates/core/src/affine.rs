//! Sparse affine maps `x ↦ (⟨A_i, x⟩)_i` with right-hand side `b`, the
//! factorization of `AAᵀ`, and the projection onto `{x : Ax = b}`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::cones::{BlockPoint, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, Cholesky};

/// One constraint row: sorted, deduplicated flat indices with coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
}

impl SparseRow {
    /// Builds a row from unsorted entries; duplicates are summed and zeros
    /// dropped.
    pub fn from_entries(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut row = SparseRow::default();
        for (i, v) in entries {
            if row.idx.last() == Some(&i) {
                *row.val.last_mut().unwrap() += v;
            } else {
                row.idx.push(i);
                row.val.push(v);
            }
        }
        let (idx, val) = row
            .idx
            .into_iter()
            .zip(row.val)
            .filter(|&(_, v)| v != 0.0)
            .unzip();
        SparseRow { idx, val }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.idx
            .iter()
            .zip(&self.val)
            .map(|(&i, &v)| v * x[i])
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.val.iter().map(|v| v * v).sum()
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }
}

/// Accumulates the entries of a row using block coordinates.
#[derive(Debug, Clone)]
pub struct RowBuilder<'a> {
    cone: &'a ConeSpec,
    entries: Vec<(usize, f64)>,
}

impl<'a> RowBuilder<'a> {
    pub fn new(cone: &'a ConeSpec) -> Self {
        RowBuilder {
            cone,
            entries: Vec::new(),
        }
    }

    /// Adds `v` at `(i, j)` and `(j, i)` of PSD block `block` (once when `i == j`).
    pub fn sym(mut self, block: usize, i: usize, j: usize, v: f64) -> Self {
        self.push_sym(block, i, j, v);
        self
    }

    pub fn push_sym(&mut self, block: usize, i: usize, j: usize, v: f64) {
        self.entries.push((self.cone.psd_index(block, i, j), v));
        if i != j {
            self.entries.push((self.cone.psd_index(block, j, i), v));
        }
    }

    pub fn push_soc(&mut self, block: usize, i: usize, v: f64) {
        self.entries.push((self.cone.soc_offset(block) + i, v));
    }

    pub fn push_nonneg(&mut self, i: usize, v: f64) {
        self.entries.push((self.cone.nonneg_offset() + i, v));
    }

    pub fn build(self) -> SparseRow {
        SparseRow::from_entries(self.entries)
    }
}

/// `A: ℝ^ambient → ℝ^m` given by sparse rows, together with `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    dim: usize,
    rows: Vec<SparseRow>,
    pub rhs: Vec<f64>,
}

impl AffineMap {
    pub fn new(dim: usize) -> Self {
        AffineMap {
            dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn from_rows(dim: usize, rows: Vec<SparseRow>, rhs: Vec<f64>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::Shape(format!(
                "{} rows but right-hand side of length {}",
                rows.len(),
                rhs.len()
            )));
        }
        let mut a = AffineMap::new(dim);
        for (r, b) in rows.into_iter().zip(rhs) {
            a.push_row(r, b)?;
        }
        Ok(a)
    }

    pub fn push_row(&mut self, row: SparseRow, rhs: f64) -> Result<()> {
        if row.idx.last().is_some_and(|&i| i >= self.dim) {
            return Err(Error::Shape(format!(
                "row index {} out of range for ambient dimension {}",
                row.idx.last().unwrap(),
                self.dim
            )));
        }
        if !rhs.is_finite() || row.val.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("affine row"));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    /// Checks that rows fit the cone and that PSD-block coefficients are
    /// symmetric, so that `Aᵀy` is always a symmetric matrix.
    pub fn validate(&self, cone: &ConeSpec) -> Result<()> {
        if self.dim != cone.ambient_dim() {
            return Err(Error::Shape(format!(
                "affine map acts on dimension {}, cone ambient dimension is {}",
                self.dim,
                cone.ambient_dim()
            )));
        }
        for (r, row) in self.rows.iter().enumerate() {
            let lookup: HashMap<usize, f64> = row
                .idx
                .iter()
                .copied()
                .zip(row.val.iter().copied())
                .collect();
            for (&flat, &v) in row.idx.iter().zip(&row.val) {
                if let Some((k, i, j)) = locate_psd(cone, flat) {
                    let mirror = cone.psd_index(k, j, i);
                    if lookup.get(&mirror).copied().unwrap_or(0.0) != v {
                        return Err(Error::Input(format!(
                            "row {r} is not symmetric in PSD block {k} at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &BlockPoint) -> Vec<f64> {
        self.rows.iter().map(|r| r.dot(&x.data)).collect()
    }

    /// `Ax − b`
    pub fn residual(&self, x: &BlockPoint) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| r.dot(&x.data) - b)
            .collect()
    }

    /// `out += scale · Aᵀy`
    pub fn adjoint_add(&self, y: &[f64], scale: f64, out: &mut BlockPoint) {
        for (row, &yi) in self.rows.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            let s = scale * yi;
            for (&i, &v) in row.idx.iter().zip(&row.val) {
                out.data[i] += s * v;
            }
        }
    }

    pub fn adjoint(&self, y: &[f64]) -> BlockPoint {
        let mut out = BlockPoint {
            data: vec![0.0; self.dim],
        };
        self.adjoint_add(y, 1.0, &mut out);
        out
    }

    /// Largest singular value squared, `λ_max(AAᵀ)`, by power iteration.
    pub fn spectral_norm_sq(&self, iters: usize) -> f64 {
        let m = self.nrows();
        if m == 0 {
            return 0.0;
        }
        let mut v = vec![1.0 / (m as f64).sqrt(); m];
        let mut lam = 0.0;
        for _ in 0..iters {
            let w = self.apply(&self.adjoint(&v));
            let nw = linalg::norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            lam = linalg::dot(&v, &w);
            v = w.iter().map(|x| x / nw).collect();
        }
        lam
    }

    /// Sparse entries of `AAᵀ` above the diagonal, plus the diagonal.
    fn gram_entries(&self) -> (Vec<f64>, HashMap<(usize, usize), f64>) {
        let diag: Vec<f64> = self.rows.iter().map(SparseRow::norm_sq).collect();
        let mut cols: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (&i, &v) in row.idx.iter().zip(&row.val) {
                cols.entry(i).or_default().push((r, v));
            }
        }
        let mut off: HashMap<(usize, usize), f64> = HashMap::new();
        for list in cols.values() {
            for (a, &(ra, va)) in list.iter().enumerate() {
                for &(rb, vb) in &list[a + 1..] {
                    let key = (ra.min(rb), ra.max(rb));
                    *off.entry(key).or_insert(0.0) += va * vb;
                }
            }
        }
        off.retain(|_, v| *v != 0.0);
        (diag, off)
    }
}

fn locate_psd(cone: &ConeSpec, flat: usize) -> Option<(usize, usize, usize)> {
    let mut off = 0;
    for (k, &d) in cone.psd.iter().enumerate() {
        if flat < off + d * d {
            let r = flat - off;
            return Some((k, r / d, r % d));
        }
        off += d * d;
    }
    None
}

/// Factorization of `AAᵀ`, computed once per constraint matrix.
#[derive(Debug, Clone)]
pub enum GramFactor {
    /// `AAᵀ` is exactly diagonal (pairwise disjoint or orthogonal rows).
    Diagonal(Vec<f64>),
    Dense(Cholesky),
}

impl GramFactor {
    pub fn is_diagonal(&self) -> bool {
        matches!(self, GramFactor::Diagonal(_))
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        match self {
            GramFactor::Diagonal(d) => Some(d),
            GramFactor::Dense(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GramFactor::Diagonal(d) => d.len(),
            GramFactor::Dense(c) => c.dim(),
        }
    }

    /// Solves `AAᵀ w = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        match self {
            GramFactor::Diagonal(d) => {
                for (r, di) in rhs.iter_mut().zip(d) {
                    *r /= di;
                }
            }
            GramFactor::Dense(c) => c.solve_in_place(rhs),
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = rhs.to_vec();
        self.solve_in_place(&mut out);
        out
    }
}

/// Relative pivot floor for the dense factorization.
const PIVOT_TOL: f64 = 1e-12;

/// Factorizes `AAᵀ`, taking the diagonal path when every off-diagonal
/// entry is exactly zero.
pub fn gram_factorize(a: &AffineMap) -> Result<GramFactor> {
    if a.is_empty() {
        return Err(Error::Input(
            "cannot factorize an empty constraint set".into(),
        ));
    }
    let (diag, off) = a.gram_entries();
    if off.is_empty() {
        let scale = diag.iter().copied().fold(0.0, f64::max);
        if let Some(p) = diag.iter().position(|&d| !(d > PIVOT_TOL * scale)) {
            return Err(Error::RankDeficient {
                pivot: p,
                value: diag[p],
            });
        }
        return Ok(GramFactor::Diagonal(diag));
    }
    let m = a.nrows();
    let mut g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    for (&(i, j), &v) in &off {
        g[(i, j)] = v;
        g[(j, i)] = v;
    }
    debug_assert_eq!(g.nrows(), m);
    Ok(GramFactor::Dense(Cholesky::factor(&g, PIVOT_TOL)?))
}

/// Projection onto `{x : Ax = b}`: `x − Aᵀ(AAᵀ)⁻¹(Ax − b)`.
pub fn project_affine(a: &AffineMap, x: &BlockPoint, gram: &GramFactor) -> Result<BlockPoint> {
    if x.len() != a.dim() {
        return Err(Error::Shape(format!(
            "point has length {}, affine map acts on {}",
            x.len(),
            a.dim()
        )));
    }
    if gram.dim() != a.nrows() {
        return Err(Error::Shape(
            "Gram factorization does not match the affine map".into(),
        ));
    }
    let mut w = a.residual(x);
    gram.solve_in_place(&mut w);
    let mut out = x.clone();
    a.adjoint_add(&w, -1.0, &mut out);
    Ok(out)
}
