//! Product cones `K = S⁺_{n₁} × … × L_{m₁} × … × ℝ₊^p`, points of their
//! ambient space, and the Euclidean projections onto `K` and its polar.
//!
//! Points are stored flat: every PSD block as a full `d×d` square (row-major,
//! which equals column-major by symmetry), then the second-order blocks, then
//! the nonnegative orthant. With this layout the plain Euclidean inner
//! product of the flat vectors is the Frobenius/Euclidean product of the
//! blocks.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_sym, SpectralDecomp, SymMatrix};

/// Shape of a product cone.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConeSpec {
    #[serde(default)]
    pub psd: Vec<usize>,
    #[serde(default)]
    pub soc: Vec<usize>,
    #[serde(default)]
    pub nonneg: usize,
}

impl ConeSpec {
    pub fn new(psd: Vec<usize>, soc: Vec<usize>, nonneg: usize) -> Result<Self> {
        let k = ConeSpec { psd, soc, nonneg };
        k.validate()?;
        Ok(k)
    }

    pub fn psd(dim: usize) -> Self {
        ConeSpec {
            psd: vec![dim],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.psd.contains(&0) || self.soc.contains(&0) {
            return Err(Error::Input("cone blocks must have dimension >= 1".into()));
        }
        if self.ambient_dim() == 0 {
            return Err(Error::Input("cone has zero ambient dimension".into()));
        }
        Ok(())
    }

    /// Length of the flat storage vector.
    pub fn ambient_dim(&self) -> usize {
        self.psd.iter().map(|d| d * d).sum::<usize>() + self.soc.iter().sum::<usize>() + self.nonneg
    }

    /// Dimension of the underlying real vector space (packed triangles).
    pub fn vector_space_dim(&self) -> usize {
        self.psd.iter().map(|d| d * (d + 1) / 2).sum::<usize>()
            + self.soc.iter().sum::<usize>()
            + self.nonneg
    }

    pub fn psd_offset(&self, block: usize) -> usize {
        self.psd[..block].iter().map(|d| d * d).sum()
    }

    pub fn soc_offset(&self, block: usize) -> usize {
        self.psd.iter().map(|d| d * d).sum::<usize>() + self.soc[..block].iter().sum::<usize>()
    }

    pub fn nonneg_offset(&self) -> usize {
        self.ambient_dim() - self.nonneg
    }

    /// Flat index of entry `(i, j)` of PSD block `block`.
    pub fn psd_index(&self, block: usize, i: usize, j: usize) -> usize {
        self.psd_offset(block) + i * self.psd[block] + j
    }

    fn check(&self, x: &BlockPoint) -> Result<()> {
        if x.data.len() != self.ambient_dim() {
            return Err(Error::Shape(format!(
                "point has length {}, cone ambient dimension is {}",
                x.data.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }
}

/// One block of a [`BlockPoint`].
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Psd(SymMatrix),
    Soc(Vec<f64>),
    Nonneg(Vec<f64>),
}

/// An element of the ambient space of a [`ConeSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPoint {
    pub data: Vec<f64>,
}

impl BlockPoint {
    pub fn zeros(cone: &ConeSpec) -> Self {
        BlockPoint {
            data: vec![0.0; cone.ambient_dim()],
        }
    }

    pub fn from_vec(cone: &ConeSpec, data: Vec<f64>) -> Result<Self> {
        let p = BlockPoint { data };
        cone.check(&p)?;
        Ok(p)
    }

    /// Assembles a point from blocks listed in cone order (PSD, SOC, orthant).
    pub fn from_blocks(cone: &ConeSpec, blocks: Vec<Block>) -> Result<Self> {
        let expected = cone.psd.len() + cone.soc.len() + usize::from(cone.nonneg > 0);
        if blocks.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} blocks, got {}",
                blocks.len()
            )));
        }
        let mut data = Vec::with_capacity(cone.ambient_dim());
        let mut it = blocks.into_iter();
        for &d in &cone.psd {
            match it.next() {
                Some(Block::Psd(m)) if m.dim() == d => data.extend_from_slice(m.as_slice()),
                other => {
                    return Err(Error::Shape(format!(
                        "expected PSD block of dim {d}, got {other:?}"
                    )))
                }
            }
        }
        for &d in &cone.soc {
            match it.next() {
                Some(Block::Soc(v)) if v.len() == d => data.extend(v),
                other => {
                    return Err(Error::Shape(format!(
                        "expected SOC block of dim {d}, got {other:?}"
                    )))
                }
            }
        }
        if cone.nonneg > 0 {
            match it.next() {
                Some(Block::Nonneg(v)) if v.len() == cone.nonneg => data.extend(v),
                other => {
                    return Err(Error::Shape(format!(
                        "expected orthant block of dim {}, got {other:?}",
                        cone.nonneg
                    )))
                }
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("block point"));
        }
        Ok(BlockPoint { data })
    }

    pub fn from_sym(m: &SymMatrix) -> Self {
        BlockPoint {
            data: m.as_slice().to_vec(),
        }
    }

    pub fn blocks(&self, cone: &ConeSpec) -> Vec<Block> {
        let mut out = Vec::new();
        for k in 0..cone.psd.len() {
            out.push(Block::Psd(self.psd_block(cone, k)));
        }
        for (k, &d) in cone.soc.iter().enumerate() {
            let o = cone.soc_offset(k);
            out.push(Block::Soc(self.data[o..o + d].to_vec()));
        }
        if cone.nonneg > 0 {
            out.push(Block::Nonneg(self.data[cone.nonneg_offset()..].to_vec()));
        }
        out
    }

    pub fn psd_block(&self, cone: &ConeSpec, k: usize) -> SymMatrix {
        let d = cone.psd[k];
        let o = cone.psd_offset(k);
        SymMatrix::symmetrized(DMatrix::from_column_slice(d, d, &self.data[o..o + d * d]))
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dot(&self, other: &BlockPoint) -> f64 {
        linalg::dot(&self.data, &other.data)
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.data)
    }

    pub fn sub(&self, other: &BlockPoint) -> BlockPoint {
        BlockPoint {
            data: linalg::sub(&self.data, &other.data),
        }
    }

    pub fn add(&self, other: &BlockPoint) -> BlockPoint {
        BlockPoint {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> BlockPoint {
        BlockPoint {
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &BlockPoint) {
        linalg::axpy(alpha, &x.data, &mut self.data);
    }
}

/// Projection onto the PSD cone through the spectral decomposition.
pub fn project_psd(c: &SymMatrix) -> Result<(SymMatrix, SpectralDecomp)> {
    let dec = eig_sym(c)?;
    let x = psd_part(c, &dec);
    Ok((x, dec))
}

/// `U·Diag(max(λ,0))·Uᵀ`, assembled from whichever side of the spectrum is
/// smaller.
fn psd_part(c: &SymMatrix, dec: &SpectralDecomp) -> SymMatrix {
    let n = dec.dim();
    let positive = dec.eigenvalues.iter().filter(|&&l| l > 0.0).count();
    if positive == n {
        return c.clone();
    }
    if 2 * positive <= n {
        dec.reconstruct(|l| l.max(0.0))
    } else {
        let neg = dec.reconstruct(|l| l.min(0.0));
        SymMatrix::symmetrized(c.as_matrix() - neg.as_matrix())
    }
}

/// Projection onto the second-order cone `{(u, t) : ‖u‖ ≤ t}` (`t` last).
pub fn project_soc(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::Input("SOC block must have dim >= 1".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("SOC projection input"));
    }
    let mut out = x.to_vec();
    project_soc_in_place(&mut out);
    Ok(out)
}

fn project_soc_in_place(x: &mut [f64]) {
    let n = x.len();
    if n == 1 {
        x[0] = x[0].max(0.0);
        return;
    }
    let t = x[n - 1];
    let nu = linalg::norm(&x[..n - 1]);
    if nu <= t {
        return;
    }
    if nu <= -t {
        x.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let s = 0.5 * (nu + t);
    for v in &mut x[..n - 1] {
        *v *= s / nu;
    }
    x[n - 1] = s;
}

/// Projection onto `K`, block by block.
pub fn project_cone(cone: &ConeSpec, x: &BlockPoint) -> Result<BlockPoint> {
    Ok(project_cone_with_jacobian(cone, x)?.0)
}

/// Projection onto the polar cone, `x − P_K(x)`.
pub fn project_polar(cone: &ConeSpec, x: &BlockPoint) -> Result<BlockPoint> {
    let p = project_cone(cone, x)?;
    Ok(x.sub(&p))
}

/// Moreau decomposition `x = P_K(x) + P_{K°}(x)`.
pub fn moreau(cone: &ConeSpec, x: &BlockPoint) -> Result<(BlockPoint, BlockPoint)> {
    let p = project_cone(cone, x)?;
    let q = x.sub(&p);
    Ok((p, q))
}

/// Projects onto `K` and keeps what is needed to apply an element of the
/// Clarke generalized Jacobian of the projection at `x`.
pub fn project_cone_with_jacobian(
    cone: &ConeSpec,
    x: &BlockPoint,
) -> Result<(BlockPoint, ProjectionJacobian)> {
    cone.check(x)?;
    if x.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cone projection input"));
    }
    let mut out = x.clone();
    let mut psd = Vec::with_capacity(cone.psd.len());
    for (k, &d) in cone.psd.iter().enumerate() {
        let o = cone.psd_offset(k);
        if d == 1 {
            out.data[o] = x.data[o].max(0.0);
            psd.push(SpectralDecomp {
                eigenvalues: nalgebra::DVector::from_element(1, x.data[o]),
                eigenvectors: DMatrix::identity(1, 1),
            });
            continue;
        }
        let block = x.psd_block(cone, k);
        let (proj, dec) = project_psd(&block)?;
        out.data[o..o + d * d].copy_from_slice(proj.as_slice());
        psd.push(dec);
    }
    for (k, &d) in cone.soc.iter().enumerate() {
        let o = cone.soc_offset(k);
        project_soc_in_place(&mut out.data[o..o + d]);
    }
    let o = cone.nonneg_offset();
    for v in &mut out.data[o..] {
        *v = v.max(0.0);
    }
    let jac = ProjectionJacobian {
        cone: cone.clone(),
        at: x.clone(),
        psd,
        tie_tol: 0.0,
    };
    Ok((out, jac))
}

/// One element of `∂_c P_K(x)`, applied blockwise.
///
/// PSD blocks use `V·(Ω ∘ (VᵀHV))·Vᵀ` with eigenvalues `> tie_tol` in the
/// active set α and the rest in β: `Ω = 1` on α×α, `0` on β×β and
/// `λᵢ/(λᵢ − λⱼ)` on α×β.
#[derive(Debug, Clone)]
pub struct ProjectionJacobian {
    cone: ConeSpec,
    at: BlockPoint,
    psd: Vec<SpectralDecomp>,
    tie_tol: f64,
}

impl ProjectionJacobian {
    /// Eigenvalues with `λ ≤ tol` are treated as inactive.
    pub fn with_tie_tolerance(mut self, tol: f64) -> Self {
        self.tie_tol = tol.max(0.0);
        self
    }

    pub fn decompositions(&self) -> &[SpectralDecomp] {
        &self.psd
    }

    /// Smallest `|λ|` over all PSD blocks; zero means the Jacobian is taken
    /// at a nondifferentiable point.
    pub fn spectral_gap(&self) -> f64 {
        self.psd
            .iter()
            .flat_map(|d| d.eigenvalues.iter().map(|l| l.abs()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨a, J a⟩` for a sparse direction `a` given by flat indices and values.
    ///
    /// PSD blocks cost `O(nnz·d²)` instead of the `O(d³)` of a full
    /// [`apply`](Self::apply).
    pub fn quadratic_form(&self, idx: &[usize], val: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut pos = 0;
        for (k, dec) in self.psd.iter().enumerate() {
            let d = self.cone.psd[k];
            let end = self.cone.psd_offset(k) + d * d;
            let start = pos;
            while pos < idx.len() && idx[pos] < end {
                pos += 1;
            }
            if start == pos {
                continue;
            }
            let o = self.cone.psd_offset(k);
            let lam = &dec.eigenvalues;
            let active = lam.iter().filter(|&&l| l > self.tie_tol).count();
            if active == 0 {
                continue;
            }
            let v = &dec.eigenvectors;
            // W = Vᵀ A V = Σ a_ij · v_i v_jᵀ with v_i the i-th row of V.
            let mut w = DMatrix::<f64>::zeros(d, d);
            for (&flat, &a) in idx[start..pos].iter().zip(&val[start..pos]) {
                let (i, j) = ((flat - o) / d, (flat - o) % d);
                let vi = v.row(i);
                let vj = v.row(j);
                w += vi.transpose() * vj * a;
            }
            for a in 0..d {
                for b in 0..d {
                    let om = omega(lam, active, a, b);
                    if om != 0.0 {
                        total += om * w[(a, b)] * w[(a, b)];
                    }
                }
            }
        }
        if pos < idx.len() {
            let mut h = vec![0.0; self.at.len()];
            for (&i, &v) in idx[pos..].iter().zip(&val[pos..]) {
                h[i] = v;
            }
            let mut jh = h.clone();
            for (k, &d) in self.cone.soc.iter().enumerate() {
                let o = self.cone.soc_offset(k);
                soc_jacobian_apply(&self.at.data[o..o + d], &mut jh[o..o + d]);
            }
            let o = self.cone.nonneg_offset();
            for (v, a) in jh[o..].iter_mut().zip(&self.at.data[o..]) {
                if *a <= 0.0 {
                    *v = 0.0;
                }
            }
            total += linalg::dot(&h, &jh);
        }
        total
    }

    pub fn apply(&self, h: &BlockPoint) -> Result<BlockPoint> {
        self.cone.check(h)?;
        let mut out = h.clone();
        for (k, dec) in self.psd.iter().enumerate() {
            let d = self.cone.psd[k];
            let o = self.cone.psd_offset(k);
            let hb = h.psd_block(&self.cone, k);
            let r = psd_jacobian_apply_tol(dec, &hb, self.tie_tol)?;
            out.data[o..o + d * d].copy_from_slice(r.as_slice());
        }
        for (k, &d) in self.cone.soc.iter().enumerate() {
            let o = self.cone.soc_offset(k);
            soc_jacobian_apply(&self.at.data[o..o + d], &mut out.data[o..o + d]);
        }
        let o = self.cone.nonneg_offset();
        for (v, a) in out.data[o..].iter_mut().zip(&self.at.data[o..]) {
            if *a <= 0.0 {
                *v = 0.0;
            }
        }
        Ok(out)
    }
}

/// Applies the generalized Jacobian element of the PSD projection taken at
/// the matrix whose decomposition is `dec` to the direction `h`.
pub fn psd_jacobian_apply(dec: &SpectralDecomp, h: &SymMatrix) -> Result<SymMatrix> {
    psd_jacobian_apply_tol(dec, h, 0.0)
}

fn psd_jacobian_apply_tol(dec: &SpectralDecomp, h: &SymMatrix, tie_tol: f64) -> Result<SymMatrix> {
    let n = dec.dim();
    if h.dim() != n {
        return Err(Error::Shape(format!(
            "Jacobian direction has dim {}, decomposition has dim {n}",
            h.dim()
        )));
    }
    let lam = &dec.eigenvalues;
    let active = lam.iter().filter(|&&l| l > tie_tol).count();
    if active == n {
        return Ok(h.clone());
    }
    if active == 0 {
        return Ok(SymMatrix::zeros(n));
    }
    let v = &dec.eigenvectors;
    let mut w = v.transpose() * h.as_matrix() * v;
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] *= omega(lam, active, i, j);
        }
    }
    Ok(SymMatrix::symmetrized(v * w * v.transpose()))
}

/// Eigenvalues are sorted descending, so α is the leading index range
/// `0..active`.
fn omega(lam: &nalgebra::DVector<f64>, active: usize, i: usize, j: usize) -> f64 {
    match (i < active, j < active) {
        (true, true) => 1.0,
        (false, false) => 0.0,
        (true, false) => lam[i] / (lam[i] - lam[j]),
        (false, true) => lam[j] / (lam[j] - lam[i]),
    }
}

/// Jacobian of the SOC projection at `x`, applied in place to `h`.
fn soc_jacobian_apply(x: &[f64], h: &mut [f64]) {
    let n = x.len();
    if n == 1 {
        if x[0] <= 0.0 {
            h[0] = 0.0;
        }
        return;
    }
    let t = x[n - 1];
    let nu = linalg::norm(&x[..n - 1]);
    if nu <= t {
        return;
    }
    if nu <= -t {
        h.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    // ½ [ (1 + t/‖u‖)I − (t/‖u‖)ūūᵀ   ū ]
    //   [ ūᵀ                           1 ]
    let r = t / nu;
    let ubar: Vec<f64> = x[..n - 1].iter().map(|v| v / nu).collect();
    let hu = &h[..n - 1];
    let ht = h[n - 1];
    let proj = linalg::dot(&ubar, hu);
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        out[i] = 0.5 * ((1.0 + r) * hu[i] - r * ubar[i] * proj + ubar[i] * ht);
    }
    out[n - 1] = 0.5 * (proj + ht);
    h.copy_from_slice(&out);
}

/// Distance-style membership test used by tests and reports: smallest PSD
/// eigenvalue, SOC gap `t − ‖u‖`, and smallest orthant entry, whichever is
/// most negative.
pub fn cone_violation(cone: &ConeSpec, x: &BlockPoint) -> Result<f64> {
    cone.check(x)?;
    let mut worst = 0.0_f64;
    for k in 0..cone.psd.len() {
        let dec = eig_sym(&x.psd_block(cone, k))?;
        worst = worst.min(dec.eigenvalues[dec.dim() - 1]);
    }
    for (k, &d) in cone.soc.iter().enumerate() {
        let o = cone.soc_offset(k);
        let b = &x.data[o..o + d];
        worst = worst.min(b[d - 1] - linalg::norm(&b[..d - 1]));
    }
    for &v in &x.data[cone.nonneg_offset()..] {
        worst = worst.min(v);
    }
    Ok(-worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn product_cone() -> ConeSpec {
        ConeSpec::new(vec![2], vec![3], 2).unwrap()
    }

    #[test]
    fn psd_clamps_negative_eigenvalue() {
        let (x, _) = project_psd(&SymMatrix::from_diagonal(&[1.0, -2.0])).unwrap();
        assert!(close(x.as_slice(), &[1.0, 0.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn psd_swap_matrix() {
        let c = SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let (x, _) = project_psd(&c).unwrap();
        assert!(close(x.as_slice(), &[0.5, 0.5, 0.5, 0.5], 1e-14));
    }

    #[test]
    fn psd_fixed_point() {
        let c =
            SymMatrix::from_row_slice(3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let (x, _) = project_psd(&c).unwrap();
        assert!(close(x.as_slice(), c.as_slice(), 1e-14));
    }

    #[test]
    fn soc_examples() {
        assert_eq!(
            project_soc(&[3.0, 4.0, 10.0]).unwrap(),
            vec![3.0, 4.0, 10.0]
        );
        assert_eq!(project_soc(&[0.0, 0.0, -5.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(close(
            &project_soc(&[3.0, 4.0, 0.0]).unwrap(),
            &[1.5, 2.0, 2.5],
            1e-15
        ));
        assert_eq!(project_soc(&[-2.0]).unwrap(), vec![0.0]);
        assert!(matches!(
            project_soc(&[f64::INFINITY, 1.0]),
            Err(Error::NonFinite(_))
        ));
    }

    /// Brute force: the projection of (u, 0) with u = (3, 4) lands on the
    /// boundary ray through (u/‖u‖, 1); scan the ray scale.
    #[test]
    fn soc_matches_ray_scan() {
        let x = [3.0, 4.0, 0.0];
        let (mut best, mut best_s) = (f64::INFINITY, 0.0);
        for k in 0..=100_000 {
            let s = k as f64 * 1e-4;
            let p = [0.6 * s, 0.8 * s, s];
            let d: f64 = x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best {
                best = d;
                best_s = s;
            }
        }
        let proj = project_soc(&x).unwrap();
        assert!((proj[2] - best_s).abs() <= 1e-4);
    }

    #[test]
    fn product_cone_blockwise() {
        let k = product_cone();
        let x = BlockPoint::from_blocks(
            &k,
            vec![
                Block::Psd(SymMatrix::from_diagonal(&[1.0, -2.0])),
                Block::Soc(vec![0.0, 0.0, -5.0]),
                Block::Nonneg(vec![-1.0, 2.0]),
            ],
        )
        .unwrap();
        let p = project_cone(&k, &x).unwrap();
        let want = BlockPoint::from_blocks(
            &k,
            vec![
                Block::Psd(SymMatrix::from_diagonal(&[1.0, 0.0])),
                Block::Soc(vec![0.0, 0.0, 0.0]),
                Block::Nonneg(vec![0.0, 2.0]),
            ],
        )
        .unwrap();
        assert!(close(&p.data, &want.data, 1e-15));
        let zero = BlockPoint::zeros(&k);
        assert_eq!(project_cone(&k, &zero).unwrap(), zero);
    }

    #[test]
    fn polar_examples() {
        let k = ConeSpec::psd(2);
        let x = BlockPoint::from_sym(&SymMatrix::from_diagonal(&[1.0, -2.0]));
        let q = project_polar(&k, &x).unwrap();
        assert!(close(&q.data, &[0.0, 0.0, 0.0, -2.0], 1e-15));
        let inside = BlockPoint::from_sym(&SymMatrix::from_diagonal(&[1.0, 3.0]));
        assert!(project_polar(&k, &inside).unwrap().norm() <= 1e-15);
        let polar = BlockPoint::from_sym(&SymMatrix::from_diagonal(&[-1.0, -3.0]));
        assert!(close(
            &project_polar(&k, &polar).unwrap().data,
            &polar.data,
            1e-15
        ));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let k = product_cone();
        let bad = BlockPoint { data: vec![0.0; 3] };
        assert!(matches!(project_cone(&k, &bad), Err(Error::Shape(_))));
        assert!(BlockPoint::from_blocks(&k, vec![Block::Soc(vec![1.0])]).is_err());
    }

    #[test]
    fn jacobian_trivial_regimes() {
        let h = SymMatrix::from_row_slice(2, &[1.0, 2.0, 2.0, -3.0]).unwrap();
        let dec = eig_sym(&SymMatrix::from_diagonal(&[2.0, 1.0])).unwrap();
        assert!(close(
            psd_jacobian_apply(&dec, &h).unwrap().as_slice(),
            h.as_slice(),
            1e-15
        ));
        let dec = eig_sym(&SymMatrix::from_diagonal(&[-2.0, -1.0])).unwrap();
        assert!(psd_jacobian_apply(&dec, &h).unwrap().frobenius_norm() == 0.0);
        let dec3 = eig_sym(&SymMatrix::identity(3)).unwrap();
        assert!(psd_jacobian_apply(&dec3, &h).is_err());
    }

    #[test]
    fn jacobian_matches_central_difference() {
        let c =
            SymMatrix::from_row_slice(3, &[1.0, 2.0, 0.5, 2.0, -1.0, 0.3, 0.5, 0.3, 0.2]).unwrap();
        let h = SymMatrix::from_row_slice(3, &[0.3, -1.0, 0.2, -1.0, 0.5, 0.7, 0.2, 0.7, -0.4])
            .unwrap();
        let (_, dec) = project_psd(&c).unwrap();
        let jh = psd_jacobian_apply(&dec, &h).unwrap();
        let eps = 1e-6;
        let plus = SymMatrix::new(c.as_matrix() + h.as_matrix() * eps).unwrap();
        let minus = SymMatrix::new(c.as_matrix() - h.as_matrix() * eps).unwrap();
        let fd = (project_psd(&plus).unwrap().0.into_inner()
            - project_psd(&minus).unwrap().0.into_inner())
            / (2.0 * eps);
        assert!((&fd - jh.as_matrix()).norm() <= 1e-5 * (1.0 + fd.norm()));
    }

    #[test]
    fn soc_jacobian_matches_central_difference() {
        let k = ConeSpec::new(vec![], vec![4], 0).unwrap();
        let x = BlockPoint::from_vec(&k, vec![1.0, -2.0, 0.5, 0.7]).unwrap();
        let h = BlockPoint::from_vec(&k, vec![0.2, 0.1, -0.3, 0.4]).unwrap();
        let (_, jac) = project_cone_with_jacobian(&k, &x).unwrap();
        let jh = jac.apply(&h).unwrap();
        let eps = 1e-6;
        let mut xp = x.clone();
        xp.axpy(eps, &h);
        let mut xm = x.clone();
        xm.axpy(-eps, &h);
        let fd = project_cone(&k, &xp)
            .unwrap()
            .sub(&project_cone(&k, &xm).unwrap())
            .scaled(0.5 / eps);
        assert!(close(&fd.data, &jh.data, 1e-7));
    }
}
