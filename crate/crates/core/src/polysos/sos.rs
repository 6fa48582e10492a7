use super::monomials::{monomials_upto, MonomialBasis};
use super::polynomial::{Exponent, Polynomial};
use crate::affine::{AffineMap, SparseRow};
use crate::cones::{BlockPoint, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, SymMatrix};
use crate::regsolver::LinearConicProblem;

/// Gram-matrix constraints `⟨A_α, X⟩` for every `|α| ≤ 2d`, rows in the
/// order of `monomials_upto(N, 2d)`. `A_α` has a one at `(β, γ)` whenever
/// `β + γ = α`, with `β, γ` in the degree-`d` basis.
pub fn gram_rows(
    basis: &MonomialBasis,
    cone: &ConeSpec,
) -> Result<(MonomialBasis, Vec<SparseRow>)> {
    let full = monomials_upto(basis.num_vars, 2 * basis.degree)?;
    let n = basis.len();
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); full.len()];
    let mut sum: Exponent = vec![0; basis.num_vars];
    for i in 0..n {
        for j in 0..n {
            for (s, (a, b)) in sum
                .iter_mut()
                .zip(basis.exponents[i].iter().zip(&basis.exponents[j]))
            {
                *s = a + b;
            }
            let r = full
                .index_of(&sum)
                .expect("sum of two degree-d exponents has degree <= 2d");
            entries[r].push((cone.psd_index(0, i, j), 1.0));
        }
    }
    let rows = entries.into_iter().map(SparseRow::from_entries).collect();
    Ok((full, rows))
}

fn check_degree(p: &Polynomial, d: u32) -> Result<()> {
    if p.degree() > 2 * d {
        return Err(Error::Input(format!(
            "polynomial of degree {} cannot be a sum of squares of degree-{d} polynomials",
            p.degree()
        )));
    }
    Ok(())
}

/// SOS feasibility: find `X ⪰ 0` with `p(v) = π(v)ᵀXπ(v)`, `π` the
/// degree-`d` monomial basis. Pure feasibility, so the objective is zero.
pub fn build_sos_feasibility(p: &Polynomial, d: u32) -> Result<LinearConicProblem> {
    check_degree(p, d)?;
    let basis = monomials_upto(p.num_vars(), d)?;
    let cone = ConeSpec::psd(basis.len());
    let (full, rows) = gram_rows(&basis, &cone)?;
    let rhs = full.exponents.iter().map(|e| p.coeff(e)).collect();
    let a = AffineMap::from_rows(cone.ambient_dim(), rows, rhs)?;
    LinearConicProblem::new(BlockPoint::zeros(&cone), a, cone)
}

/// Relaxation of `min_v p(v)`: maximize `p̲` such that `p − p̲` is SOS.
///
/// The free scalar is eliminated by dropping the constant row: the
/// remaining rows fix every nonconstant coefficient and the objective
/// minimizes `X₀₀`. Returns the problem and the offset `p₀`; the lower
/// bound is `p₀ − ⟨c, X⟩`.
pub fn build_polymin(p: &Polynomial) -> Result<(LinearConicProblem, f64)> {
    let deg = p.degree();
    if deg % 2 == 1 {
        return Err(Error::Input(format!("polynomial has odd degree {deg}")));
    }
    if deg == 0 {
        return Err(Error::Input(
            "constant polynomial has nothing to minimize".into(),
        ));
    }
    let d = deg / 2;
    let basis = monomials_upto(p.num_vars(), d)?;
    let cone = ConeSpec::psd(basis.len());
    let (full, rows) = gram_rows(&basis, &cone)?;
    let mut a = AffineMap::new(cone.ambient_dim());
    // row 0 is the constant monomial
    for (row, e) in rows.into_iter().zip(&full.exponents).skip(1) {
        a.push_row(row, p.coeff(e))?;
    }
    let mut c = BlockPoint::zeros(&cone);
    c.data[cone.psd_index(0, 0, 0)] = 1.0;
    let offset = p.coeff(&vec![0; p.num_vars()]);
    Ok((LinearConicProblem::new(c, a, cone)?, offset))
}

/// `Σ_k q_k²` decomposition of a Gram matrix.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub squares: Vec<Polynomial>,
    pub min_eigenvalue: f64,
    /// Slightly negative eigenvalues that were set to zero.
    pub clamped: usize,
}

impl Certificate {
    /// `Σ_k q_k²`
    pub fn expand(&self, num_vars: usize) -> Polynomial {
        self.squares
            .iter()
            .fold(Polynomial::zero(num_vars), |acc, q| &acc + &(q * q))
    }
}

/// Factors `X = Σ λ_k u_k u_kᵀ` and returns `q_k = √λ_k·u_kᵀπ`.
/// Eigenvalues down to `−1e-8·‖X‖` are clamped; anything more negative is
/// an error.
pub fn extract_certificate(x: &SymMatrix, basis: &MonomialBasis) -> Result<Certificate> {
    if x.dim() != basis.len() {
        return Err(Error::Shape(format!(
            "Gram matrix has dim {}, basis has {} monomials",
            x.dim(),
            basis.len()
        )));
    }
    let dec = eig_sym(x)?;
    let scale = x.frobenius_norm();
    let min_eigenvalue = dec
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -1e-8 * scale {
        return Err(Error::Numerical(format!(
            "Gram matrix is indefinite: eigenvalue {min_eigenvalue:e} (‖X‖ = {scale:e})"
        )));
    }
    let mut squares = Vec::new();
    let mut clamped = 0;
    for (k, &lam) in dec.eigenvalues.iter().enumerate() {
        if lam < 0.0 {
            clamped += 1;
            continue;
        }
        if lam == 0.0 {
            continue;
        }
        let s = lam.sqrt();
        let terms = basis
            .exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), s * dec.eigenvectors[(i, k)]));
        let q = Polynomial::from_terms(basis.num_vars, terms)?;
        if !q.is_zero() {
            squares.push(q);
        }
    }
    Ok(Certificate {
        squares,
        min_eigenvalue,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::gram_factorize;
    use crate::polysos::motzkin;

    #[test]
    fn one_plus_v_squared() {
        let p = Polynomial::from_terms(1, [(vec![0], 1.0), (vec![2], 1.0)]).unwrap();
        let lcp = build_sos_feasibility(&p, 1).unwrap();
        assert_eq!(lcp.cone.psd, vec![2]);
        assert_eq!(lcp.m(), 3);
        assert_eq!(lcp.b(), &[1.0, 0.0, 1.0]);
        let x = BlockPoint::from_sym(&SymMatrix::identity(2));
        assert_eq!(lcp.a.residual(&x), vec![0.0; 3]);
    }

    #[test]
    fn motzkin_dims() {
        let lcp = build_sos_feasibility(&motzkin(), 3).unwrap();
        assert_eq!(lcp.cone.psd, vec![10]);
        assert_eq!(lcp.m(), 28);
    }

    #[test]
    fn gram_is_diagonal_with_pair_counts() {
        let p = Polynomial::constant(2, 1.0);
        let lcp = build_sos_feasibility(&p, 2).unwrap();
        let g = gram_factorize(&lcp.a).unwrap();
        let diag = g.diagonal().unwrap();
        // α = (1,1) arises from (1,0)+(0,1), (0,1)+(1,0), (0,0)+(1,1), (1,1)+(0,0)
        let full = monomials_upto(2, 4).unwrap();
        assert_eq!(diag[full.index_of(&[1, 1]).unwrap()], 4.0);
        assert_eq!(diag[0], 1.0);
    }

    #[test]
    fn degree_errors() {
        assert!(build_sos_feasibility(&motzkin(), 2).is_err());
        let odd = Polynomial::monomial(vec![3], 1.0);
        assert!(build_polymin(&odd).is_err());
    }

    #[test]
    fn polymin_layout() {
        let v = Polynomial::var(1, 0);
        let one = Polynomial::constant(1, 1.0);
        let p = (&v - &one).pow(2);
        let (lcp, offset) = build_polymin(&p).unwrap();
        assert_eq!(offset, 1.0);
        assert_eq!(lcp.m(), 2);
        assert_eq!(lcp.b(), &[-2.0, 1.0]);
        // X = (1, −1)(1, −1)ᵀ is feasible with X₀₀ = 1, bound 0
        let x =
            BlockPoint::from_sym(&SymMatrix::from_row_slice(2, &[1.0, -1.0, -1.0, 1.0]).unwrap());
        assert_eq!(lcp.a.residual(&x), vec![0.0; 2]);
        assert_eq!(offset - lcp.objective(&x), 0.0);
    }

    #[test]
    fn certificate_identity() {
        let basis = monomials_upto(1, 1).unwrap();
        let cert = extract_certificate(&SymMatrix::identity(2), &basis).unwrap();
        assert_eq!(cert.squares.len(), 2);
        let p = Polynomial::from_terms(1, [(vec![0], 1.0), (vec![2], 1.0)]).unwrap();
        assert!(cert.expand(1).max_coeff_diff(&p) < 1e-15);
        assert!(extract_certificate(&SymMatrix::from_diagonal(&[1.0, -1.0]), &basis).is_err());
    }

    #[test]
    fn certificate_rank_one() {
        let basis = monomials_upto(1, 1).unwrap();
        let x = SymMatrix::from_row_slice(2, &[1.0, -1.0, -1.0, 1.0]).unwrap();
        let cert = extract_certificate(&x, &basis).unwrap();
        assert_eq!(cert.squares.len(), 1);
        let v = Polynomial::var(1, 0);
        let want = (&v - &Polynomial::constant(1, 1.0)).pow(2);
        assert!(cert.expand(1).max_coeff_diff(&want) < 1e-14);
    }
}
