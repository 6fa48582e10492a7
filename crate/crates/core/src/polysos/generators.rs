use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::monomials::monomials_upto;
use super::polynomial::Polynomial;
use super::sos::build_sos_feasibility;
use crate::cones::BlockPoint;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::regsolver::LinearConicProblem;

/// Largest Gram block the generators will build.
pub const GRAM_DIM_CAP: usize = 2000;

/// Seeded generator used by everything random in the crate.
pub fn rng_from_seed(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Motzkin's polynomial `1 + v₁²v₂²(v₁² + v₂² − 3)`: nonnegative, not SOS.
pub fn motzkin() -> Polynomial {
    Polynomial::from_terms(
        2,
        [
            (vec![0, 0], 1.0),
            (vec![4, 2], 1.0),
            (vec![2, 4], 1.0),
            (vec![2, 2], -3.0),
        ],
    )
    .expect("fixed arity")
}

/// Rank of the planted Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankKind {
    Full,
    One,
}

impl std::str::FromStr for RankKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(RankKind::Full),
            "one" | "1" => Ok(RankKind::One),
            other => Err(Error::Input(format!(
                "unknown rank kind '{other}' (full|one)"
            ))),
        }
    }
}

fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Random SOS instance with a planted Gram matrix `X`; `b = A·vec(X)`.
///
/// `Full` plants `Q·Diag(u)·Qᵀ` with `Q` orthogonal and `u ~ U(0.5, 1.5)`,
/// `One` plants `qqᵀ` with a random unit vector `q`.
pub fn random_sos_instance(
    num_vars: usize,
    d: u32,
    rank: RankKind,
    seed: u64,
) -> Result<(LinearConicProblem, SymMatrix)> {
    let basis = monomials_upto(num_vars, d)?;
    let n = basis.len();
    if n > GRAM_DIM_CAP {
        return Err(Error::SizeCap {
            what: "Gram matrix dimension",
            size: n,
            cap: GRAM_DIM_CAP,
        });
    }
    let mut rng = rng_from_seed(seed);
    let x = match rank {
        RankKind::Full => {
            let q = gaussian_matrix(&mut rng, n).qr().q();
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
            let mut qd = q.clone();
            for (j, uj) in u.iter().enumerate() {
                qd.column_mut(j).scale_mut(*uj);
            }
            SymMatrix::symmetrized(qd * q.transpose())
        }
        RankKind::One => {
            let mut q: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = crate::linalg::norm(&q);
            q.iter_mut().for_each(|v| *v /= norm);
            SymMatrix::symmetrized(DMatrix::from_fn(n, n, |i, j| q[i] * q[j]))
        }
    };
    // the right-hand side only matters through A·vec(X), fill it afterwards
    let mut lcp = build_sos_feasibility(&Polynomial::zero(num_vars), d)?;
    lcp.a.rhs = lcp.a.apply(&BlockPoint::from_sym(&x));
    Ok((lcp, x))
}

/// `p₀ + Σ vᵢ^{2d}` with `p₀` random of total degree below `2d`, its
/// coefficient vector normalized to unit length.
pub fn random_polymin_instance(num_vars: usize, d: u32, seed: u64) -> Result<Polynomial> {
    if d == 0 {
        return Err(Error::Input("degree d must be at least 1".into()));
    }
    let basis = monomials_upto(num_vars, 2 * d - 1)?;
    let mut rng = rng_from_seed(seed);
    let coeffs: Vec<f64> = (0..basis.len())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let norm = crate::linalg::norm(&coeffs);
    let mut p = Polynomial::zero(num_vars);
    for (e, c) in basis.exponents.iter().zip(&coeffs) {
        p.add_term(e.clone(), c / norm)?;
    }
    for i in 0..num_vars {
        let mut e = vec![0; num_vars];
        e[i] = 2 * d;
        p.add_term(e, 1.0)?;
    }
    Ok(p)
}

/// `Σ_{i≤N} (1 − Σ_{j≤i}(v_j + v_j²))² + (1 − Σ_j(v_j + v_j³))²`
pub fn structured_polymin(num_vars: usize) -> Result<Polynomial> {
    if num_vars == 0 {
        return Err(Error::Input("need at least one variable".into()));
    }
    let one = Polynomial::constant(num_vars, 1.0);
    let mut p = Polynomial::zero(num_vars);
    let mut partial = Polynomial::zero(num_vars);
    let mut cubic = Polynomial::zero(num_vars);
    for j in 0..num_vars {
        let v = Polynomial::var(num_vars, j);
        partial = &partial + &(&v + &v.pow(2));
        cubic = &cubic + &(&v + &v.pow(3));
        p = &p + &(&one - &partial).pow(2);
    }
    p = &p + &(&one - &cubic).pow(2);
    Ok(p)
}

/// Unit-diagonal symmetric matrix with `N(0, 1/n)` off-diagonal entries,
/// typically indefinite: a test input for the nearest correlation problem.
pub fn random_nearcorr_matrix(n: usize, seed: u64) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::Input("matrix dimension must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let s = 1.0 / (n as f64).sqrt();
    let mut m = DMatrix::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.sample::<f64, _>(StandardNormal) * s;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymMatrix::new(m)
}

/// Erdős–Rényi graph `G(n, prob)`.
pub fn random_graph(n: usize, prob: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::Input(format!(
            "edge probability must lie in [0, 1], got {prob}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < prob {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}
