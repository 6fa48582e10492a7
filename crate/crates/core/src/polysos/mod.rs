//! Problem builders: sum-of-squares and polynomial minimization
//! relaxations, Lovász theta SDPs, nearest correlation, and seeded random
//! instance generators.

mod generators;
mod graph;
mod monomials;
mod polynomial;
mod sos;

pub use generators::{
    motzkin, random_graph, random_nearcorr_matrix, random_polymin_instance, random_sos_instance,
    rng_from_seed, structured_polymin, RankKind, GRAM_DIM_CAP,
};
pub use graph::{build_theta, Graph};
pub use monomials::{binomial, monomials_upto, monomials_upto_capped, MonomialBasis, MONOMIAL_CAP};
pub use polynomial::{Exponent, Polynomial};
pub use sos::{build_polymin, build_sos_feasibility, extract_certificate, gram_rows, Certificate};

use crate::affine::{AffineMap, RowBuilder};
use crate::cones::{BlockPoint, ConeSpec};
use crate::dualproj::ProjectionProblem;
use crate::error::Result;
use crate::linalg::SymMatrix;

/// Nearest correlation matrix as a projection problem: rows
/// `A_i = e_i e_iᵀ`, `b = 1`.
pub fn build_nearcorr(c: &SymMatrix) -> Result<ProjectionProblem> {
    let n = c.dim();
    let cone = ConeSpec::psd(n);
    let mut a = AffineMap::new(cone.ambient_dim());
    for i in 0..n {
        a.push_row(RowBuilder::new(&cone).sym(0, i, i, 1.0).build(), 1.0)?;
    }
    ProjectionProblem::equality(BlockPoint::from_sym(c), a, cone)
}
