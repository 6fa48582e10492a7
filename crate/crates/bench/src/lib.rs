//! Seeded workloads shared by the benchmarks and the acceptance suite.

use conproj::polysos::{
    build_nearcorr, build_theta, random_graph, random_nearcorr_matrix, random_sos_instance,
    RankKind,
};
use conproj::{LinearConicProblem, ProjectionProblem, Result, SymMatrix};

/// Indefinite unit-diagonal matrix of dimension `n`.
pub fn indefinite(n: usize, seed: u64) -> Result<SymMatrix> {
    random_nearcorr_matrix(n, seed)
}

pub fn nearcorr(n: usize, seed: u64) -> Result<ProjectionProblem> {
    build_nearcorr(&random_nearcorr_matrix(n, seed)?)
}

pub fn theta_gnp(n: usize, prob: f64, seed: u64) -> Result<LinearConicProblem> {
    build_theta(&random_graph(n, prob, seed)?)
}

/// Full-rank planted SOS feasibility problem.
pub fn sos(num_vars: usize, d: u32, seed: u64) -> Result<LinearConicProblem> {
    Ok(random_sos_instance(num_vars, d, RankKind::Full, seed)?.0)
}
