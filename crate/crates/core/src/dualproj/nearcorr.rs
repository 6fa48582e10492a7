use serde::{Deserialize, Serialize};

use super::{solve_fixed_metric, solve_quasi_newton, solve_ssnewton, DualOptions};
use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::polysos::build_nearcorr;
use crate::report::SolveReport;

/// Which dual maximization engine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMethod {
    FixedMetric,
    QuasiNewton,
    Ssnewton,
}

impl DualMethod {
    pub fn name(self) -> &'static str {
        match self {
            DualMethod::FixedMetric => "fixed_metric",
            DualMethod::QuasiNewton => "quasi_newton",
            DualMethod::Ssnewton => "ssnewton",
        }
    }
}

impl std::str::FromStr for DualMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_metric" | "fixed-metric" | "gradient" => Ok(DualMethod::FixedMetric),
            "quasi_newton" | "quasi-newton" | "bfgs" | "lbfgs" => Ok(DualMethod::QuasiNewton),
            "ssnewton" | "newton" => Ok(DualMethod::Ssnewton),
            other => Err(Error::Input(format!("unknown dual method '{other}'"))),
        }
    }
}

/// Nearest correlation matrix: projection of `C` onto
/// `{X ⪰ 0 : X_ii = 1}`. `tol` bounds `(Σ(X_ii − 1)²)^½`; `None` means
/// `1e-7·n`.
pub fn nearest_correlation(
    c: &SymMatrix,
    method: DualMethod,
    tol: Option<f64>,
) -> Result<(SymMatrix, SolveReport)> {
    let p = build_nearcorr(c)?;
    let opts = DualOptions {
        tol,
        ..Default::default()
    };
    let sol = match method {
        DualMethod::FixedMetric => solve_fixed_metric(&p, &opts)?,
        DualMethod::QuasiNewton => solve_quasi_newton(&p, &opts)?,
        DualMethod::Ssnewton => solve_ssnewton(&p, &opts)?,
    };
    let cone = ConeSpec::psd(c.dim());
    Ok((sol.x.psd_block(&cone, 0), sol.report))
}

/// `D^{-1/2} X D^{-1/2}` with `D = diag(X)`: the correlation matrix of a
/// covariance matrix. The diagonal of the result is exactly one.
pub fn rescale_correlation(x: &SymMatrix) -> Result<SymMatrix> {
    let n = x.dim();
    let d: Vec<f64> = (0..n).map(|i| x.get(i, i)).collect();
    if let Some(i) = d.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Input(format!(
            "diagonal entry {i} is {} (must be positive)",
            d[i]
        )));
    }
    let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut m = x.as_matrix().clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= s[i] * s[j];
        }
        m[(i, i)] = 1.0;
    }
    Ok(SymMatrix::symmetrized(m))
}
