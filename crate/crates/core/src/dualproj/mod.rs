//! Dual projection methods for the conic least-squares problem
//!
//! ```text
//! min ½‖x − c‖²   s.t.  A_E x = b_E,  A_I x ≤ b_I,  x ∈ K
//! ```
//!
//! Only the affine constraints are dualized. For multipliers `y` (free) and
//! `z ≥ 0` the inner minimum over `K` is a projection,
//!
//! ```text
//! x(y, z) = P_K(c + A_Eᵀy − A_Iᵀz)
//! θ(y, z) = b_Eᵀy − b_Iᵀz + ½(‖c‖² − ‖x(y, z)‖²)
//! ∇θ      = (b_E − A_E x,  A_I x − b_I)
//! ```
//!
//! `θ` is concave with a Lipschitz gradient, so maximizing it is a smooth
//! problem; the stopping test `‖∇θ‖ ≤ tol` is a bound on primal
//! infeasibility. The inequality block is written with the `≤` convention,
//! i.e. the `(A_I, b_I)` pair enters the formulas negated.

mod fixed_metric;
mod linesearch;
mod nearcorr;
mod quasi_newton;
mod ssnewton;

pub use fixed_metric::solve_fixed_metric;
pub use nearcorr::{nearest_correlation, rescale_correlation, DualMethod};
pub use quasi_newton::{solve_quasi_newton, solve_quasi_newton_with_memory, LbfgsMemory};
pub use ssnewton::{newton_hessian_apply, solve_ssnewton};

use crate::affine::AffineMap;
use crate::cones::{project_cone_with_jacobian, BlockPoint, ConeSpec, ProjectionJacobian};
use crate::error::{Error, Result};
use crate::linalg;
use crate::report::SolveReport;

/// Data of a conic least-squares problem.
#[derive(Debug, Clone)]
pub struct ProjectionProblem {
    pub c: BlockPoint,
    pub eq: AffineMap,
    pub ineq: AffineMap,
    pub cone: ConeSpec,
}

impl ProjectionProblem {
    pub fn new(c: BlockPoint, eq: AffineMap, ineq: AffineMap, cone: ConeSpec) -> Result<Self> {
        cone.validate()?;
        if c.len() != cone.ambient_dim() {
            return Err(Error::Shape(format!(
                "center has length {}, cone ambient dimension is {}",
                c.len(),
                cone.ambient_dim()
            )));
        }
        eq.validate(&cone)?;
        ineq.validate(&cone)?;
        if eq.nrows() + ineq.nrows() == 0 {
            return Err(Error::Input(
                "projection problem needs at least one affine constraint".into(),
            ));
        }
        Ok(ProjectionProblem { c, eq, ineq, cone })
    }

    pub fn equality(c: BlockPoint, eq: AffineMap, cone: ConeSpec) -> Result<Self> {
        let dim = cone.ambient_dim();
        Self::new(c, eq, AffineMap::new(dim), cone)
    }

    pub fn m_eq(&self) -> usize {
        self.eq.nrows()
    }

    pub fn m_ineq(&self) -> usize {
        self.ineq.nrows()
    }

    /// Size used by the default tolerance `1e-7·n`: the sum of block orders.
    pub fn size_n(&self) -> usize {
        self.cone.psd.iter().sum::<usize>() + self.cone.soc.iter().sum::<usize>() + self.cone.nonneg
    }

    /// Primal infeasibility `‖(A_E x − b_E, (A_I x − b_I)₊)‖`.
    pub fn infeasibility(&self, x: &BlockPoint) -> f64 {
        let e = self.eq.residual(x);
        let i = self.ineq.residual(x);
        (linalg::dot(&e, &e) + i.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>()).sqrt()
    }

    pub fn objective(&self, x: &BlockPoint) -> f64 {
        0.5 * x.sub(&self.c).norm().powi(2)
    }
}

/// Multipliers `(y, z)`, `z ≥ 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DualPoint {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl DualPoint {
    pub fn zeros(p: &ProjectionProblem) -> Self {
        DualPoint {
            y: vec![0.0; p.m_eq()],
            z: vec![0.0; p.m_ineq()],
        }
    }

    pub(crate) fn flat(&self) -> Vec<f64> {
        let mut v = self.y.clone();
        v.extend_from_slice(&self.z);
        v
    }

    pub(crate) fn from_flat(v: &[f64], m_eq: usize) -> Self {
        DualPoint {
            y: v[..m_eq].to_vec(),
            z: v[m_eq..].to_vec(),
        }
    }
}

/// `θ`, its gradient and the primal candidate at one dual point.
#[derive(Debug, Clone)]
pub struct DualEval {
    pub theta: f64,
    pub grad_y: Vec<f64>,
    pub grad_z: Vec<f64>,
    pub x: BlockPoint,
}

impl DualEval {
    pub(crate) fn grad_flat(&self) -> Vec<f64> {
        let mut g = self.grad_y.clone();
        g.extend_from_slice(&self.grad_z);
        g
    }

    /// Norm of the gradient projected onto the feasible directions of
    /// `ℝ^{m_E} × ℝ₊^{m_I}` at `z`.
    pub fn projected_grad_norm(&self, z: &[f64]) -> f64 {
        let gy = linalg::dot(&self.grad_y, &self.grad_y);
        let gz: f64 = self
            .grad_z
            .iter()
            .zip(z)
            .map(|(&g, &zi)| if zi <= 0.0 { g.max(0.0) } else { g })
            .map(|g| g * g)
            .sum();
        (gy + gz).sqrt()
    }
}

fn check_dual(p: &ProjectionProblem, d: &DualPoint) -> Result<()> {
    if d.y.len() != p.m_eq() || d.z.len() != p.m_ineq() {
        return Err(Error::Shape(format!(
            "dual point has sizes ({}, {}), problem has ({}, {})",
            d.y.len(),
            d.z.len(),
            p.m_eq(),
            p.m_ineq()
        )));
    }
    if d.y.iter().chain(&d.z).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("dual point"));
    }
    if d.z.iter().any(|&v| v < 0.0) {
        return Err(Error::Input(
            "inequality multipliers must be nonnegative".into(),
        ));
    }
    Ok(())
}

/// `c + A_Eᵀy − A_Iᵀz`
pub(crate) fn dual_shift(p: &ProjectionProblem, d: &DualPoint) -> BlockPoint {
    let mut w = p.c.clone();
    p.eq.adjoint_add(&d.y, 1.0, &mut w);
    p.ineq.adjoint_add(&d.z, -1.0, &mut w);
    w
}

/// Evaluates `θ`, `∇θ` and `x(y, z)`.
pub fn eval_theta(p: &ProjectionProblem, d: &DualPoint) -> Result<DualEval> {
    Ok(eval_theta_jac(p, d)?.0)
}

pub(crate) fn eval_theta_jac(
    p: &ProjectionProblem,
    d: &DualPoint,
) -> Result<(DualEval, ProjectionJacobian)> {
    check_dual(p, d)?;
    let w = dual_shift(p, d);
    let (x, jac) = project_cone_with_jacobian(&p.cone, &w)?;
    let theta = linalg::dot(&p.eq.rhs, &d.y) - linalg::dot(&p.ineq.rhs, &d.z)
        + 0.5 * (p.c.dot(&p.c) - x.dot(&x));
    let grad_y = p.eq.residual(&x).into_iter().map(|r| -r).collect();
    let grad_z = p.ineq.residual(&x);
    Ok((
        DualEval {
            theta,
            grad_y,
            grad_z,
            x,
        },
        jac,
    ))
}

/// Settings shared by the three dual solvers.
#[derive(Debug, Clone)]
pub struct DualOptions {
    /// Gradient-norm tolerance; `None` means `1e-7·n`.
    pub tol: Option<f64>,
    /// `None` picks the per-solver default (5000 / 1000 / 200).
    pub max_iter: Option<usize>,
    /// Limited-memory pairs kept by the quasi-Newton solver.
    pub memory: usize,
    /// Warm start.
    pub initial: Option<DualPoint>,
    /// Keep every primal iterate `x(y_k)` (memory heavy; used for testing).
    pub record_iterates: bool,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            tol: None,
            max_iter: None,
            memory: 10,
            initial: None,
            record_iterates: false,
        }
    }
}

impl DualOptions {
    pub fn with_tol(tol: f64) -> Self {
        DualOptions {
            tol: Some(tol),
            ..Default::default()
        }
    }

    pub(crate) fn tol_for(&self, p: &ProjectionProblem) -> f64 {
        self.tol.unwrap_or(1e-7 * p.size_n() as f64)
    }

    pub(crate) fn start(&self, p: &ProjectionProblem) -> Result<DualPoint> {
        match &self.initial {
            Some(d) => {
                check_dual(p, d)?;
                Ok(d.clone())
            }
            None => Ok(DualPoint::zeros(p)),
        }
    }
}

/// Result of a dual solve.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub x: BlockPoint,
    pub dual: DualPoint,
    pub theta: f64,
    pub report: SolveReport,
    /// Primal iterates `x(y_0), x(y_1), …` when recording was requested.
    pub iterates: Vec<BlockPoint>,
}

/// Fills the residual and objective fields shared by every dual solver.
pub(crate) fn finish_report(
    p: &ProjectionProblem,
    report: &mut SolveReport,
    eval: &DualEval,
    d: &DualPoint,
) {
    report.primal_residual = p.infeasibility(&eval.x);
    let ineq = p.ineq.residual(&eval.x);
    report.dual_residual = ineq
        .iter()
        .zip(&d.z)
        .map(|(r, z)| (r * z).powi(2))
        .sum::<f64>()
        .sqrt();
    report.objective = p.objective(&eval.x);
}
