use std::time::Instant;

use super::{eval_theta, finish_report, DualOptions, DualSolution, ProjectionProblem};
use crate::affine::gram_factorize;
use crate::error::{Error, Result};
use crate::linalg;
use crate::report::{SolveReport, Status};

const DEFAULT_MAX_ITER: usize = 5000;

/// Gradient ascent on `θ` in the metric `[AAᵀ]⁻¹` with unit step:
/// `y ← y + (AAᵀ)⁻¹(b − A x(y))`.
///
/// Equality constraints only. Its primal iterates coincide with those of
/// Dykstra's alternating projections started at `c`.
pub fn solve_fixed_metric(p: &ProjectionProblem, opts: &DualOptions) -> Result<DualSolution> {
    if p.m_ineq() > 0 {
        return Err(Error::Unsupported(
            "the fixed-metric gradient method handles equality constraints only".into(),
        ));
    }
    let start = Instant::now();
    let gram = gram_factorize(&p.eq)?;
    let tol = opts.tol_for(p);
    let max_iter = opts.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let mut report = SolveReport::new("fixed_metric");
    let mut dual = opts.start(p)?;
    let mut iterates = Vec::new();

    let mut eval = eval_theta(p, &dual)?;
    let mut k = 0;
    loop {
        if opts.record_iterates {
            iterates.push(eval.x.clone());
        }
        if linalg::norm(&eval.grad_y) <= tol {
            report.status = Status::Converged;
            break;
        }
        if k >= max_iter {
            report.status = Status::IterationLimit;
            break;
        }
        let step = gram.solve(&eval.grad_y);
        linalg::axpy(1.0, &step, &mut dual.y);
        eval = eval_theta(p, &dual)?;
        k += 1;
    }
    report.iterations = k;
    finish_report(p, &mut report, &eval, &dual);
    report.wall_time = start.elapsed();
    Ok(DualSolution {
        x: eval.x,
        theta: eval.theta,
        dual,
        report,
        iterates,
    })
}
