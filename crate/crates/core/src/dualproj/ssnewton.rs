use std::time::Instant;

use super::linesearch::{armijo, Step};
use super::{
    eval_theta_jac, finish_report, DualOptions, DualPoint, DualSolution, ProjectionProblem,
};
use crate::affine::{gram_factorize, AffineMap};
use crate::cones::{BlockPoint, ProjectionJacobian};
use crate::error::{Error, Result};
use crate::linalg;
use crate::report::{SolveReport, Status};

const DEFAULT_MAX_ITER: usize = 200;
/// Below this many constraints the Jacobi preconditioner is assembled.
const PRECOND_MAX_M: usize = 2000;
/// Spectral gap under which near-zero eigenvalues are moved to the
/// inactive set.
const GAP_FLOOR: f64 = 1e-10;

/// `H = A·J·Aᵀ` for one element `J` of the generalized Jacobian of `P_K`.
struct NewtonOperator<'a> {
    a: &'a AffineMap,
    jac: ProjectionJacobian,
    shift: f64,
}

impl NewtonOperator<'_> {
    fn apply(&self, d: &[f64]) -> Result<Vec<f64>> {
        let h: BlockPoint = self.a.adjoint(d);
        let jh = self.jac.apply(&h)?;
        let mut out = self.a.apply(&jh);
        linalg::axpy(self.shift, d, &mut out);
        Ok(out)
    }

    fn diagonal(&self) -> Vec<f64> {
        self.a
            .rows()
            .iter()
            .map(|r| self.jac.quadratic_form(&r.idx, &r.val) + self.shift)
            .collect()
    }
}

struct CgResult {
    d: Vec<f64>,
    iterations: usize,
    breakdown: bool,
}

/// Preconditioned CG on `H d = g`, stopped when `‖H d − g‖ ≤ η‖g‖`.
fn pcg(op: &NewtonOperator, g: &[f64], precond: &[f64], eta: f64, cap: usize) -> Result<CgResult> {
    let m = g.len();
    let mut d = vec![0.0; m];
    let mut r = g.to_vec();
    let target = eta * linalg::norm(g);
    let mut zv: Vec<f64> = r.iter().zip(precond).map(|(ri, pi)| ri / pi).collect();
    let mut p = zv.clone();
    let mut rz = linalg::dot(&r, &zv);
    for it in 0..cap {
        if linalg::norm(&r) <= target {
            return Ok(CgResult {
                d,
                iterations: it,
                breakdown: false,
            });
        }
        let hp = op.apply(&p)?;
        let php = linalg::dot(&p, &hp);
        if !(php > 0.0) {
            return Ok(CgResult {
                d,
                iterations: it,
                breakdown: true,
            });
        }
        let alpha = rz / php;
        linalg::axpy(alpha, &p, &mut d);
        linalg::axpy(-alpha, &hp, &mut r);
        zv = r.iter().zip(precond).map(|(ri, pi)| ri / pi).collect();
        let rz_new = linalg::dot(&r, &zv);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&zv) {
            *pi = zi + beta * *pi;
        }
    }
    Ok(CgResult {
        d,
        iterations: cap,
        breakdown: false,
    })
}

/// Inexact semismooth Newton-CG on `θ` (equality constraints only).
///
/// The generalized Hessian `A·∂P_K(c + Aᵀy)·Aᵀ` is only touched through
/// products. Each step is safeguarded by Armijo backtracking on `θ`; when
/// CG does not return an ascent direction the solver takes a step in the
/// `[AAᵀ]⁻¹` metric instead and records it in the report notes.
pub fn solve_ssnewton(p: &ProjectionProblem, opts: &DualOptions) -> Result<DualSolution> {
    if p.m_ineq() > 0 {
        return Err(Error::Unsupported(
            "semismooth Newton handles equality constraints only".into(),
        ));
    }
    let start = Instant::now();
    let gram = gram_factorize(&p.eq)?;
    let tol = opts.tol_for(p);
    let max_iter = opts.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let m = p.m_eq();
    let mut report = SolveReport::new("ssnewton");
    let mut dual = opts.start(p)?;
    let mut iterates = Vec::new();
    let mut fallbacks = 0;
    let mut damped = 0;

    let (mut eval, mut jac) = eval_theta_jac(p, &dual)?;
    let mut k = 0;
    loop {
        if opts.record_iterates {
            iterates.push(eval.x.clone());
        }
        let gnorm = linalg::norm(&eval.grad_y);
        if gnorm <= tol {
            report.status = Status::Converged;
            break;
        }
        if k >= max_iter {
            report.status = Status::IterationLimit;
            break;
        }
        let g = eval.grad_y.clone();
        let gap = jac.spectral_gap();
        if gap < GAP_FLOOR {
            let scale = jac
                .decompositions()
                .iter()
                .flat_map(|d| d.eigenvalues.iter().map(|l| l.abs()))
                .fold(1.0, f64::max);
            jac = jac.with_tie_tolerance(GAP_FLOOR * scale);
        }
        let mut op = NewtonOperator {
            a: &p.eq,
            jac,
            shift: 0.0,
        };
        let precond = if m <= PRECOND_MAX_M {
            let diag = op.diagonal();
            let mean = diag.iter().sum::<f64>() / m as f64;
            op.shift = 1e-10 * (1.0 + mean);
            diag.iter()
                .map(|v| (v + op.shift).max(1e-12 * (1.0 + mean)))
                .collect()
        } else {
            op.shift = 1e-10;
            vec![1.0; m]
        };
        let eta = 0.1f64.min(gnorm.sqrt());
        let cg = pcg(&op, &g, &precond, eta, (2 * m).max(1))?;
        report.inner_iterations += cg.iterations;

        let mut d = cg.d;
        let mut slope = linalg::dot(&g, &d);
        if cg.breakdown {
            report
                .notes
                .push(format!("CG breakdown at Newton iteration {k}"));
        }
        if !(slope > 0.0) {
            fallbacks += 1;
            d = gram.solve(&g);
            slope = linalg::dot(&g, &d);
        }
        let y0 = dual.y.clone();
        let ls = armijo(-eval.theta, -slope, 1e-4, 40, |alpha| {
            let mut y = y0.clone();
            linalg::axpy(alpha, &d, &mut y);
            let dp = DualPoint { y, z: vec![] };
            let (e, j) = eval_theta_jac(p, &dp)?;
            let progress = linalg::norm(&e.grad_y) < 0.9 * gnorm;
            Ok((-e.theta, progress, (dp, e, j)))
        })?;
        match ls {
            Step::Accepted {
                alpha,
                state: (dp, e, j),
                ..
            } => {
                if alpha < 1.0 {
                    damped += 1;
                }
                dual = dp;
                eval = e;
                jac = j;
            }
            Step::Failed { .. } => {
                report.status = Status::NumericalFailure;
                report
                    .notes
                    .push(format!("line search failed at Newton iteration {k}"));
                break;
            }
        }
        k += 1;
    }
    if fallbacks > 0 {
        report.notes.push(format!(
            "{fallbacks} gradient fallback step(s) after CG breakdown"
        ));
    }
    if damped > 0 {
        report.notes.push(format!(
            "{damped} of {k} steps were damped by the line search"
        ));
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

/// `H·d` at the dual point `y`, for checking the Newton model.
pub fn newton_hessian_apply(p: &ProjectionProblem, y: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let dp = DualPoint {
        y: y.to_vec(),
        z: vec![],
    };
    let (_, jac) = eval_theta_jac(p, &dp)?;
    NewtonOperator {
        a: &p.eq,
        jac,
        shift: 0.0,
    }
    .apply(d)
}
