use std::collections::VecDeque;
use std::time::Instant;

use super::linesearch::{weak_wolfe, Step, WolfeParams};
use super::{
    eval_theta, finish_report, DualEval, DualOptions, DualPoint, DualSolution, ProjectionProblem,
};
use crate::error::Result;
use crate::linalg;
use crate::report::{SolveReport, Status};

const DEFAULT_MAX_ITER: usize = 1000;

/// Curvature pairs `(s, y)` of a limited-memory BFGS model of `−θ`.
///
/// Kept outside the solver so that a sequence of related solves (the inner
/// loop of the regularization method) can carry it over.
#[derive(Debug, Clone, Default)]
pub struct LbfgsMemory {
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

impl LbfgsMemory {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    fn push(&mut self, s: Vec<f64>, y: Vec<f64>, cap: usize) -> bool {
        let sy = linalg::dot(&s, &y);
        if !(sy > 1e-12 * linalg::norm(&s) * linalg::norm(&y)) || cap == 0 {
            return false;
        }
        if self.pairs.len() == cap {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
        true
    }

    /// Two-loop recursion: returns `H·g`.
    fn apply_inverse(&self, g: &[f64], gamma0: f64) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let a = rho * linalg::dot(s, &q);
            linalg::axpy(-a, y, &mut q);
            alphas.push(a);
        }
        let gamma = match self.pairs.back() {
            Some((s, y, _)) => linalg::dot(s, y) / linalg::dot(y, y),
            None => gamma0,
        };
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in self.pairs.iter().zip(alphas.into_iter().rev()) {
            let b = rho * linalg::dot(y, &q);
            linalg::axpy(a - b, s, &mut q);
        }
        q
    }
}

/// Limited-memory BFGS on `−θ` with a weak Wolfe line search.
///
/// Inequality multipliers are kept feasible by clamping `z` at zero after
/// each trial step; directions are cut on active bounds and curvature
/// pairs are skipped whenever the clamp was active.
pub fn solve_quasi_newton(p: &ProjectionProblem, opts: &DualOptions) -> Result<DualSolution> {
    let mut memory = LbfgsMemory::default();
    solve_quasi_newton_with_memory(p, opts, &mut memory)
}

/// As [`solve_quasi_newton`], starting from and updating `memory`.
pub fn solve_quasi_newton_with_memory(
    p: &ProjectionProblem,
    opts: &DualOptions,
    memory: &mut LbfgsMemory,
) -> Result<DualSolution> {
    let start = Instant::now();
    let tol = opts.tol_for(p);
    let max_iter = opts.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let m_eq = p.m_eq();
    let mut report = SolveReport::new("quasi_newton");
    let mut dual = opts.start(p)?;
    let mut iterates = Vec::new();

    // Initial inverse-Hessian scale: 1 / max ‖A_i‖², a lower bound on 1/L.
    let max_row =
        p.eq.rows()
            .iter()
            .chain(p.ineq.rows())
            .map(|r| r.norm_sq())
            .fold(0.0, f64::max);
    let gamma0 = if max_row > 0.0 { 1.0 / max_row } else { 1.0 };

    let mut eval = eval_theta(p, &dual)?;
    let mut k = 0;
    let mut evals = 1;
    loop {
        if opts.record_iterates {
            iterates.push(eval.x.clone());
        }
        if eval.projected_grad_norm(&dual.z) <= tol {
            report.status = Status::Converged;
            break;
        }
        if k >= max_iter {
            report.status = Status::IterationLimit;
            break;
        }
        let lam = dual.flat();
        // f = −θ, ∇f = −∇θ
        let g: Vec<f64> = eval.grad_flat().iter().map(|v| -v).collect();

        let mut step = None;
        for attempt in 0..2 {
            if attempt == 1 {
                memory.clear();
            }
            let mut d: Vec<f64> = memory
                .apply_inverse(&g, gamma0)
                .iter()
                .map(|v| -v)
                .collect();
            cut_active(&mut d, &lam, m_eq);
            let df0 = linalg::dot(&g, &d);
            if !(df0 < 0.0) {
                continue;
            }
            let out = weak_wolfe(-eval.theta, df0, WolfeParams::default(), |alpha| {
                let (trial, hit) = trial_point(&lam, &d, alpha, m_eq);
                let dp = DualPoint::from_flat(&trial, m_eq);
                let e = eval_theta(p, &dp)?;
                let dphi = -linalg::dot(&e.grad_flat(), &d);
                Ok((-e.theta, dphi, (dp, e, hit)))
            })?;
            match out {
                Step::Accepted { state, trials, .. } => {
                    evals += trials;
                    step = Some(state);
                    break;
                }
                Step::Failed { trials } => evals += trials,
            }
        }
        let Some((new_dual, new_eval, hit)) = step else {
            report.status = Status::NumericalFailure;
            report
                .notes
                .push(format!("line search failed at iteration {k}"));
            break;
        };
        if !hit {
            let s = linalg::sub(&new_dual.flat(), &lam);
            let gn: Vec<f64> = new_eval.grad_flat().iter().map(|v| -v).collect();
            let yv = linalg::sub(&gn, &g);
            memory.push(s, yv, opts.memory);
        }
        dual = new_dual;
        eval = new_eval;
        k += 1;
    }
    report.iterations = k;
    report.inner_iterations = evals;
    finish(p, report, eval, dual, iterates, start)
}

fn finish(
    p: &ProjectionProblem,
    mut report: SolveReport,
    eval: DualEval,
    dual: DualPoint,
    iterates: Vec<crate::cones::BlockPoint>,
    start: Instant,
) -> Result<DualSolution> {
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

/// Zeroes direction components that would push an active `z_i = 0` negative.
fn cut_active(d: &mut [f64], lam: &[f64], m_eq: usize) {
    for i in m_eq..lam.len() {
        if lam[i] <= 0.0 && d[i] < 0.0 {
            d[i] = 0.0;
        }
    }
}

fn trial_point(lam: &[f64], d: &[f64], alpha: f64, m_eq: usize) -> (Vec<f64>, bool) {
    let mut t: Vec<f64> = lam.iter().zip(d).map(|(l, di)| l + alpha * di).collect();
    let mut hit = false;
    for v in &mut t[m_eq..] {
        if *v < 0.0 {
            *v = 0.0;
            hit = true;
        }
    }
    (t, hit)
}
