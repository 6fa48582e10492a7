//! Regularization (proximal point / dual augmented Lagrangian) methods for
//! linear conic programs.
//!
//! Each outer iteration applies the proximal map of the conic program at
//! `p` with parameter `t`, which is the conic projection
//!
//! ```text
//! min ½‖x − (p − t·c)‖²  s.t.  Ax = b,  x ∈ K
//! ```
//!
//! solved by one of the dual projection methods. With inner multiplier
//! `t·y`, the inner primal point is `x(y) = P_K(p + t(Aᵀy − c))` and the
//! polar part of the same decomposition gives `u = P_{K°}(·)/t`, so every
//! outer triple `(p, y, u)` satisfies `p ∈ K`, `u ∈ K°`, `⟨p, u⟩ = 0`.

mod problem;

pub use crate::affine::gram_factorize;
pub use problem::LinearConicProblem;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cones::{moreau, BlockPoint};
use crate::dualproj::{
    solve_fixed_metric, solve_quasi_newton_with_memory, solve_ssnewton, DualOptions, DualPoint,
    LbfgsMemory, ProjectionProblem,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::report::{SolveReport, Status};

/// Inner solver of the regularization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerSolver {
    FixedMetric,
    QuasiNewton,
    Ssnewton,
    /// A single fixed-metric step per outer iteration (see [`solve_simple`]).
    OneIteration,
}

impl InnerSolver {
    pub fn name(self) -> &'static str {
        match self {
            InnerSolver::FixedMetric => "fixed_metric",
            InnerSolver::QuasiNewton => "quasi_newton",
            InnerSolver::Ssnewton => "ssnewton",
            InnerSolver::OneIteration => "one_iteration",
        }
    }
}

impl std::str::FromStr for InnerSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_metric" | "fixed-metric" | "gradient" => Ok(InnerSolver::FixedMetric),
            "quasi_newton" | "quasi-newton" | "bfgs" | "lbfgs" => Ok(InnerSolver::QuasiNewton),
            "ssnewton" | "newton" => Ok(InnerSolver::Ssnewton),
            "one_iteration" | "one-iteration" | "simple" => Ok(InnerSolver::OneIteration),
            other => Err(Error::Input(format!("unknown inner solver '{other}'"))),
        }
    }
}

/// Balancing rule for the prox parameter.
///
/// For the full method `t` is multiplied by `factor` when the primal
/// residual exceeds `ratio` times the dual one and divided in the opposite
/// case. The one-step scheme moves `t` the other way, since its multiplier
/// step scales with `1/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TUpdate {
    /// Rebalance when one residual exceeds the other by this factor.
    pub ratio: f64,
    pub factor: f64,
    pub min: f64,
    pub max: f64,
    /// Outer iterations between two changes of `t`.
    pub every: usize,
}

impl Default for TUpdate {
    fn default() -> Self {
        TUpdate {
            ratio: 10.0,
            factor: 2.0,
            min: 1e-4,
            max: 1e4,
            every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegParams {
    pub t0: f64,
    /// `None` keeps `t` constant.
    pub t_update: Option<TUpdate>,
    pub inner: InnerSolver,
    /// Inner tolerance `ε_k = max(outer_tol/10, ε₀/k^decay)`, in the same
    /// scaled units as the outer primal residual.
    pub eps0: f64,
    pub decay: f64,
    pub outer_tol: f64,
    pub outer_iter_cap: usize,
    /// `None` uses the inner solver's own default.
    pub inner_iter_cap: Option<usize>,
    /// Keep per-iteration residuals in the solution.
    pub record_history: bool,
}

impl Default for RegParams {
    fn default() -> Self {
        RegParams {
            t0: 1.0,
            t_update: None,
            inner: InnerSolver::QuasiNewton,
            eps0: 1.0,
            decay: 1.5,
            outer_tol: 1e-6,
            outer_iter_cap: 1000,
            inner_iter_cap: None,
            record_history: false,
        }
    }
}

impl RegParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::Input(format!(
                "t0 must be positive, got {}",
                self.t0
            )));
        }
        if !(self.decay > 1.0) {
            return Err(Error::Input(format!(
                "inner tolerance decay must exceed 1 for summability, got {}",
                self.decay
            )));
        }
        if !(self.eps0 > 0.0) || !(self.outer_tol > 0.0) {
            return Err(Error::Input("tolerances must be positive".into()));
        }
        if let Some(u) = &self.t_update {
            if !(u.ratio > 1.0 && u.factor > 1.0 && 0.0 < u.min && u.min <= u.max && u.every > 0) {
                return Err(Error::Input(format!(
                    "invalid prox parameter update rule {u:?}"
                )));
            }
        }
        Ok(())
    }

    /// Inner tolerance at outer iteration `k ≥ 1`.
    pub fn inner_tol(&self, k: usize) -> f64 {
        (self.outer_tol / 10.0).max(self.eps0 / (k as f64).powf(self.decay))
    }

    /// Upper bound on `Σ_k ε₀/k^decay` (integral test), finite since
    /// `decay > 1`.
    pub fn schedule_sum_bound(&self) -> f64 {
        self.eps0 * (1.0 + 1.0 / (self.decay - 1.0))
    }
}

/// Outer iterate `(p, y, u) ∈ K × ℝᵐ × K°`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateTriple {
    pub p: BlockPoint,
    pub y: Vec<f64>,
    pub u: BlockPoint,
}

/// Scaled residuals `‖Ap − b‖/(1+‖b‖)` and `‖Aᵀy − u − c‖/(1+‖c‖)`.
pub fn residuals(lcp: &LinearConicProblem, trip: &IterateTriple) -> (f64, f64) {
    let primal = linalg::norm(&lcp.a.residual(&trip.p)) / (1.0 + linalg::norm(lcp.b()));
    let mut r = lcp.a.adjoint(&trip.y);
    r.axpy(-1.0, &trip.u);
    r.axpy(-1.0, &lcp.c);
    let dual = r.norm() / (1.0 + lcp.c.norm());
    (primal, dual)
}

/// Warm-start state carried between proximal evaluations.
#[derive(Debug, Clone, Default)]
pub struct InnerState {
    pub memory: LbfgsMemory,
}

/// Result of one proximal evaluation.
#[derive(Debug, Clone)]
pub struct ProxResult {
    pub x: BlockPoint,
    pub y: Vec<f64>,
    pub u: BlockPoint,
    pub report: SolveReport,
}

/// The projection problem behind the proximal map at `p`.
pub fn prox_problem(lcp: &LinearConicProblem, p: &BlockPoint, t: f64) -> Result<ProjectionProblem> {
    let mut center = p.clone();
    center.axpy(-t, &lcp.c);
    ProjectionProblem::equality(center, lcp.a.clone(), lcp.cone.clone())
}

/// Proximal map of the conic program at `p`: returns `x`, the multiplier
/// `y` and `u = P_{K°}(p + t(Aᵀy − c))/t`, with `‖Ax − b‖ ≤ inner_tol`
/// unless the inner solver stopped early.
///
/// `y0` warm-starts the inner solve.
pub fn prox_eval(
    lcp: &LinearConicProblem,
    p: &BlockPoint,
    t: f64,
    inner: InnerSolver,
    inner_tol: f64,
    y0: Option<&[f64]>,
) -> Result<ProxResult> {
    let mut state = InnerState::default();
    prox_eval_with_state(lcp, p, t, inner, inner_tol, y0, None, &mut state)
}

#[allow(clippy::too_many_arguments)]
fn prox_eval_with_state(
    lcp: &LinearConicProblem,
    p: &BlockPoint,
    t: f64,
    inner: InnerSolver,
    inner_tol: f64,
    y0: Option<&[f64]>,
    inner_cap: Option<usize>,
    state: &mut InnerState,
) -> Result<ProxResult> {
    if !(t > 0.0) {
        return Err(Error::Input(format!(
            "prox parameter must be positive, got {t}"
        )));
    }
    let prob = prox_problem(lcp, p, t)?;
    let initial = y0.map(|y| DualPoint {
        y: y.iter().map(|v| t * v).collect(),
        z: vec![],
    });
    let opts = DualOptions {
        tol: Some(inner_tol),
        max_iter: match inner {
            InnerSolver::OneIteration => Some(1),
            _ => inner_cap,
        },
        initial,
        ..Default::default()
    };
    let sol = match inner {
        InnerSolver::FixedMetric | InnerSolver::OneIteration => solve_fixed_metric(&prob, &opts)?,
        InnerSolver::QuasiNewton => {
            solve_quasi_newton_with_memory(&prob, &opts, &mut state.memory)?
        }
        InnerSolver::Ssnewton => solve_ssnewton(&prob, &opts)?,
    };
    let y: Vec<f64> = sol.dual.y.iter().map(|v| v / t).collect();
    // polar part of the decomposition that produced sol.x
    let mut w = prob.c.clone();
    prob.eq.adjoint_add(&sol.dual.y, 1.0, &mut w);
    let polar = w.sub(&sol.x);
    Ok(ProxResult {
        x: sol.x,
        y,
        u: polar.scaled(1.0 / t),
        report: sol.report,
    })
}

/// Per-outer-iteration record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterRecord {
    pub primal: f64,
    pub dual: f64,
    /// `‖p_{k+1} − p_k‖`
    pub step: f64,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct RegSolution {
    pub triple: IterateTriple,
    pub report: SolveReport,
    pub history: Vec<OuterRecord>,
}

/// Flags growth of `‖y‖` by `1e6` over a window in which the primal
/// residual did not halve.
#[derive(Debug, Clone)]
struct DivergenceWatch {
    window: usize,
    mark: Option<(f64, f64)>,
}

impl DivergenceWatch {
    const WINDOW: usize = 500;

    fn new() -> Self {
        DivergenceWatch {
            window: Self::WINDOW,
            mark: None,
        }
    }

    fn check(&mut self, k: usize, ynorm: f64, primal: f64) -> bool {
        if !k.is_multiple_of(self.window) {
            return false;
        }
        let flagged = match self.mark {
            Some((y0, r0)) => ynorm > 1e6 * y0.max(1.0) && primal > 0.5 * r0,
            None => false,
        };
        self.mark = Some((ynorm, primal));
        flagged
    }
}

struct Balancer {
    rule: Option<TUpdate>,
    last_change: usize,
    inverted: bool,
}

impl Balancer {
    fn update(&mut self, k: usize, t: f64, primal: f64, dual: f64) -> f64 {
        let Some(rule) = self.rule else { return t };
        if k < self.last_change + rule.every {
            return t;
        }
        let (up, down) = if self.inverted {
            (1.0 / rule.factor, rule.factor)
        } else {
            (rule.factor, 1.0 / rule.factor)
        };
        let next = if primal > rule.ratio * dual {
            t * up
        } else if dual > rule.ratio * primal {
            t * down
        } else {
            t
        };
        let next = next.clamp(rule.min, rule.max);
        if next != t {
            self.last_change = k;
        }
        next
    }
}

fn finish(
    lcp: &LinearConicProblem,
    mut report: SolveReport,
    triple: IterateTriple,
    history: Vec<OuterRecord>,
    start: Instant,
) -> RegSolution {
    let (primal, dual) = residuals(lcp, &triple);
    report.primal_residual = primal;
    report.dual_residual = dual;
    report.objective = lcp.objective(&triple.p);
    report.dual_objective = Some(lcp.dual_objective(&triple.y));
    report.wall_time = start.elapsed();
    RegSolution {
        triple,
        report,
        history,
    }
}

/// Full regularization method: outer proximal iterations, each solved by a
/// dual projection method to the tolerance `ε_k`, warm-started from the
/// previous multiplier (and quasi-Newton memory).
///
/// Stops when both scaled residuals are below `outer_tol`.
pub fn solve_regularized(lcp: &LinearConicProblem, params: &RegParams) -> Result<RegSolution> {
    params.validate()?;
    if params.inner == InnerSolver::OneIteration {
        return solve_simple(lcp, params);
    }
    let start = Instant::now();
    let mut report = SolveReport::new(&format!("regularized/{}", params.inner.name()));
    let bscale = 1.0 + linalg::norm(lcp.b());
    let cscale = 1.0 + lcp.c.norm();
    let mut t = params.t0;
    let mut p = BlockPoint::zeros(&lcp.cone);
    let mut triple = IterateTriple {
        p: p.clone(),
        y: vec![0.0; lcp.m()],
        u: BlockPoint::zeros(&lcp.cone),
    };
    let mut state = InnerState::default();
    let mut history = Vec::new();
    let mut watch = DivergenceWatch::new();
    let mut balancer = Balancer {
        rule: params.t_update,
        last_change: 0,
        inverted: false,
    };
    let mut k = 0;
    let mut last_primal = f64::INFINITY;
    report.status = Status::IterationLimit;
    while k < params.outer_iter_cap {
        k += 1;
        // a warm start already inside a loose ε_k would make p_{k+1} = p_k
        let cap = (0.1 * last_primal).max(params.outer_tol / 10.0);
        let eps = params.inner_tol(k).min(cap) * bscale;
        let prox = prox_eval_with_state(
            lcp,
            &p,
            t,
            params.inner,
            eps,
            Some(&triple.y),
            params.inner_iter_cap,
            &mut state,
        )?;
        report.inner_iterations += prox.report.iterations;
        if prox.report.status == Status::NumericalFailure {
            report.notes.push(format!(
                "inner solver failed at outer iteration {k}; continuing from its last iterate"
            ));
        }
        let step = prox.x.sub(&p).norm();
        triple = IterateTriple {
            p: prox.x,
            y: prox.y,
            u: prox.u,
        };
        p = triple.p.clone();
        let primal = linalg::norm(&lcp.a.residual(&p)) / bscale;
        // Aᵀy − u − c = (p_{k+1} − p_k)/t
        let dual = step / (t * cscale);
        last_primal = primal;
        if params.record_history {
            history.push(OuterRecord {
                primal,
                dual,
                step,
                t,
            });
        }
        if primal.max(dual) <= params.outer_tol {
            report.status = Status::Converged;
            break;
        }
        if watch.check(k, linalg::norm(&triple.y), primal) {
            report.status = Status::SuspectedInfeasible;
            break;
        }
        let next = balancer.update(k, t, primal, dual);
        if next != t {
            state.memory.clear();
            t = next;
        }
    }
    report.iterations = k;
    report.notes.push(format!("final t = {t}"));
    Ok(finish(lcp, report, triple, history, start))
}

/// Regularization with a single dual step per outer iteration (boundary
/// point form):
///
/// ```text
/// y_{k+1} = [AAᵀ]⁻¹(A(c + u_k) + (b − A p_k)/t)
/// p_{k+1} = P_K(p_k + t(Aᵀy_{k+1} − c)),   u_{k+1} = P_{K°}(·)/t
/// ```
///
/// Using `A(c + u_k) = AAᵀy_k + A(p_{k−1} − p_k)/t` the first line is the
/// fixed-metric step `y_k + [AAᵀ]⁻¹(b − A p_k)/t` plus a momentum term.
/// `AAᵀ` is factorized once (diagonal when possible). The returned triple
/// satisfies `‖p_{k+1} − p_k‖ = t‖Aᵀy_{k+1} − u_{k+1} − c‖`.
pub fn solve_simple(lcp: &LinearConicProblem, params: &RegParams) -> Result<RegSolution> {
    params.validate()?;
    let start = Instant::now();
    let gram = gram_factorize(&lcp.a)?;
    let mut report = SolveReport::new("simple");
    if gram.is_diagonal() {
        report.notes.push("AAᵀ is diagonal".into());
    }
    let bscale = 1.0 + linalg::norm(lcp.b());
    let cscale = 1.0 + lcp.c.norm();
    let mut t = params.t0;
    let mut p = BlockPoint::zeros(&lcp.cone);
    let mut u = BlockPoint::zeros(&lcp.cone);
    let mut history = Vec::new();
    let mut watch = DivergenceWatch::new();
    let mut balancer = Balancer {
        rule: params.t_update,
        last_change: 0,
        inverted: true,
    };
    let mut triple;
    let mut k = 0;
    report.status = Status::IterationLimit;
    loop {
        k += 1;
        // y maximizes the inner dual exactly for the current (p, u)
        let mut cu = lcp.c.clone();
        cu.axpy(1.0, &u);
        let mut y = lcp.a.apply(&cu);
        let r = lcp.a.residual(&p);
        for (yi, ri) in y.iter_mut().zip(&r) {
            *yi -= ri / t;
        }
        gram.solve_in_place(&mut y);
        let mut w = lcp.a.adjoint(&y);
        w.axpy(-1.0, &lcp.c);
        let mut w = w.scaled(t);
        w.axpy(1.0, &p);
        let (p_next, polar) = moreau(&lcp.cone, &w)?;
        let step = p_next.sub(&p).norm();
        let primal = linalg::norm(&lcp.a.residual(&p_next)) / bscale;
        let dual = step / (t * cscale);
        u = polar.scaled(1.0 / t);
        p = p_next;
        triple = IterateTriple {
            p: p.clone(),
            y,
            u: u.clone(),
        };
        if params.record_history {
            history.push(OuterRecord {
                primal,
                dual,
                step,
                t,
            });
        }
        if primal.max(dual) <= params.outer_tol {
            report.status = Status::Converged;
            break;
        }
        if k >= params.outer_iter_cap {
            break;
        }
        if watch.check(k, linalg::norm(&triple.y), primal) {
            report.status = Status::SuspectedInfeasible;
            break;
        }
        t = balancer.update(k, t, primal, dual);
    }
    report.iterations = k;
    report.inner_iterations = k;
    Ok(finish(lcp, report, triple, history, start))
}
