//! Two-set schemes for `min ½‖x − c‖²` over `K ∩ {x : Ax = b}`:
//! alternating projections, Dykstra's correction, and the alternating
//! direction method on the split `x ∈ K, y ∈ P, x = y`.

use std::time::Instant;

use crate::affine::{gram_factorize, project_affine, AffineMap, GramFactor};
use crate::cones::{project_cone, BlockPoint, ConeSpec};
use crate::dualproj::ProjectionProblem;
use crate::error::{Error, Result};
use crate::linalg;
use crate::report::{SolveReport, Status};

/// `K` and the affine set `P = {x : Ax = b}`, with `AAᵀ` factorized.
#[derive(Debug, Clone)]
pub struct TwoSetProblem {
    pub c: BlockPoint,
    pub cone: ConeSpec,
    pub eq: AffineMap,
    gram: GramFactor,
}

impl TwoSetProblem {
    pub fn new(c: BlockPoint, eq: AffineMap, cone: ConeSpec) -> Result<Self> {
        let p = ProjectionProblem::equality(c, eq, cone)?;
        Self::from_projection(&p)
    }

    pub fn from_projection(p: &ProjectionProblem) -> Result<Self> {
        if p.m_ineq() > 0 {
            return Err(Error::Unsupported(
                "two-set schemes take equality constraints only".into(),
            ));
        }
        let gram = gram_factorize(&p.eq)?;
        Ok(TwoSetProblem {
            c: p.c.clone(),
            cone: p.cone.clone(),
            eq: p.eq.clone(),
            gram,
        })
    }

    pub fn project_affine(&self, x: &BlockPoint) -> Result<BlockPoint> {
        project_affine(&self.eq, x, &self.gram)
    }

    pub fn project_cone(&self, x: &BlockPoint) -> Result<BlockPoint> {
        project_cone(&self.cone, x)
    }
}

#[derive(Debug, Clone)]
pub struct AltOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Keep every `(x_k, y_k)` pair.
    pub record_iterates: bool,
}

impl AltOptions {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        AltOptions {
            max_iter,
            tol,
            record_iterates: false,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Input(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Last cone iterate `x ∈ K`, last affine iterate `y ∈ P`.
///
/// In the report, `primal_residual` is `‖Ax − b‖` and `dual_residual` the
/// scheme's second stopping quantity (`‖x − y‖` for the projection
/// schemes, `β‖y_k − y_{k−1}‖` for the alternating direction method).
#[derive(Debug, Clone)]
pub struct AltSolution {
    pub x: BlockPoint,
    pub y: BlockPoint,
    pub report: SolveReport,
    pub iterates: Vec<(BlockPoint, BlockPoint)>,
}

fn finish(
    p: &TwoSetProblem,
    mut report: SolveReport,
    x: BlockPoint,
    y: BlockPoint,
    second: f64,
    iterates: Vec<(BlockPoint, BlockPoint)>,
    start: Instant,
) -> AltSolution {
    report.primal_residual = linalg::norm(&p.eq.residual(&x));
    report.dual_residual = second;
    report.objective = 0.5 * x.sub(&p.c).norm().powi(2);
    report.wall_time = start.elapsed();
    AltSolution {
        x,
        y,
        report,
        iterates,
    }
}

/// `x_{k+1} = P_K(y_k)`, `y_{k+1} = P_P(x_{k+1})` from `y₀ = P_P(c)`.
///
/// Converges to some point of `K ∩ P`, in general not the projection of
/// `c`. Stops when `‖x − y‖` and `‖Ax − b‖` are both below `tol`.
pub fn alternating_projections(p: &TwoSetProblem, opts: &AltOptions) -> Result<AltSolution> {
    opts.check()?;
    let start = Instant::now();
    let mut report = SolveReport::new("alternating_projections");
    let mut iterates = Vec::new();
    let mut y = p.project_affine(&p.c)?;
    let mut x;
    let mut gap;
    let mut k = 0;
    loop {
        x = p.project_cone(&y)?;
        y = p.project_affine(&x)?;
        k += 1;
        if opts.record_iterates {
            iterates.push((x.clone(), y.clone()));
        }
        gap = x.sub(&y).norm();
        if gap <= opts.tol && linalg::norm(&p.eq.residual(&x)) <= opts.tol {
            report.status = Status::Converged;
            break;
        }
        if k >= opts.max_iter {
            report.status = Status::IterationLimit;
            break;
        }
    }
    report.iterations = k;
    Ok(finish(p, report, x, y, gap, iterates, start))
}

/// Dykstra's corrected alternating projections
///
/// ```text
/// x_{k+1} = P_K(z_k),  y_{k+1} = P_P(x_{k+1}),  z_{k+1} = z_k − (x_{k+1} − y_{k+1})
/// ```
///
/// from `z₀ = c`. Then `z_k = c + Aᵀŷ_k` where `ŷ` follows the
/// fixed-metric dual gradient method, so `x_{k+1} = x(ŷ_k)` iterate for
/// iterate. Stops when `‖x_k − y_k‖ ≤ tol`.
pub fn dykstra(p: &TwoSetProblem, opts: &AltOptions) -> Result<AltSolution> {
    opts.check()?;
    let start = Instant::now();
    let mut report = SolveReport::new("dykstra");
    let mut iterates = Vec::new();
    let mut z = p.c.clone();
    let mut x;
    let mut y;
    let mut gap;
    let mut k = 0;
    loop {
        x = p.project_cone(&z)?;
        y = p.project_affine(&x)?;
        z.axpy(-1.0, &x);
        z.axpy(1.0, &y);
        k += 1;
        if opts.record_iterates {
            iterates.push((x.clone(), y.clone()));
        }
        gap = x.sub(&y).norm();
        if gap <= opts.tol {
            report.status = Status::Converged;
            break;
        }
        if k >= opts.max_iter {
            report.status = Status::IterationLimit;
            break;
        }
    }
    report.iterations = k;
    Ok(finish(p, report, x, y, gap, iterates, start))
}

/// Alternating direction method on `min ½‖x − c‖² + ½‖y − c‖²`,
/// `x = y`, `x ∈ K`, `y ∈ P`:
///
/// ```text
/// x_{k+1} = P_K((βy_k + z_k + c)/(1 + β))
/// y_{k+1} = P_P((βx_{k+1} − z_k + c)/(1 + β))
/// z_{k+1} = z_k − β(x_{k+1} − y_{k+1})
/// ```
///
/// from `y₀ = P_P(c)`, `z₀ = 0`. Stops when
/// `max(‖x_k − y_k‖, β‖y_k − y_{k−1}‖) ≤ tol`.
pub fn admm_projection(p: &TwoSetProblem, beta: f64, opts: &AltOptions) -> Result<AltSolution> {
    opts.check()?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Input(format!("beta must be positive, got {beta}")));
    }
    let start = Instant::now();
    let mut report = SolveReport::new("admm");
    let mut iterates = Vec::new();
    let s = 1.0 / (1.0 + beta);
    let mut y = p.project_affine(&p.c)?;
    let mut z = BlockPoint::zeros(&p.cone);
    let mut x;
    let mut second;
    let mut k = 0;
    loop {
        let mut w = y.scaled(beta);
        w.axpy(1.0, &z);
        w.axpy(1.0, &p.c);
        x = p.project_cone(&w.scaled(s))?;
        let mut v = x.scaled(beta);
        v.axpy(-1.0, &z);
        v.axpy(1.0, &p.c);
        let y_next = p.project_affine(&v.scaled(s))?;
        let diff = x.sub(&y_next);
        z.axpy(-beta, &diff);
        let dy = beta * y_next.sub(&y).norm();
        y = y_next;
        k += 1;
        if opts.record_iterates {
            iterates.push((x.clone(), y.clone()));
        }
        second = dy;
        if diff.norm().max(dy) <= opts.tol {
            report.status = Status::Converged;
            break;
        }
        if k >= opts.max_iter {
            report.status = Status::IterationLimit;
            break;
        }
    }
    report.iterations = k;
    report.notes.push(format!("beta = {beta}"));
    Ok(finish(p, report, x, y, second, iterates, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::RowBuilder;
    use crate::linalg::SymMatrix;
    use crate::polysos::build_nearcorr;

    fn two_by_two() -> TwoSetProblem {
        let c = SymMatrix::from_row_slice(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        TwoSetProblem::from_projection(&build_nearcorr(&c).unwrap()).unwrap()
    }

    fn assert_all_ones(x: &BlockPoint, tol: f64) {
        for v in &x.data {
            assert!((v - 1.0).abs() <= tol, "{x:?}");
        }
    }

    #[test]
    fn dykstra_two_by_two() {
        let sol = dykstra(&two_by_two(), &AltOptions::new(10_000, 1e-13)).unwrap();
        assert!(sol.report.converged());
        assert_all_ones(&sol.x, 1e-8);
    }

    #[test]
    fn admm_two_by_two_all_betas() {
        for beta in [0.1, 1.0, 10.0] {
            let sol =
                admm_projection(&two_by_two(), beta, &AltOptions::new(100_000, 1e-13)).unwrap();
            assert!(sol.report.converged(), "beta {beta}: {:?}", sol.report);
            assert_all_ones(&sol.x, 1e-8);
        }
    }

    #[test]
    fn alternating_reaches_intersection() {
        let p = two_by_two();
        let sol = alternating_projections(&p, &AltOptions::new(10_000, 1e-10)).unwrap();
        assert!(sol.report.converged());
        assert!(sol.report.primal_residual <= 1e-8);
        assert!(crate::cones::cone_violation(&p.cone, &sol.x).unwrap() <= 1e-12);
    }

    #[test]
    fn feasible_center_is_fixed() {
        let c = SymMatrix::from_row_slice(2, &[1.0, 0.3, 0.3, 1.0]).unwrap();
        let p = TwoSetProblem::from_projection(&build_nearcorr(&c).unwrap()).unwrap();
        let opts = AltOptions::new(100, 1e-12);
        for sol in [
            alternating_projections(&p, &opts).unwrap(),
            dykstra(&p, &opts).unwrap(),
            admm_projection(&p, 1.0, &opts).unwrap(),
        ] {
            assert_eq!(sol.report.iterations, 1, "{}", sol.report.solver);
            assert_eq!(sol.x, p.c);
        }
    }

    #[test]
    fn infeasible_toy_hits_the_limit() {
        let cone = ConeSpec::psd(2);
        let row = RowBuilder::new(&cone).sym(0, 0, 0, 1.0).build();
        let eq = AffineMap::from_rows(4, vec![row], vec![-1.0]).unwrap();
        let p = TwoSetProblem::new(BlockPoint::zeros(&cone), eq, cone).unwrap();
        let sol = alternating_projections(&p, &AltOptions::new(200, 1e-8)).unwrap();
        assert_eq!(sol.report.status, Status::IterationLimit);
        assert!(sol.report.dual_residual > 0.5);
    }
}
