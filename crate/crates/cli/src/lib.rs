//! The `conproj` command-line tool.
//!
//! Every solving subcommand prints a [`JsonReport`] and exits with
//! 0 (converged), 2 (iteration limit or numerical failure),
//! 3 (suspected infeasible) or 4 (bad input).

mod args;
mod gen;

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use conproj::altschemes::{
    admm_projection, alternating_projections, dykstra, AltOptions, TwoSetProblem,
};
use conproj::dualproj::{solve_fixed_metric, solve_quasi_newton, solve_ssnewton};
use conproj::io::{
    parse_dense_matrix, parse_dimacs, parse_polynomial, parse_sdpa, write_dense_matrix, Dims,
    JsonReport, NativeProblem, SdpaOptions,
};
use conproj::polysos::{build_nearcorr, build_polymin, build_sos_feasibility, build_theta};
use conproj::regsolver::{solve_regularized, solve_simple, InnerSolver, RegSolution, TUpdate};
use conproj::{
    eig_sym, BlockPoint, DualOptions, DualPoint, Error, LinearConicProblem, ProjectionProblem,
    RegParams, Result, SolveReport, Status,
};
use log::{info, warn};
use serde::Serialize;

pub use args::Cli;
use args::*;

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_ITERATION_LIMIT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Environment variable capping the worker threads of `gen`.
pub const THREADS_ENV: &str = "CONIC_PROJ_THREADS";

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => EXIT_CONVERGED,
        Status::IterationLimit | Status::NumericalFailure => EXIT_ITERATION_LIMIT,
        Status::SuspectedInfeasible => EXIT_INFEASIBLE,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::EigenFailure { .. } => EXIT_ITERATION_LIMIT,
        _ => EXIT_INPUT,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
        }
    };
    init_logging(&cli);
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

fn init_logging(cli: &Cli) {
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    // repeated calls (tests) keep the first logger
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    log::set_max_level(level);
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Project(a) => project(a),
        Command::Solve(a) => solve(a),
        Command::Nearcorr(a) => nearcorr(a),
        Command::SosCheck(a) => sos_check(a),
        Command::Polymin(a) => polymin(a),
        Command::Theta(a) => theta(a),
        Command::Gen(a) => gen::run(a),
    }
}

/// Worker thread cap from `CONIC_PROJ_THREADS`, else the machine's
/// available parallelism.
pub fn thread_cap() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Input(format!(
                "{THREADS_ENV} must be a positive integer, got '{s}'"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } | Error::Json(_) | Error::Shape(_) | Error::Input(_) => {
            Error::Input(format!("{}: {e}", path.display()))
        }
        other => other,
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit(report: &JsonReport, common: &Common) -> Result<i32> {
    let mut text = report.to_json()?;
    text.push('\n');
    write_output(common.out.as_deref(), &text)?;
    info!(
        "{}: {} after {} iterations ({:.1} ms)",
        report.command,
        report.status.as_str(),
        report.iterations.outer,
        report.wall_time_ms
    );
    Ok(exit_code(report.status))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_output(Some(path), &text)
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load_conic(path: &Path, lenient: bool) -> Result<LinearConicProblem> {
    let text = read_file(path)?;
    in_file(
        path,
        if is_json(path) {
            NativeProblem::from_json(&text).and_then(|np| np.to_linear_conic())
        } else {
            parse_sdpa(&text, SdpaOptions { lenient })
        },
    )
}

/// Solution of a projection: the point `x` and the multipliers.
#[derive(Serialize)]
struct ProjectionFile<'a> {
    x: &'a [f64],
    y: &'a [f64],
    z: &'a [f64],
}

/// Solution of a conic solve: primal `x ∈ K`, multiplier `y` and the
/// polar slack `u`.
#[derive(Serialize)]
struct ConicFile<'a> {
    x: &'a [f64],
    y: &'a [f64],
    u: &'a [f64],
}

fn run_projection(
    p: &ProjectionProblem,
    solver: ProjSolver,
    beta: f64,
    common: &Common,
) -> Result<(BlockPoint, DualPoint, SolveReport)> {
    let alt = || -> Result<(TwoSetProblem, AltOptions)> {
        let two = TwoSetProblem::from_projection(p)?;
        Ok((
            two,
            AltOptions::new(
                common.max_iter.unwrap_or(10_000),
                common.tol.unwrap_or(1e-8),
            ),
        ))
    };
    let dual_opts = DualOptions {
        tol: common.tol,
        max_iter: common.max_iter,
        ..Default::default()
    };
    let no_dual = || DualPoint::zeros(p);
    Ok(match solver {
        ProjSolver::Dykstra => {
            let (two, o) = alt()?;
            let s = dykstra(&two, &o)?;
            (s.x, no_dual(), s.report)
        }
        ProjSolver::Admm => {
            let (two, o) = alt()?;
            let s = admm_projection(&two, beta, &o)?;
            (s.x, no_dual(), s.report)
        }
        ProjSolver::Alternating => {
            let (two, o) = alt()?;
            let s = alternating_projections(&two, &o)?;
            (s.x, no_dual(), s.report)
        }
        ProjSolver::FixedMetric => {
            let s = solve_fixed_metric(p, &dual_opts)?;
            (s.x, s.dual, s.report)
        }
        ProjSolver::QuasiNewton => {
            let s = solve_quasi_newton(p, &dual_opts)?;
            (s.x, s.dual, s.report)
        }
        ProjSolver::Ssnewton => {
            let s = solve_ssnewton(p, &dual_opts)?;
            (s.x, s.dual, s.report)
        }
    })
}

fn project(a: ProjectArgs) -> Result<i32> {
    let text = read_file(&a.problem)?;
    let mut p = in_file(
        &a.problem,
        if is_json(&a.problem) {
            NativeProblem::from_json(&text).and_then(|np| np.to_projection())
        } else {
            parse_sdpa(&text, SdpaOptions { lenient: a.lenient })
                .and_then(|l| ProjectionProblem::equality(l.c, l.a, l.cone))
        },
    )?;
    if let Some(cpath) = &a.center {
        let ctext = read_file(cpath)?;
        let vals = ctext
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>().map_err(|e| {
                    Error::Input(format!("{}: bad number '{s}': {e}", cpath.display()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let c = in_file(cpath, BlockPoint::from_vec(&p.cone, vals))?;
        p = ProjectionProblem::new(c, p.eq, p.ineq, p.cone)?;
    }
    let (x, dual, report) = run_projection(&p, a.solver, a.beta, &a.common)?;
    if let Some(path) = &a.common.solution {
        write_json(
            path,
            &ProjectionFile {
                x: &x.data,
                y: &dual.y,
                z: &dual.z,
            },
        )?;
    }
    let dims = Dims::new(&p.cone, p.m_eq() + p.m_ineq());
    emit(
        &JsonReport::new("project", dims, &report, a.common.seed),
        &a.common,
    )
}

/// Largest `|m_ij − m_ji|` of a dense matrix file that parsed already.
fn asymmetry(text: &str) -> f64 {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter_map(|s| s.parse().ok())
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate().skip(i + 1) {
            worst = worst.max((v - rows[j][i]).abs());
        }
    }
    worst
}

fn nearcorr(a: NearcorrArgs) -> Result<i32> {
    let text = read_file(&a.matrix)?;
    let c = in_file(&a.matrix, parse_dense_matrix(&text))?;
    let asym = asymmetry(&text);
    if asym > 1e-12 * (1.0 + c.frobenius_norm()) {
        warn!(
            "{}: matrix is not symmetric (max |m_ij - m_ji| = {asym:e}), using (M + Mᵀ)/2",
            a.matrix.display()
        );
    }
    let p = build_nearcorr(&c)?;
    let (x, _, report) = run_projection(&p, a.solver, a.beta, &a.common)?;
    if let Some(path) = &a.common.solution {
        write_output(Some(path), &write_dense_matrix(&x.psd_block(&p.cone, 0)))?;
    }
    let dims = Dims::new(&p.cone, p.m_eq());
    emit(
        &JsonReport::new("nearcorr", dims, &report, a.common.seed),
        &a.common,
    )
}

fn run_conic(lcp: &LinearConicProblem, conic: &ConicOpts, common: &Common) -> Result<RegSolution> {
    let mut params = RegParams {
        t0: conic.t0,
        t_update: conic.balance.then(TUpdate::default),
        outer_tol: common.tol.unwrap_or(1e-6),
        outer_iter_cap: common.max_iter.unwrap_or(10_000),
        ..Default::default()
    };
    let sol = match conic.solver {
        ConicSolver::Simple => solve_simple(lcp, &params)?,
        other => {
            params.inner = match other {
                ConicSolver::FixedMetric => InnerSolver::FixedMetric,
                ConicSolver::QuasiNewton => InnerSolver::QuasiNewton,
                _ => InnerSolver::Ssnewton,
            };
            solve_regularized(lcp, &params)?
        }
    };
    if let Some(path) = &common.solution {
        let t = &sol.triple;
        write_json(
            path,
            &ConicFile {
                x: &t.p.data,
                y: &t.y,
                u: &t.u.data,
            },
        )?;
    }
    Ok(sol)
}

fn conic_report(
    command: &str,
    lcp: &LinearConicProblem,
    sol: &RegSolution,
    common: &Common,
) -> JsonReport {
    JsonReport::new(
        command,
        Dims::new(&lcp.cone, lcp.m()),
        &sol.report,
        common.seed,
    )
}

fn min_gram_eigenvalue(lcp: &LinearConicProblem, sol: &RegSolution) -> Result<f64> {
    let x = sol.triple.p.psd_block(&lcp.cone, 0);
    Ok(eig_sym(&x)?
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

fn solve(a: SolveArgs) -> Result<i32> {
    let lcp = load_conic(&a.problem, a.lenient)?;
    let sol = run_conic(&lcp, &a.conic, &a.common)?;
    emit(&conic_report("solve", &lcp, &sol, &a.common), &a.common)
}

fn sos_check(a: SosCheckArgs) -> Result<i32> {
    let p = in_file(&a.polynomial, parse_polynomial(&read_file(&a.polynomial)?))?;
    let d = a.degree.unwrap_or(p.degree().div_ceil(2));
    let lcp = build_sos_feasibility(&p, d)?;
    let sol = run_conic(&lcp, &a.conic, &a.common)?;
    let report = conic_report("sos-check", &lcp, &sol, &a.common)
        .with_value("basis_degree", d as f64)
        .with_value("min_eigenvalue", min_gram_eigenvalue(&lcp, &sol)?);
    emit(&report, &a.common)
}

fn polymin(a: PolyminArgs) -> Result<i32> {
    let p = in_file(&a.polynomial, parse_polynomial(&read_file(&a.polynomial)?))?;
    let (lcp, offset) = build_polymin(&p)?;
    let sol = run_conic(&lcp, &a.conic, &a.common)?;
    let report = conic_report("polymin", &lcp, &sol, &a.common)
        .with_value("lower_bound", offset - sol.report.objective)
        .with_value("min_eigenvalue", min_gram_eigenvalue(&lcp, &sol)?);
    emit(&report, &a.common)
}

fn theta(a: ThetaArgs) -> Result<i32> {
    let g = in_file(&a.graph, parse_dimacs(&read_file(&a.graph)?))?;
    let lcp = build_theta(&g)?;
    let sol = run_conic(&lcp, &a.conic, &a.common)?;
    // the SDP minimizes −⟨J, X⟩; the report is in terms of θ itself
    let mut report =
        conic_report("theta", &lcp, &sol, &a.common).with_value("theta", -sol.report.objective);
    report.objective = -report.objective;
    report.dual_objective = report.dual_objective.map(|v| -v);
    emit(&report, &a.common)
}
