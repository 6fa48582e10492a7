//! Native JSON problem format (covers second-order blocks, which SDPA
//! cannot express) and the JSON run report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::affine::{AffineMap, SparseRow};
use crate::cones::{BlockPoint, ConeSpec};
use crate::dualproj::ProjectionProblem;
use crate::error::{Error, Result};
use crate::regsolver::LinearConicProblem;
use crate::report::{SolveReport, Status};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonRow {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct JsonAffine {
    pub rows: Vec<JsonRow>,
    pub rhs: Vec<f64>,
}

/// ```json
/// { "cone": { "psd": [2], "soc": [3], "nonneg": 1 },
///   "c": [ ... ambient vector, PSD blocks row-major ... ],
///   "eq": { "rows": [ { "idx": [0, 3], "val": [1, 1] } ], "rhs": [1] },
///   "ineq": { "rows": [], "rhs": [] } }
/// ```
///
/// For a projection `c` is the point to project; for a linear conic
/// program it is the objective and `eq` holds `Ax = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NativeProblem {
    pub cone: ConeSpec,
    pub c: Vec<f64>,
    #[serde(default)]
    pub eq: JsonAffine,
    #[serde(default, skip_serializing_if = "is_empty_affine")]
    pub ineq: JsonAffine,
}

fn is_empty_affine(a: &JsonAffine) -> bool {
    a.rows.is_empty() && a.rhs.is_empty()
}

fn to_affine(j: &JsonAffine, dim: usize) -> Result<AffineMap> {
    let mut rows = Vec::with_capacity(j.rows.len());
    for (k, r) in j.rows.iter().enumerate() {
        if r.idx.len() != r.val.len() {
            return Err(Error::Shape(format!(
                "row {k} has {} indices but {} values",
                r.idx.len(),
                r.val.len()
            )));
        }
        rows.push(SparseRow::from_entries(
            r.idx.iter().copied().zip(r.val.iter().copied()).collect(),
        ));
    }
    AffineMap::from_rows(dim, rows, j.rhs.clone())
}

fn from_affine(a: &AffineMap) -> JsonAffine {
    JsonAffine {
        rows: a
            .rows()
            .iter()
            .map(|r| JsonRow {
                idx: r.idx.clone(),
                val: r.val.clone(),
            })
            .collect(),
        rhs: a.rhs.clone(),
    }
}

impl NativeProblem {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_projection(&self) -> Result<ProjectionProblem> {
        self.cone.validate()?;
        let dim = self.cone.ambient_dim();
        let c = BlockPoint::from_vec(&self.cone, self.c.clone())?;
        ProjectionProblem::new(
            c,
            to_affine(&self.eq, dim)?,
            to_affine(&self.ineq, dim)?,
            self.cone.clone(),
        )
    }

    pub fn to_linear_conic(&self) -> Result<LinearConicProblem> {
        if !is_empty_affine(&self.ineq) {
            return Err(Error::Unsupported(
                "linear conic programs take equality constraints only".into(),
            ));
        }
        self.cone.validate()?;
        let dim = self.cone.ambient_dim();
        let c = BlockPoint::from_vec(&self.cone, self.c.clone())?;
        LinearConicProblem::new(c, to_affine(&self.eq, dim)?, self.cone.clone())
    }

    pub fn from_projection(p: &ProjectionProblem) -> Self {
        NativeProblem {
            cone: p.cone.clone(),
            c: p.c.data.clone(),
            eq: from_affine(&p.eq),
            ineq: from_affine(&p.ineq),
        }
    }

    pub fn from_linear_conic(p: &LinearConicProblem) -> Self {
        NativeProblem {
            cone: p.cone.clone(),
            c: p.c.data.clone(),
            eq: from_affine(&p.a),
            ineq: JsonAffine::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dims {
    pub psd: Vec<usize>,
    pub soc: Vec<usize>,
    pub nonneg: usize,
    pub m: usize,
}

impl Dims {
    pub fn new(cone: &ConeSpec, m: usize) -> Self {
        Dims {
            psd: cone.psd.clone(),
            soc: cone.soc.clone(),
            nonneg: cone.nonneg,
            m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterations {
    pub outer: usize,
    pub inner: usize,
}

/// Report printed by the command-line tool.
///
/// `primal_residual` is `‖Ap − b‖/(1+‖b‖)` and `dual_residual`
/// `‖Aᵀy − u − c‖/(1+‖c‖)` for linear conic solves; projection solvers
/// report `‖Ax − b‖` and the complementarity defect of the inequality
/// multipliers instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub dims: Dims,
    pub solver: String,
    pub status: Status,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_objective: Option<f64>,
    pub iterations: Iterations,
    pub wall_time_ms: f64,
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Command-specific results (`theta`, `lower_bound`, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl JsonReport {
    pub fn new(command: &str, dims: Dims, report: &SolveReport, seed: Option<u64>) -> Self {
        JsonReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            dims,
            solver: report.solver.clone(),
            status: report.status,
            objective: report.objective,
            primal_residual: report.primal_residual,
            dual_residual: report.dual_residual,
            dual_objective: report.dual_objective,
            iterations: Iterations {
                outer: report.iterations,
                inner: report.inner_iterations,
            },
            wall_time_ms: report.wall_time.as_secs_f64() * 1e3,
            threads: report.threads,
            seed,
            values: BTreeMap::new(),
            notes: report.notes.clone(),
        }
    }

    pub fn with_value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
