use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Terminal state of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    IterationLimit,
    SuspectedInfeasible,
    NumericalFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::IterationLimit => "iteration_limit",
            Status::SuspectedInfeasible => "suspected_infeasible",
            Status::NumericalFailure => "numerical_failure",
        }
    }
}

/// What a solver reports next to its solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub status: Status,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    /// `bᵀy` for linear conic solves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_objective: Option<f64>,
    pub iterations: usize,
    pub inner_iterations: usize,
    #[serde(with = "duration_ms")]
    pub wall_time: Duration,
    /// Worker threads used by the per-iteration kernels.
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SolveReport {
    pub(crate) fn new(solver: &str) -> Self {
        SolveReport {
            solver: solver.to_string(),
            status: Status::IterationLimit,
            primal_residual: f64::INFINITY,
            dual_residual: 0.0,
            objective: f64::NAN,
            dual_objective: None,
            iterations: 0,
            inner_iterations: 0,
            wall_time: Duration::ZERO,
            threads: 1,
            notes: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(ms.max(0.0) / 1e3))
    }
}
