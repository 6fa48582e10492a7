//! Step-size rules for minimizing `φ(α) = f(x + α d)` with `φ'(0) < 0`.

use crate::error::Result;

const APPROX_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub(crate) struct WolfeParams {
    pub c1: f64,
    pub c2: f64,
    pub max_trials: usize,
}

impl Default for WolfeParams {
    fn default() -> Self {
        WolfeParams {
            c1: 1e-4,
            c2: 0.9,
            max_trials: 40,
        }
    }
}

#[derive(Debug)]
pub(crate) enum Step<T> {
    Accepted { alpha: f64, state: T, trials: usize },
    Failed { trials: usize },
}

/// Weak Wolfe search by bisection/expansion bracketing, starting at `α = 1`.
///
/// Near a solution the decrease in `φ` drops below its rounding error, so a
/// step is also accepted under the approximate Wolfe conditions of Hager and
/// Zhang: `(2c₁ − 1)φ'(0) ≥ φ'(α) ≥ c₂φ'(0)` and `φ(α) ≤ φ(0) + ε|φ(0)|`.
///
/// `phi(α)` returns `(φ(α), φ'(α), state)`.
pub(crate) fn weak_wolfe<T>(
    f0: f64,
    df0: f64,
    params: WolfeParams,
    mut phi: impl FnMut(f64) -> Result<(f64, f64, T)>,
) -> Result<Step<T>> {
    debug_assert!(df0 < 0.0);
    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    let mut alpha = 1.0;
    let noise = APPROX_EPS * f0.abs();
    for trial in 1..=params.max_trials {
        let (f, df, state) = phi(alpha)?;
        let approx = f.is_finite()
            && f <= f0 + noise
            && df <= (2.0 * params.c1 - 1.0) * df0
            && df >= params.c2 * df0;
        if approx {
            return Ok(Step::Accepted {
                alpha,
                state,
                trials: trial,
            });
        }
        if !f.is_finite() || f > f0 + params.c1 * alpha * df0 {
            hi = alpha;
        } else if df < params.c2 * df0 {
            lo = alpha;
        } else {
            return Ok(Step::Accepted {
                alpha,
                state,
                trials: trial,
            });
        }
        alpha = if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            2.0 * alpha
        };
    }
    Ok(Step::Failed {
        trials: params.max_trials,
    })
}

/// Armijo backtracking by halving, starting at `α = 1`.
///
/// `phi(α)` returns `(φ(α), progress, state)`; when `φ` is flat to rounding
/// (`φ(α) ≤ φ(0) + ε|φ(0)|`) a step is still accepted if the caller reports
/// progress by another measure.
pub(crate) fn armijo<T>(
    f0: f64,
    df0: f64,
    c1: f64,
    max_trials: usize,
    mut phi: impl FnMut(f64) -> Result<(f64, bool, T)>,
) -> Result<Step<T>> {
    let mut alpha = 1.0;
    let noise = APPROX_EPS * f0.abs();
    for trial in 1..=max_trials {
        let (f, progress, state) = phi(alpha)?;
        if f.is_finite() && (f <= f0 + c1 * alpha * df0 || (progress && f <= f0 + noise)) {
            return Ok(Step::Accepted {
                alpha,
                state,
                trials: trial,
            });
        }
        alpha *= 0.5;
    }
    Ok(Step::Failed { trials: max_trials })
}
