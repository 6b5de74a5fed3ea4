//! The constant-stepsize projected gradient baseline and the nonmonotone
//! projected gradient method.

mod config;
mod npg;
mod pg;

use serde::{Deserialize, Serialize};

pub use config::{Certification, PgConfig, SolverConfig, DEFAULT_MAX_ITER};
pub use npg::npg_solve;
pub use pg::{pg_solve, pg_solve_with};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, dot, nnz, norm_sq, sub, Support};
use crate::objectives::SmoothObjective;
use crate::sets::SymmetricSet;
use crate::stationarity::{feasibility_tol, stationarity_report, uniform_grid, StationarityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Swap,
    SupportChangeAcceptHx,
    SupportChangeAcceptTx,
    ProjectedGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FTol,
    MaxIter,
}

/// One accepted move from `x^k` to `x^{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub k: usize,
    pub step_kind: StepKind,
    /// `f(x^{k+1})`.
    pub f_value: f64,
    /// Accepted stepsize; `None` for swaps.
    pub stepsize_used: Option<f64>,
    pub support: Support,
    /// Trial points evaluated by the line search (one for a fixed stepsize).
    pub backtrack_count: usize,
    /// Value the accepted point was compared against.
    pub f_reference: f64,
    pub step_norm: f64,
    /// `x^{k+1}`, kept only when iterate recording is on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub records: Vec<IterateRecord>,
    pub f_initial: f64,
    pub x_final: Vec<f64>,
    pub f_final: f64,
    pub iterations: usize,
    pub wall_time_seconds: f64,
    pub termination: Termination,
    pub certificate: Option<StationarityReport>,
}

impl IterateTrace {
    pub fn cardinality(&self) -> usize {
        nnz(&self.x_final)
    }

    pub fn max_backtracks(&self) -> usize {
        self.records.iter().map(|r| r.backtrack_count).max().unwrap_or(0)
    }
}

/// Barzilai–Borwein stepsize `‖Δx‖²/|ΔxᵀΔg|` clamped to `[t_min, t_max]`;
/// `t_max` when `ΔxᵀΔg = 0`.
pub fn bb_initial_stepsize(
    x_cur: &[f64],
    x_prev: &[f64],
    g_cur: &[f64],
    g_prev: &[f64],
    t_min: f64,
    t_max: f64,
) -> f64 {
    let dx = sub(x_cur, x_prev);
    let dg = sub(g_cur, g_prev);
    let curv = dot(&dx, &dg).abs();
    if curv == 0.0 {
        return t_max;
    }
    (norm_sq(&dx) / curv).clamp(t_min, t_max)
}

fn check_start<F: SmoothObjective>(obj: &F, set: &SymmetricSet, s: usize, x0: &[f64]) -> Result<()> {
    let n = obj.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x0.len(),
        });
    }
    if s == 0 || s >= n {
        return Err(Error::InvalidSparsity { s, n });
    }
    if !all_finite(x0) {
        return Err(Error::NonFinite("x0"));
    }
    let k = nnz(x0);
    if k > s {
        return Err(Error::InfeasibleStart(format!("x0 has {k} nonzeros, more than s = {s}")));
    }
    if !set.contains(x0, 1e2 * feasibility_tol(x0)) {
        return Err(Error::InfeasibleStart(format!("x0 lies outside {set}")));
    }
    Ok(())
}

fn certify<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    t_max: f64,
    cert: Option<Certification>,
) -> Option<StationarityReport> {
    let c = cert?;
    let grid = uniform_grid(t_max, c.grid_points);
    Some(stationarity_report(obj, set, s, x, &grid, c.tol))
}
