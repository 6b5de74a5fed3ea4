use std::time::Instant;

use super::{certify, check_start, Certification, IterateRecord, IterateTrace, PgConfig, StepKind, Termination};
use crate::error::{Error, Result};
use crate::linalg::{axpy_step, dist, support_of};
use crate::objectives::SmoothObjective;
use crate::projection::project_sparse_point;
use crate::sets::SymmetricSet;

/// Projected gradient with constant stepsize `alpha`, certified on the
/// default grid over `[0, alpha]`.
pub fn pg_solve<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x0: &[f64],
    alpha: f64,
    f_tol: f64,
    max_iter: usize,
) -> Result<IterateTrace> {
    let config = PgConfig {
        alpha,
        f_tol,
        max_iter,
        certification: Some(Certification::default()),
        record_iterates: false,
    };
    pg_solve_with(obj, set, s, x0, &config)
}

pub fn pg_solve_with<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x0: &[f64],
    config: &PgConfig,
) -> Result<IterateTrace> {
    let PgConfig {
        alpha,
        f_tol,
        max_iter,
        certification,
        record_iterates,
    } = *config;
    check_start(obj, set, s, x0)?;
    let l = obj.lipschitz();
    if !(alpha > 0.0 && alpha * l < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1/L) with L = {l}, got {alpha}")));
    }
    if !(f_tol >= 0.0) || max_iter == 0 {
        return Err(Error::InvalidConfig("f_tol must be nonnegative and max_iter positive".into()));
    }

    let start = Instant::now();
    let mut x = x0.to_vec();
    let (mut fx, mut grad) = obj.value_and_gradient(&x);
    let f_initial = fx;
    let mut records = Vec::new();
    let mut termination = Termination::MaxIter;
    for k in 0..max_iter {
        let (y, _) = project_sparse_point(set, s, &axpy_step(&x, alpha, &grad));
        let (fy, gy) = obj.value_and_gradient(&y);
        if !fy.is_finite() {
            return Err(Error::NonFinite("objective"));
        }
        records.push(IterateRecord {
            k,
            step_kind: StepKind::ProjectedGradient,
            f_value: fy,
            stepsize_used: Some(alpha),
            support: support_of(&y, 0.0),
            backtrack_count: 1,
            f_reference: fx,
            step_norm: dist(&x, &y),
            point: record_iterates.then(|| y.clone()),
        });
        let change = (fy - fx).abs();
        x = y;
        fx = fy;
        grad = gy;
        if change <= f_tol {
            termination = Termination::FTol;
            break;
        }
    }
    let wall_time_seconds = start.elapsed().as_secs_f64();
    let certificate = certify(obj, set, s, &x, alpha, certification);
    Ok(IterateTrace {
        iterations: records.len(),
        records,
        f_initial,
        f_final: fx,
        x_final: x,
        wall_time_seconds,
        termination,
        certificate,
    })
}
