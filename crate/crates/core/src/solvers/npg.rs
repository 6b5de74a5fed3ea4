use std::collections::VecDeque;
use std::time::Instant;

use super::{bb_initial_stepsize, certify, check_start, IterateRecord, IterateTrace, SolverConfig, StepKind, Termination};
use crate::error::{Error, Result};
use crate::linalg::{axpy_step, dist, dist_sq, nnz, support_of};
use crate::objectives::SmoothObjective;
use crate::projection::project_sparse_point;
use crate::sets::SymmetricSet;
use crate::stationarity::beta_theta;
use crate::subroutines::{change_support_with, coordinate_swap_with};

/// Trial points allowed beyond the theoretical bound before giving up.
const EXTRA_TRIALS: usize = 60;

struct Accepted {
    x: Vec<f64>,
    f: f64,
    grad: Vec<f64>,
    kind: StepKind,
    stepsize: Option<f64>,
    trials: usize,
    reference: f64,
}

/// Nonmonotone projected gradient method.
///
/// Each iteration tries, in order: a coordinate swap when `k mod N = 0`, a
/// support change when `k mod N = q` and the support gap is at most `η`, and
/// otherwise a projected gradient step with a Barzilai–Borwein initial
/// stepsize and nonmonotone backtracking over the last `M + 1` values.
pub fn npg_solve<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<IterateTrace> {
    check_start(obj, set, s, x0)?;
    let l = obj.lipschitz();
    config.validate(l)?;
    let n = x0.len();
    let max_trials = config.backtrack_bound(l) + EXTRA_TRIALS;

    let start = Instant::now();
    let mut x = x0.to_vec();
    let (mut fx, mut grad) = obj.value_and_gradient(&x);
    if !fx.is_finite() {
        return Err(Error::NonFinite("objective"));
    }
    let f_initial = fx;
    let mut history: VecDeque<f64> = VecDeque::from([fx]);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut records = Vec::new();
    let mut termination = Termination::MaxIter;

    for k in 0..config.max_iter {
        let k_nnz = nnz(&x);
        let degenerate = k_nnz == 0 || k_nnz == n;
        let phase = k % config.n_cycle;
        let mut step: Option<Accepted> = None;

        if !degenerate && phase == 0 {
            let y = coordinate_swap_with(obj, set, &x, fx, &grad);
            if y != x {
                let (fy, gy) = obj.value_and_gradient(&y);
                step = Some(Accepted {
                    x: y,
                    f: fy,
                    grad: gy,
                    kind: StepKind::Swap,
                    stepsize: None,
                    trials: 0,
                    reference: fx,
                });
            }
        } else if !degenerate && phase == config.q {
            step = support_change(obj, set, s, &x, fx, &grad, config);
        }

        let step = match step {
            Some(st) => st,
            None => {
                let t0 = match &prev {
                    Some((xp, gp)) => bb_initial_stepsize(&x, xp, &grad, gp, config.t_min, config.t_max),
                    None => config.t_initial.clamp(config.t_min, config.t_max),
                };
                let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut t = t0;
                let mut trials = 0;
                loop {
                    trials += 1;
                    let (w, _) = project_sparse_point(set, s, &axpy_step(&x, t, &grad));
                    let fw = obj.value(&w);
                    if fw <= reference - 0.5 * config.c2 * dist_sq(&w, &x) {
                        let gw = obj.gradient(&w);
                        break Accepted {
                            x: w,
                            f: fw,
                            grad: gw,
                            kind: StepKind::ProjectedGradient,
                            stepsize: Some(t),
                            trials,
                            reference,
                        };
                    }
                    if trials >= max_trials {
                        return Err(Error::LineSearchFailed(k));
                    }
                    t *= config.tau_shrink;
                }
            }
        };

        if !step.f.is_finite() {
            return Err(Error::NonFinite("objective"));
        }
        records.push(IterateRecord {
            k,
            step_kind: step.kind,
            f_value: step.f,
            stepsize_used: step.stepsize,
            support: support_of(&step.x, 0.0),
            backtrack_count: step.trials,
            f_reference: step.reference,
            step_norm: dist(&step.x, &x),
            point: config.record_iterates.then(|| step.x.clone()),
        });
        let change = (step.f - fx).abs();
        let old_x = std::mem::replace(&mut x, step.x);
        let old_g = std::mem::replace(&mut grad, step.grad);
        prev = Some((old_x, old_g));
        fx = step.f;
        history.push_back(fx);
        while history.len() > config.memory + 1 {
            history.pop_front();
        }
        if change <= config.f_tol {
            termination = Termination::FTol;
            break;
        }
    }

    let wall_time_seconds = start.elapsed().as_secs_f64();
    let certificate = certify(obj, set, s, &x, config.t_bar, config.certification);
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

/// Step 2: project at the gap-minimizing stepsize `β`, then try moving the
/// weakest indices off the support. `None` falls through to a gradient step.
fn support_change<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    fx: f64,
    grad: &[f64],
    config: &SolverConfig,
) -> Option<Accepted> {
    let bt = beta_theta(set, x, grad, config.t_bar);
    if bt.theta > config.eta {
        return None;
    }
    let beta = bt.beta;
    let x_tilde = if beta == 0.0 {
        x.to_vec()
    } else {
        project_sparse_point(set, s, &axpy_step(x, beta, grad)).0
    };
    let (f_tilde, g_tilde) = obj.value_and_gradient(&x_tilde);
    let k = nnz(&x_tilde);
    if k > 0 && k < x.len() {
        let x_hat = change_support_with(set, &x_tilde, &g_tilde, beta);
        let (f_hat, g_hat) = obj.value_and_gradient(&x_hat);
        if f_hat <= f_tilde - 0.5 * config.c1 * dist_sq(&x_hat, &x_tilde) {
            return Some(Accepted {
                x: x_hat,
                f: f_hat,
                grad: g_hat,
                kind: StepKind::SupportChangeAcceptHx,
                stepsize: Some(beta),
                trials: 0,
                reference: f_tilde,
            });
        }
    }
    (beta > 0.0).then(|| Accepted {
        x: x_tilde,
        f: f_tilde,
        grad: g_tilde,
        kind: StepKind::SupportChangeAcceptTx,
        stepsize: Some(beta),
        trials: 0,
        reference: fx,
    })
}
