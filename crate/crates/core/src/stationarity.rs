//! Support-gap stepsize rule and numeric checks of three optimality conditions.
//!
//! For `x` with `0 < ‖x‖₀ < n` the gap function
//!
//! ```text
//! γ(t; x) = min_{i ∈ supp(x)} p(x − t∇f(x))_i − max_{j ∉ supp(x)} p(x − t∇f(x))_j
//! ```
//!
//! measures how safely the support of `x` survives a gradient step of length
//! `t`. [`beta_theta`] returns its minimum `ϑ` over `[0, T̄]` together with the
//! largest minimizer `β`, in time linear in `‖x‖₀`.
//!
//! The checkers test, on a finite grid of stepsizes, whether `x` is a fixed
//! point of the sparse projected gradient map (general), the unique such
//! fixed point (strong), or satisfies the per-support fixed-point and one
//! coordinate swap conditions (coordinatewise).

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy_step, dist, dist_sq, nnz, norm_inf, seeded_rng, support_of, Support};
use crate::objectives::SmoothObjective;
use crate::projection::{
    binomial, brute_force_project, certify_point, default_uniqueness_tol, embed, for_each_combination,
    project_sparse_point, BRUTE_FORCE_LIMIT,
};
use crate::sets::{SetKind, SymmetricSet};
use crate::subroutines::swap_candidates;

/// Above this many super supports the coordinatewise check samples instead of enumerating.
pub const SUPER_SUPPORT_LIMIT: u128 = 10_000;

/// Default number of grid points for the stepsize grid.
pub const DEFAULT_GRID_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaTheta {
    pub beta: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub general: bool,
    pub strong: bool,
    pub coordinatewise: bool,
    /// Largest violation found: distance of a projection from `x`, or the
    /// shortfall of the uniqueness gap below its threshold.
    pub worst_violation: f64,
    /// A feasible point with strictly smaller objective, when one was found.
    pub witness: Option<Vec<f64>>,
    pub witness_value: Option<f64>,
    pub value: f64,
    /// False when the coordinatewise check had to sample super supports.
    pub exhaustive: bool,
}

/// `n` evenly spaced points covering `[0, t_max]`, endpoints included.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_max],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

/// The gap function at a single stepsize.
pub fn gamma(set: &SymmetricSet, x: &[f64], grad: &[f64], t: f64) -> Result<f64> {
    let k = nnz(x);
    if k == 0 || k == x.len() {
        return Err(Error::DegenerateSupport { nnz: k, n: x.len() });
    }
    Ok(gamma_unchecked(set, x, grad, t))
}

pub(crate) fn gamma_unchecked(set: &SymmetricSet, x: &[f64], grad: &[f64], t: f64) -> f64 {
    let mut on = f64::INFINITY;
    let mut off = f64::NEG_INFINITY;
    for (xi, gi) in x.iter().zip(grad) {
        let p = set.p(xi - t * gi);
        if *xi != 0.0 {
            on = on.min(p);
        } else {
            off = off.max(p);
        }
    }
    on - off
}

fn tie_tol(v: f64) -> f64 {
    1e-12 * (1.0 + v.abs())
}

/// Minimum `ϑ` of `γ(·; x)` over `[0, t_bar]` and its largest minimizer `β`.
///
/// When `x = 0` or `x` has no zero entries, returns `β = t_bar, ϑ = 0`.
pub fn beta_theta(set: &SymmetricSet, x: &[f64], grad: &[f64], t_bar: f64) -> BetaTheta {
    let n = x.len();
    let k = nnz(x);
    if k == 0 || k == n {
        return BetaTheta { beta: t_bar, theta: 0.0 };
    }
    match set.kind() {
        SetKind::Nonnegative => {
            // γ is a minimum of affine functions, hence concave: the minimum
            // over an interval sits at an endpoint.
            let g0 = gamma_unchecked(set, x, grad, 0.0);
            let g1 = gamma_unchecked(set, x, grad, t_bar);
            if g1 <= g0 + tie_tol(g0) {
                BetaTheta { beta: t_bar, theta: g1 }
            } else {
                BetaTheta { beta: 0.0, theta: g0 }
            }
        }
        SetKind::SignFree => {
            // γ(t) = min_i φ_i(t) with φ_i(t) = |x_i − t g_i| − αt convex
            // piecewise linear; each φ_i is minimized over its breakpoints.
            let alpha = x
                .iter()
                .zip(grad)
                .filter(|(xi, _)| **xi == 0.0)
                .map(|(_, gi)| gi.abs())
                .fold(0.0, f64::max);
            let mut best = BetaTheta {
                beta: 0.0,
                theta: f64::INFINITY,
            };
            let mut consider = |t: f64, v: f64| {
                if best.theta.is_infinite() || v < best.theta - tie_tol(best.theta) {
                    best = BetaTheta { beta: t, theta: v };
                } else if v <= best.theta + tie_tol(best.theta) && t > best.beta {
                    best.beta = t;
                    best.theta = best.theta.min(v);
                }
            };
            for (xi, gi) in x.iter().zip(grad) {
                if *xi == 0.0 {
                    continue;
                }
                let phi = |t: f64| (xi - t * gi).abs() - alpha * t;
                consider(0.0, phi(0.0));
                if *gi != 0.0 {
                    let kink = (xi / gi).clamp(0.0, t_bar);
                    consider(kink, phi(kink));
                }
                consider(t_bar, phi(t_bar));
            }
            best
        }
    }
}

/// Whether `x` is a fixed point of the sparse projected gradient map for
/// every stepsize in `grid`, up to ties in the projection.
pub fn check_general_stationary<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    grid: &[f64],
    tol: f64,
) -> bool {
    stationarity_report(obj, set, s, x, grid, tol).general
}

/// General and strong stationarity (coordinatewise is filled in as well).
pub fn check_strong_stationary<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    grid: &[f64],
    tol: f64,
) -> StationarityReport {
    stationarity_report(obj, set, s, x, grid, tol)
}

/// Per-support fixed-point condition plus the one-coordinate swap inequality.
pub fn check_coordinatewise<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    grid: &[f64],
    tol: f64,
) -> bool {
    let grad = obj.gradient(x);
    coordinatewise(obj, set, s, x, &grad, grid, tol).0
}

/// Runs all three checks and collects a witness of non-optimality if one turns up.
pub fn stationarity_report<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    grid: &[f64],
    tol: f64,
) -> StationarityReport {
    let (value, grad) = obj.value_and_gradient(x);
    let n = x.len();
    let mut general = true;
    let mut strong = true;
    let mut worst: f64 = 0.0;
    let mut witness: Option<(Vec<f64>, f64)> = None;
    let offer = |cand: &[f64], witness: &mut Option<(Vec<f64>, f64)>| {
        if witness.is_some() {
            return;
        }
        let fc = obj.value(cand);
        if fc < value {
            *witness = Some((cand.to_vec(), fc));
        }
    };
    let small = n <= 20 && binomial(n, s) <= BRUTE_FORCE_LIMIT;

    for &t in grid {
        let a = axpy_step(x, t, &grad);
        let (y, _) = project_sparse_point(set, s, &a);
        let gap = dist(&y, x);
        if gap > tol {
            strong = false;
            worst = worst.max(gap);
            // x may still be another member of the projection set
            if (dist_sq(x, &a) - dist_sq(&y, &a)).abs() > tol {
                general = false;
            }
            offer(&y, &mut witness);
            continue;
        }
        let utol = default_uniqueness_tol(&a);
        if certify_point(set, s, &a, &y, utol) {
            continue;
        }
        // Uniqueness not certified by the gap test: enumerate if small,
        // otherwise try the tied swap directly.
        let shortfall = utol - crate::projection::support_gap(set, &a, &y);
        if small {
            if let Ok(all) = brute_force_project(set, s, &a) {
                if all.len() > 1 {
                    strong = false;
                    worst = worst.max(shortfall);
                    for p in all.iter().filter(|p| dist(&p.point, x) > tol) {
                        offer(&p.point, &mut witness);
                    }
                }
                continue;
            }
        }
        strong = false;
        worst = worst.max(shortfall);
        if let Some(alt) = tied_alternative(set, &a, &y) {
            if (dist_sq(&alt, &a) - dist_sq(&y, &a)).abs() <= tol && dist(&alt, x) > tol {
                offer(&alt, &mut witness);
            }
        }
    }

    let (coordinatewise, exhaustive) = coordinatewise(obj, set, s, x, &grad, grid, tol);
    let (witness, witness_value) = match witness {
        Some((w, fw)) => (Some(w), Some(fw)),
        None => (None, None),
    };
    StationarityReport {
        general,
        strong,
        coordinatewise,
        worst_violation: worst,
        witness,
        witness_value,
        value,
        exhaustive,
    }
}

/// Swaps the weakest on-support index of `y` for the strongest off-support
/// index of `a` and re-projects.
fn tied_alternative(set: &SymmetricSet, a: &[f64], y: &[f64]) -> Option<Vec<f64>> {
    let supp = support_of(y, 0.0);
    let off = supp.complement(a.len());
    let i = *supp
        .indices()
        .iter()
        .min_by(|&&p, &&q| set.p(a[p]).partial_cmp(&set.p(a[q])).unwrap())?;
    let j = *off
        .iter()
        .max_by(|&&p, &&q| set.p(a[p]).partial_cmp(&set.p(a[q])).unwrap().then(q.cmp(&p)))?;
    let mut t: Vec<usize> = supp.indices().iter().copied().filter(|&k| k != i).collect();
    t.push(j);
    let t = Support::from_indices(t);
    Some(embed(set, a, t.indices()))
}

/// Returns (condition holds, super supports were enumerated exhaustively).
fn coordinatewise<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    grad: &[f64],
    grid: &[f64],
    tol: f64,
) -> (bool, bool) {
    let n = x.len();
    let supp = support_of(x, 0.0);
    if supp.len() > s {
        return (false, true);
    }
    // All super supports of size s.
    let free = supp.complement(n);
    let extra = s - supp.len();
    let total = binomial(free.len(), extra);
    let mut supports: Vec<Vec<usize>> = Vec::new();
    let exhaustive = total <= SUPER_SUPPORT_LIMIT;
    if exhaustive {
        for_each_combination(free.len(), extra, |c| {
            let mut t = supp.indices().to_vec();
            t.extend(c.iter().map(|&k| free[k]));
            t.sort_unstable();
            supports.push(t);
        });
    } else {
        let mut rng = seeded_rng(0x5eed);
        let mut pool = free.clone();
        for _ in 0..SUPER_SUPPORT_LIMIT {
            let (chosen, _) = pool.partial_shuffle(&mut rng, extra);
            let mut t = supp.indices().to_vec();
            t.extend_from_slice(chosen);
            t.sort_unstable();
            supports.push(t);
        }
    }

    let fixed_point = grid.iter().filter(|t| **t > 0.0).any(|&t| {
        supports.iter().all(|tset| {
            let a_t: Vec<f64> = tset.iter().map(|&i| x[i] - t * grad[i]).collect();
            let y_t = set.project_sub(&a_t);
            tset.iter().zip(&y_t).all(|(&i, yi)| (yi - x[i]).abs() <= tol)
        })
    });
    if !fixed_point {
        return (false, exhaustive);
    }

    let value = obj.value(x);
    let swap_ok = match swap_candidates(set, x, grad) {
        None => true,
        Some(cands) => cands.iter().all(|c| value <= obj.value(c) + tol),
    };
    (swap_ok, exhaustive)
}

/// Convenience: report on the default 50-point grid over `[0, t_max]`.
pub fn default_report<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    s: usize,
    x: &[f64],
    t_max: f64,
    tol: f64,
) -> StationarityReport {
    let grid = uniform_grid(t_max, DEFAULT_GRID_POINTS);
    stationarity_report(obj, set, s, x, &grid, tol)
}

/// Absolute feasibility tolerance scaled to `x`.
pub fn feasibility_tol(x: &[f64]) -> f64 {
    1e-12 * (1.0 + norm_inf(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Objective;

    const FULL: SymmetricSet = SymmetricSet::FullSpace;

    #[test]
    fn gamma_examples() {
        let x = [2.0, 0.0];
        let g = [1.0, -3.0];
        assert!((gamma(&SymmetricSet::NonnegOrthant, &x, &g, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma(&FULL, &x, &g, 1.0).unwrap() + 2.0).abs() < 1e-15);
        for set in SymmetricSet::CATALOG {
            assert_eq!(gamma(&set, &x, &[0.0, 0.0], 7.0).unwrap(), 2.0);
        }
        assert!(matches!(gamma(&FULL, &[0.0, 0.0], &g, 1.0), Err(Error::DegenerateSupport { .. })));
        assert!(matches!(gamma(&FULL, &[1.0, 2.0], &g, 1.0), Err(Error::DegenerateSupport { .. })));
    }

    #[test]
    fn beta_theta_examples() {
        let x = [2.0, 0.0];
        let g = [1.0, -3.0];
        let bt = beta_theta(&SymmetricSet::NonnegOrthant, &x, &g, 0.25);
        assert_eq!(bt.beta, 0.25);
        assert!((bt.theta - 1.0).abs() < 1e-15);
        let bt = beta_theta(&FULL, &x, &g, 1.0);
        assert_eq!(bt.beta, 1.0);
        assert!((bt.theta + 2.0).abs() < 1e-15);
        for set in SymmetricSet::CATALOG {
            assert_eq!(beta_theta(&set, &[0.0, 0.0], &g, 0.7), BetaTheta { beta: 0.7, theta: 0.0 });
        }
    }

    #[test]
    fn beta_prefers_largest_minimizer() {
        // constant gap: every t is a minimizer
        let bt = beta_theta(&FULL, &[2.0, 0.0], &[0.0, 0.0], 0.3);
        assert_eq!(bt, BetaTheta { beta: 0.3, theta: 2.0 });
        let bt = beta_theta(&SymmetricSet::NonnegOrthant, &[2.0, 0.0], &[0.0, 0.0], 0.3);
        assert_eq!(bt, BetaTheta { beta: 0.3, theta: 2.0 });
    }

    #[test]
    fn beta_keeps_minimum_at_zero() {
        // φ grows away from t = 0, so β = 0
        let bt = beta_theta(&FULL, &[0.0, 0.0, 0.629], &[-0.488, 0.316, -1.576], 1.8);
        assert_eq!(bt.beta, 0.0);
        assert!((bt.theta - 0.629).abs() < 1e-15);
        let bt = beta_theta(&FULL, &[-1.3, -1.4, 0.0], &[0.6, 1.4, 0.06], 0.3);
        assert_eq!(bt, BetaTheta { beta: 0.0, theta: 1.3 });
    }

    #[test]
    fn grid_helper() {
        assert_eq!(uniform_grid(1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_grid(2.0, 50).len(), 50);
        assert_eq!(*uniform_grid(2.0, 50).last().unwrap(), 2.0);
    }

    #[test]
    fn general_examples() {
        let grid = uniform_grid(0.995, 50);
        let f = Objective::distance_to(&[3.0, 0.0, 1.0]);
        assert!(check_general_stationary(&f, &FULL, 1, &[3.0, 0.0, 0.0], &grid, 1e-9));
        assert!(!check_general_stationary(&f, &FULL, 1, &[0.0, 0.0, 1.0], &grid, 1e-9));
        // zero gradient at a feasible point
        let f = Objective::distance_to(&[0.0, 2.0, 0.0]);
        assert!(check_general_stationary(&f, &FULL, 1, &[0.0, 2.0, 0.0], &grid, 1e-9));
    }

    #[test]
    fn strong_examples() {
        let grid = uniform_grid(0.995, 50);
        let f = Objective::distance_to(&[3.0, 1.0]);
        let r = check_strong_stationary(&f, &FULL, 1, &[3.0, 0.0], &grid, 1e-9);
        assert!(r.strong && r.general && r.witness.is_none());

        let r = check_strong_stationary(&f, &FULL, 1, &[0.0, 1.0], &grid, 1e-9);
        assert!(!r.strong);
        let w = r.witness.expect("witness");
        assert!(w[0] > 1.0 && w[1] == 0.0);
        assert!(f.value(&w) < f.value(&[0.0, 1.0]));

        // ∇f = 0 with ‖x‖₀ < s
        let f = Objective::distance_to(&[0.0, 2.0, 0.0, 0.0]);
        let r = check_strong_stationary(&f, &FULL, 2, &[0.0, 2.0, 0.0, 0.0], &grid, 1e-9);
        assert!(r.strong && r.coordinatewise);
    }

    #[test]
    fn tie_is_general_but_not_strong() {
        // f = ½‖x − (1,1)‖², x = (1,0): at t = 1 the step lands on (1,1),
        // whose two 1-sparse projections are (1,0) and (0,1). Smaller t keeps
        // a strict gap, so only the t = 1 grid point sees the tie.
        let f = Objective::distance_to(&[1.0, 1.0]);
        let r = check_strong_stationary(&f, &FULL, 1, &[1.0, 0.0], &[0.0, 0.5, 1.0], 1e-9);
        assert!(r.general);
        assert!(!r.strong);
        // t = 1 is not below 1/L, so the alternative need not improve f
        assert!(r.witness.is_none());
    }

    #[test]
    fn coordinatewise_examples() {
        let grid = uniform_grid(0.995, 50);
        let f = Objective::distance_to(&[3.0, 1.0]);
        assert!(check_coordinatewise(&f, &FULL, 1, &[3.0, 0.0], &grid, 1e-9));
        assert!(!check_coordinatewise(&f, &FULL, 1, &[0.0, 1.0], &grid, 1e-9));
        let f = Objective::distance_to(&[0.0, -1.5, 0.0]);
        assert!(check_coordinatewise(&f, &FULL, 2, &[0.0, -1.5, 0.0], &grid, 1e-9));
    }

    #[test]
    fn coordinatewise_holds_at_exhaustive_global_minimizers() {
        use crate::linalg::{seeded_rng, Matrix};
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = seeded_rng(41);
        let (m, n, s) = (8, 6, 2);
        for _ in 0..20 {
            let data: Vec<f64> = (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = Matrix::from_row_major(m, n, data.clone()).unwrap();
            let f = Objective::least_squares(a, b.clone()).unwrap();
            // oracle: least squares on every support of size s via nalgebra SVD
            let dense = nalgebra::DMatrix::from_row_slice(m, n, &data);
            let rhs = nalgebra::DVector::from_vec(b);
            let mut best = (f64::INFINITY, vec![0.0; n]);
            for_each_combination(n, s, |t| {
                let cols = dense.select_columns(t);
                let sol = cols.svd(true, true).solve(&rhs, 1e-14).unwrap();
                let mut x = vec![0.0; n];
                for (k, &i) in t.iter().enumerate() {
                    x[i] = sol[k];
                }
                let v = f.value(&x);
                if v < best.0 {
                    best = (v, x);
                }
            });
            let grid = uniform_grid(0.995 / f.lipschitz(), 50);
            assert!(check_coordinatewise(&f, &FULL, s, &best.1, &grid, 1e-8));
            let r = check_strong_stationary(&f, &FULL, s, &best.1, &grid, 1e-8);
            assert!(r.strong, "{r:?}");
        }
    }
}
