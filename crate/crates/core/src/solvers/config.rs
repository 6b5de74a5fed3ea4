use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stationarity::DEFAULT_GRID_POINTS;

/// How the final point of a solve is certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub grid_points: usize,
    pub tol: f64,
}

impl Default for Certification {
    fn default() -> Self {
        Certification {
            grid_points: DEFAULT_GRID_POINTS,
            tol: 1e-6,
        }
    }
}

/// Parameters of the nonmonotone projected gradient method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub t_min: f64,
    pub t_max: f64,
    /// Backtracking multiplier applied to the trial stepsize.
    pub tau_shrink: f64,
    pub t_bar: f64,
    pub c1: f64,
    pub c2: f64,
    pub eta: f64,
    /// Cycle length `N`.
    pub n_cycle: usize,
    /// Nonmonotone memory `M`.
    pub memory: usize,
    /// Phase of the support-change step within a cycle.
    pub q: usize,
    pub f_tol: f64,
    pub max_iter: usize,
    /// Initial trial stepsize of the first iteration, before clamping.
    pub t_initial: f64,
    /// `None` skips the final stationarity report.
    pub certification: Option<Certification>,
    /// Store every iterate in the trace.
    pub record_iterates: bool,
}

/// Parameters of the constant-stepsize projected gradient method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgConfig {
    pub alpha: f64,
    pub f_tol: f64,
    pub max_iter: usize,
    pub certification: Option<Certification>,
    pub record_iterates: bool,
}

pub const DEFAULT_MAX_ITER: usize = 100_000;

impl SolverConfig {
    /// The experimental settings: `T̄ = 0.995/L`, `t_min = T̄`, `t_max = 1e8`,
    /// `c₁ = min(0.995(1/T̄ − L), 1e-8)`, `c₂ = 1e-4`, `η = 1e3`, `f_tol = 1e-8`.
    pub fn with_defaults(lipschitz: f64, memory: usize, n_cycle: usize, q: usize) -> Self {
        let t_bar = 0.995 / lipschitz;
        SolverConfig {
            t_min: t_bar,
            t_max: 1e8,
            tau_shrink: 0.5,
            t_bar,
            c1: (0.995 * (1.0 / t_bar - lipschitz)).min(1e-8),
            c2: 1e-4,
            eta: 1e3,
            n_cycle,
            memory,
            q,
            f_tol: 1e-8,
            max_iter: DEFAULT_MAX_ITER,
            t_initial: 1.0,
            certification: Some(Certification::default()),
            record_iterates: false,
        }
    }

    /// Checks every range constraint against the Lipschitz constant `lipschitz`.
    pub fn validate(&self, lipschitz: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let finite = [
            self.t_min,
            self.t_max,
            self.tau_shrink,
            self.t_bar,
            self.c1,
            self.c2,
            self.eta,
            self.f_tol,
            self.t_initial,
        ];
        if finite.iter().any(|v| !v.is_finite()) || !lipschitz.is_finite() {
            return bad("parameters must be finite".into());
        }
        if !(0.0 < self.t_min && self.t_min < self.t_max) {
            return bad(format!("need 0 < t_min < t_max, got {} and {}", self.t_min, self.t_max));
        }
        if !(0.0 < self.tau_shrink && self.tau_shrink < 1.0) {
            return bad(format!("tau_shrink must lie in (0, 1), got {}", self.tau_shrink));
        }
        if !(0.0 < self.t_bar && self.t_bar * lipschitz < 1.0) {
            return bad(format!("t_bar must lie in (0, 1/L) with L = {lipschitz}, got {}", self.t_bar));
        }
        let c1_max = 1.0 / self.t_bar - lipschitz;
        if !(0.0 < self.c1 && self.c1 < c1_max) {
            return bad(format!("c1 must lie in (0, {c1_max}), got {}", self.c1));
        }
        if self.c2 <= 0.0 || self.eta <= 0.0 {
            return bad("c2 and eta must be positive".into());
        }
        if self.n_cycle < 3 || self.memory >= self.n_cycle || self.q == 0 || self.q >= self.n_cycle {
            return bad(format!(
                "need N >= 3, 0 <= M < N, 0 < q < N; got N = {}, M = {}, q = {}",
                self.n_cycle, self.memory, self.q
            ));
        }
        if self.f_tol < 0.0 || self.max_iter == 0 || self.t_initial <= 0.0 {
            return bad("f_tol must be nonnegative, max_iter and t_initial positive".into());
        }
        if let Some(c) = self.certification {
            if !(c.tol >= 0.0) {
                return bad("certification tolerance must be nonnegative".into());
            }
        }
        Ok(())
    }

    /// `max{⌊−(log(L + c₂) + log t_max)/log τ + 2⌋, 1}`: no line search needs more trial points.
    pub fn backtrack_bound(&self, lipschitz: f64) -> usize {
        let v = -((lipschitz + self.c2).ln() + self.t_max.ln()) / self.tau_shrink.ln() + 2.0;
        (v.floor().max(1.0)) as usize
    }

    /// Smallest stepsize the line search can accept.
    pub fn min_accepted_step(&self, lipschitz: f64) -> f64 {
        self.t_min.min(self.tau_shrink / (lipschitz + self.c2))
    }
}
