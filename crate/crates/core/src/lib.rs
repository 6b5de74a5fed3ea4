//! Projected gradient methods for minimizing a smooth function over
//! `{x : ‖x‖₀ ≤ s} ∩ Ω`, where `Ω` is a permutation-invariant closed convex set.
//!
//! The main entry points are [`npg_solve`] (nonmonotone projected gradient with
//! coordinate swaps and support changes) and [`pg_solve`] (constant-stepsize
//! projected gradient, a.k.a. iterative hard thresholding when `Ω = ℝⁿ`).

pub mod error;
pub mod experiment;
pub mod instances;
pub mod linalg;
pub mod objectives;
pub mod projection;
pub mod sets;
pub mod solvers;
pub mod stationarity;
pub mod subroutines;

pub use error::{Error, Result};
pub use experiment::{run_benchmark, solve_instance, BenchCase, BenchOptions, BenchReport, BenchRow, Method};
pub use instances::{Family, Instance};
pub use linalg::{seeded_rng, sorting_permutation, support_of, Matrix, Rng, Support};
pub use objectives::{Loss, Objective, SmoothObjective};
pub use projection::{brute_force_project, certify_unique, project_sparse, SparseProjection};
pub use sets::{SetKind, SymmetricSet};
pub use solvers::{
    bb_initial_stepsize, npg_solve, pg_solve, pg_solve_with, Certification, IterateRecord, IterateTrace, PgConfig, SolverConfig, StepKind, Termination,
};
pub use stationarity::{
    beta_theta, check_coordinatewise, check_general_stationary, check_strong_stationary, gamma, BetaTheta,
    StationarityReport,
};
pub use subroutines::{change_support, coordinate_swap};
