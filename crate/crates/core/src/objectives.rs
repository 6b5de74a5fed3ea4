//! Smooth loss functions with exact gradients and gradient Lipschitz constants.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Power-iteration budget for the spectral norm behind the Lipschitz constants.
const POWER_MAX_ITER: usize = 2000;
const POWER_REL_TOL: f64 = 1e-13;

/// A differentiable function with Lipschitz-continuous gradient.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// A constant `L` with `‖∇f(x) − ∇f(y)‖ ≤ L‖x − y‖`.
    fn lipschitz(&self) -> f64;

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(x), self.gradient(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Loss {
    /// `½‖Ax − b‖²`
    LeastSquares { a: Matrix, b: Vec<f64> },
    /// `Σ log(1 + exp(−bᵢ aᵢᵀx))` with rows `aᵢ` and labels `bᵢ ∈ {−1, +1}`.
    Logistic { samples: Matrix, labels: Vec<f64> },
}

/// A loss together with its precomputed Lipschitz constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    loss: Loss,
    lipschitz: f64,
}

impl Objective {
    pub fn least_squares(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                actual: b.len(),
            });
        }
        Ok(Self::from_loss(Loss::LeastSquares { a, b }))
    }

    pub fn logistic(samples: Matrix, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != samples.rows() {
            return Err(Error::DimensionMismatch {
                expected: samples.rows(),
                actual: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|l| **l != 1.0 && **l != -1.0) {
            return Err(Error::InvalidInstance(format!("label {bad} is not ±1")));
        }
        Ok(Self::from_loss(Loss::Logistic { samples, labels }))
    }

    /// `½‖x − c‖²`, a least-squares loss with identity design.
    pub fn distance_to(c: &[f64]) -> Self {
        Self::from_loss(Loss::LeastSquares {
            a: Matrix::identity(c.len()),
            b: c.to_vec(),
        })
    }

    fn from_loss(loss: Loss) -> Self {
        let lipschitz = lipschitz_constant(&loss);
        Objective { loss, lipschitz }
    }

    pub fn loss(&self) -> &Loss {
        &self.loss
    }

    pub fn matrix(&self) -> &Matrix {
        match &self.loss {
            Loss::LeastSquares { a, .. } => a,
            Loss::Logistic { samples, .. } => samples,
        }
    }

    /// Targets for least squares, labels for logistic.
    pub fn rhs(&self) -> &[f64] {
        match &self.loss {
            Loss::LeastSquares { b, .. } => b,
            Loss::Logistic { labels, .. } => labels,
        }
    }

    pub fn checked_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.value(x))
    }

    pub fn checked_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.gradient(x))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }
}

/// Squared spectral norm of the design matrix.
///
/// For least squares this is the exact `‖A‖²`. For logistic loss it is
/// `‖Ã‖²` with `Ã = [b₁a¹, …, bₘaᵐ]`, which has the same singular values as
/// the sample matrix. This is four times the tight constant for the logistic
/// Hessian but it is the value the stepsize rules are calibrated against.
pub fn lipschitz_constant(loss: &Loss) -> f64 {
    match loss {
        Loss::LeastSquares { a, .. } => a.spectral_norm_sq(POWER_MAX_ITER, POWER_REL_TOL),
        Loss::Logistic { samples, .. } => samples.spectral_norm_sq(POWER_MAX_ITER, POWER_REL_TOL),
    }
}

/// `log(1 + exp(−z))` without overflow.
fn log1p_exp_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `1 / (1 + exp(−u))` without overflow.
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

impl SmoothObjective for Objective {
    fn dim(&self) -> usize {
        self.matrix().cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        match &self.loss {
            Loss::LeastSquares { a, b } => {
                let ax = a.mul_vec(x);
                0.5 * ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()
            }
            Loss::Logistic { samples, labels } => {
                let z = samples.mul_vec(x);
                z.iter().zip(labels).map(|(zi, bi)| log1p_exp_neg(bi * zi)).sum()
            }
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        match &self.loss {
            Loss::LeastSquares { a, b } => {
                let r: Vec<f64> = a.mul_vec(x).iter().zip(b).map(|(p, q)| p - q).collect();
                (0.5 * dot(&r, &r), a.mul_t_vec(&r))
            }
            Loss::Logistic { samples, labels } => {
                let z = samples.mul_vec(x);
                let mut value = 0.0;
                let weights: Vec<f64> = z
                    .iter()
                    .zip(labels)
                    .map(|(zi, bi)| {
                        let margin = bi * zi;
                        value += log1p_exp_neg(margin);
                        -bi * sigmoid(-margin)
                    })
                    .collect();
                (value, samples.mul_t_vec(&weights))
            }
        }
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

impl<T: SmoothObjective + ?Sized> SmoothObjective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (**self).value_and_gradient(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, norm, seeded_rng};
    use rand::Rng as _;
    use rand_distr::{Distribution, StandardNormal};

    fn eye2_ls() -> Objective {
        Objective::least_squares(Matrix::identity(2), vec![1.0, 0.0]).unwrap()
    }

    fn random_matrix(rng: &mut crate::linalg::Rng, m: usize, n: usize) -> Matrix {
        let data = (0..m * n).map(|_| StandardNormal.sample(rng)).collect();
        Matrix::from_row_major(m, n, data).unwrap()
    }

    fn random_logistic(rng: &mut crate::linalg::Rng, m: usize, n: usize) -> Objective {
        let labels = (0..m).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        Objective::logistic(random_matrix(rng, m, n), labels).unwrap()
    }

    #[test]
    fn value_examples() {
        let f = eye2_ls();
        assert_eq!(f.value(&[1.0, 0.0]), 0.0);
        assert_eq!(f.value(&[0.0, 0.0]), 0.5);
        let g = Objective::logistic(Matrix::zeros(1, 3), vec![1.0]).unwrap();
        assert!((g.value(&[4.0, -1.0, 2.0]) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn gradient_examples() {
        let f = eye2_ls();
        assert_eq!(f.gradient(&[1.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(f.gradient(&[0.0, 0.0]), vec![-1.0, 0.0]);
        let g = Objective::logistic(Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap(), vec![1.0]).unwrap();
        assert_eq!(g.gradient(&[0.0, 0.0]), vec![-0.5, 0.0]);
    }

    #[test]
    fn lipschitz_examples() {
        let mut a = Matrix::identity(3);
        a.scale(2.0);
        let f = Objective::least_squares(a, vec![0.0; 3]).unwrap();
        assert!((f.lipschitz() - 4.0).abs() < 1e-12);

        let g = Objective::logistic(Matrix::from_rows(&[vec![3.0, 4.0]]).unwrap(), vec![-1.0]).unwrap();
        assert!((g.lipschitz() - 25.0).abs() < 1e-10);

        // rows of a rotation are orthonormal
        let (c, s) = (0.6, 0.8);
        let a = Matrix::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0]]).unwrap();
        let f = Objective::least_squares(a, vec![0.0; 2]).unwrap();
        assert!((f.lipschitz() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stable_for_large_margins() {
        let g = Objective::logistic(Matrix::from_rows(&[vec![1.0]]).unwrap(), vec![1.0]).unwrap();
        assert!(g.value(&[1000.0]).abs() < 1e-300);
        assert!((g.value(&[-1000.0]) - 1000.0).abs() < 1e-9);
        let grad = g.gradient(&[-1000.0]);
        assert!((grad[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_checks() {
        let f = eye2_ls();
        assert!(matches!(f.checked_value(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(f.checked_gradient(&[1.0, 2.0, 3.0]), Err(Error::DimensionMismatch { .. })));
        assert!(Objective::least_squares(Matrix::identity(2), vec![1.0]).is_err());
        assert!(Objective::logistic(Matrix::identity(2), vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = seeded_rng(17);
        for case in 0..100 {
            let (m, n) = (rng.random_range(1..8), rng.random_range(1..6));
            let f = if case % 2 == 0 {
                let b = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
                Objective::least_squares(random_matrix(&mut rng, m, n), b).unwrap()
            } else {
                random_logistic(&mut rng, m, n)
            };
            let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let g = f.gradient(&x);
            for i in 0..n {
                let h = 1e-6 * (1.0 + x[i].abs());
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
                assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "case {case}: {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn gradient_is_lipschitz_and_loss_is_convex() {
        let mut rng = seeded_rng(19);
        for case in 0..100 {
            let (m, n) = (rng.random_range(1..10), rng.random_range(1..8));
            let f = if case % 2 == 0 {
                let b = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
                Objective::least_squares(random_matrix(&mut rng, m, n), b).unwrap()
            } else {
                random_logistic(&mut rng, m, n)
            };
            let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let dg = norm(&crate::linalg::sub(&f.gradient(&x), &f.gradient(&y)));
            assert!(dg <= f.lipschitz() * dist(&x, &y) * (1.0 + 1e-8));
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            assert!(f.value(&mid) <= 0.5 * (f.value(&x) + f.value(&y)) + 1e-10);
        }
    }

    #[test]
    fn power_iteration_matches_gram_eigenvalue() {
        // exact σ_max² from nalgebra's symmetric eigen solver on AᵀA
        let mut rng = seeded_rng(23);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6, 4);
            let dense = nalgebra::DMatrix::from_row_slice(6, 4, a.as_slice());
            let gram = dense.transpose() * &dense;
            let exact = gram.symmetric_eigenvalues().max();
            let est = a.spectral_norm_sq(POWER_MAX_ITER, POWER_REL_TOL);
            assert!(est >= exact * (1.0 - 1e-8), "{est} vs {exact}");
            assert!(est <= exact * (1.0 + 1e-12));
        }
    }
}
