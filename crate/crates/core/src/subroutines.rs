//! Coordinate swap and support change moves used by the nonmonotone solver.

use crate::error::{Error, Result};
use crate::linalg::{axpy_step, nnz, support_of, Support};
use crate::objectives::SmoothObjective;
use crate::projection::embed;
use crate::sets::{SetKind, SymmetricSet};

fn check_nondegenerate(x: &[f64]) -> Result<()> {
    let k = nnz(x);
    if k == 0 || k == x.len() {
        return Err(Error::DegenerateSupport { nnz: k, n: x.len() });
    }
    Ok(())
}

/// Lowest index attaining the extreme of `key` over `indices`.
fn arg_extreme(indices: &[usize], key: impl Fn(usize) -> f64, want_max: bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &i in indices {
        let v = key(i);
        let better = match best {
            None => true,
            Some((_, b)) => {
                if want_max {
                    v > b
                } else {
                    v < b
                }
            }
        };
        if better {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// All indices attaining the extreme of `key`, ascending.
fn arg_extreme_set(indices: &[usize], key: impl Fn(usize) -> f64, want_max: bool) -> Vec<usize> {
    let Some(best) = arg_extreme(indices, &key, want_max) else {
        return Vec::new();
    };
    let target = key(best);
    indices.iter().copied().filter(|&i| key(i) == target).collect()
}

/// The index pair `(i, j)` of the swap move: `i` moves off the support, `j` on.
pub(crate) fn swap_indices(set: &SymmetricSet, x: &[f64], grad: &[f64]) -> Option<(usize, usize)> {
    let supp = support_of(x, 0.0);
    let off = supp.complement(x.len());
    let weakest = arg_extreme_set(supp.indices(), |k| set.p(x[k]), false);
    let i = arg_extreme(&weakest, |k| set.p(-grad[k]), false)?;
    let j = arg_extreme(&off, |k| set.p(-grad[k]), true)?;
    Some((i, j))
}

/// Points reached by transplanting `x_i` to coordinate `j`: one candidate for
/// nonnegative sets, the `+` and `−` transplants for sign-free sets.
pub(crate) fn swap_candidates(set: &SymmetricSet, x: &[f64], grad: &[f64]) -> Option<Vec<Vec<f64>>> {
    let (i, j) = swap_indices(set, x, grad)?;
    let moved = |sign: f64| {
        let mut y = x.to_vec();
        y[j] = sign * x[i];
        y[i] = 0.0;
        y
    };
    Some(match set.kind() {
        SetKind::Nonnegative => vec![moved(1.0)],
        SetKind::SignFree => vec![moved(1.0), moved(-1.0)],
    })
}

/// Moves the weakest on-support coordinate to the most promising
/// off-support position if that strictly lowers `f`; otherwise returns `x`.
pub fn coordinate_swap<F: SmoothObjective>(obj: &F, set: &SymmetricSet, x: &[f64]) -> Result<Vec<f64>> {
    check_nondegenerate(x)?;
    let (fx, grad) = obj.value_and_gradient(x);
    Ok(coordinate_swap_with(obj, set, x, fx, &grad))
}

pub(crate) fn coordinate_swap_with<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    x: &[f64],
    fx: f64,
    grad: &[f64],
) -> Vec<f64> {
    let Some(cands) = swap_candidates(set, x, grad) else {
        return x.to_vec();
    };
    // ties between the two sign-free candidates go to the `+` transplant
    let mut best: Option<(f64, &Vec<f64>)> = None;
    for c in &cands {
        let fc = obj.value(c);
        if best.is_none_or(|(fb, _)| fc < fb) {
            best = Some((fc, c));
        }
    }
    match best {
        Some((fb, y)) if fb < fx => y.clone(),
        _ => x.to_vec(),
    }
}

/// Replaces the weakest on-support indices of `a = x − t∇f(x)` by the
/// strongest off-support ones and projects `a` onto the new support.
///
/// The result never has the same support as `x`.
pub fn change_support<F: SmoothObjective>(
    obj: &F,
    set: &SymmetricSet,
    x: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    check_nondegenerate(x)?;
    let grad = obj.gradient(x);
    Ok(change_support_with(set, x, &grad, t))
}

pub(crate) fn change_support_with(set: &SymmetricSet, x: &[f64], grad: &[f64], t: f64) -> Vec<f64> {
    let a = axpy_step(x, t, grad);
    let supp = support_of(x, 0.0);
    let off = supp.complement(x.len());
    let weakest = arg_extreme_set(supp.indices(), |k| set.p(a[k]), false);
    let strongest = arg_extreme_set(&off, |k| set.p(a[k]), true);
    let count = weakest.len().min(strongest.len());
    let leaving = &weakest[..count];
    let mut s: Vec<usize> = supp
        .indices()
        .iter()
        .copied()
        .filter(|k| !leaving.contains(k))
        .collect();
    s.extend_from_slice(&strongest[..count]);
    let s = Support::from_indices(s);
    embed(set, &a, s.indices())
}
