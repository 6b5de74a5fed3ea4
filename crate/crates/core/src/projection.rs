//! Projection onto `C_s ∩ Ω`, where `C_s` is the set of `s`-sparse vectors.
//!
//! A projection is obtained by keeping the `s` largest entries of `p(x)` and
//! projecting that sub-vector onto the restricted set `Ω_T`. The result is one
//! member of a possibly multi-valued projection; [`certify_unique`] checks two
//! sufficient conditions for it to be the only one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist_sq, nnz, norm_inf, top_k_indices, Support};
use crate::sets::SymmetricSet;

/// Largest number of supports [`brute_force_project`] is willing to enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseProjection {
    pub point: Vec<f64>,
    /// The index set `T` (`|T| = s`) the sub-projection was taken over.
    pub chosen_support: Support,
    pub certified_unique: bool,
}

/// Default threshold for the strict gap test in [`certify_unique`].
pub fn default_uniqueness_tol(x: &[f64]) -> f64 {
    1e-10 * (1.0 + norm_inf(x))
}

fn check_sparsity(s: usize, n: usize) -> Result<()> {
    if s == 0 || s >= n {
        return Err(Error::InvalidSparsity { s, n });
    }
    Ok(())
}

/// One point of the projection of `x` onto `C_s ∩ Ω`.
pub fn project_sparse(set: &SymmetricSet, s: usize, x: &[f64]) -> Result<SparseProjection> {
    check_sparsity(s, x.len())?;
    let (point, chosen_support) = project_sparse_point(set, s, x);
    let certified_unique = certify_point(set, s, x, &point, default_uniqueness_tol(x));
    Ok(SparseProjection {
        point,
        chosen_support,
        certified_unique,
    })
}

/// Projection without the sparsity check or uniqueness certificate.
///
/// Callers must guarantee `1 ≤ s < x.len()`.
pub(crate) fn project_sparse_point(set: &SymmetricSet, s: usize, x: &[f64]) -> (Vec<f64>, Support) {
    let px = set.p_operator(x);
    let t = Support::from_indices(top_k_indices(&px, s));
    let point = embed(set, x, t.indices());
    (point, t)
}

/// `y` with `y_T = proj_{Ω_T}(x_T)` and zeros elsewhere.
pub(crate) fn embed(set: &SymmetricSet, x: &[f64], t: &[usize]) -> Vec<f64> {
    let x_t: Vec<f64> = t.iter().map(|&i| x[i]).collect();
    let y_t = set.project_sub(&x_t);
    let mut y = vec![0.0; x.len()];
    for (&i, v) in t.iter().zip(y_t) {
        y[i] = v;
    }
    y
}

/// Sufficient conditions for `y` to be the unique projection of `x`.
///
/// Returns `true` when `‖y‖₀ < s`, or when the smallest `p(x)` value on
/// `supp(y)` beats the largest one off it by more than `tol`. A `false`
/// result means "not certified", not "non-unique".
pub fn certify_unique(set: &SymmetricSet, s: usize, x: &[f64], y: &SparseProjection, tol: f64) -> bool {
    certify_point(set, s, x, &y.point, tol)
}

pub(crate) fn certify_point(set: &SymmetricSet, s: usize, x: &[f64], y: &[f64], tol: f64) -> bool {
    if nnz(y) < s {
        return true;
    }
    support_gap(set, x, y) > tol
}

/// `min_{i∈supp(y)} p(x)_i − max_{i∉supp(y)} p(x)_i`; infinite when either side is empty.
pub(crate) fn support_gap(set: &SymmetricSet, x: &[f64], y: &[f64]) -> f64 {
    let mut on = f64::INFINITY;
    let mut off = f64::NEG_INFINITY;
    for (xi, yi) in x.iter().zip(y) {
        let p = set.p(*xi);
        if *yi != 0.0 {
            on = on.min(p);
        } else {
            off = off.max(p);
        }
    }
    if on.is_infinite() || off.is_infinite() {
        f64::INFINITY
    } else {
        on - off
    }
}

/// Binomial coefficient, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // rightmost position that can still move
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every global minimizer of `‖y − x‖²` over `C_s ∩ Ω`, by enumeration of all supports.
///
/// Distinct supports that produce the same point are reported once.
pub fn brute_force_project(set: &SymmetricSet, s: usize, x: &[f64]) -> Result<Vec<SparseProjection>> {
    let n = x.len();
    check_sparsity(s, n)?;
    let count = binomial(n, s);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut candidates: Vec<(f64, Vec<f64>, Vec<usize>)> = Vec::new();
    for_each_combination(n, s, |t| {
        let y = embed(set, x, t);
        candidates.push((dist_sq(&y, x), y, t.to_vec()));
    });
    let best = candidates
        .iter()
        .map(|c| c.0)
        .fold(f64::INFINITY, f64::min);
    let cutoff = best + 1e-10 * (1.0 + best);
    let point_tol = 1e-12 * (1.0 + norm_inf(x));
    let mut out: Vec<SparseProjection> = Vec::new();
    for (d, y, t) in candidates {
        if d > cutoff {
            continue;
        }
        let duplicate = out
            .iter()
            .any(|p| p.point.iter().zip(&y).all(|(a, b)| (a - b).abs() <= point_tol));
        if !duplicate {
            out.push(SparseProjection {
                point: y,
                chosen_support: Support::from_indices(t),
                certified_unique: false,
            });
        }
    }
    if out.len() == 1 {
        out[0].certified_unique = true;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::seeded_rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn examples() {
        let p = project_sparse(&SymmetricSet::FullSpace, 2, &[3.0, -1.0, 2.0]).unwrap();
        assert_eq!(p.point, vec![3.0, 0.0, 2.0]);
        assert_eq!(p.chosen_support.indices(), &[0, 2]);

        let p = project_sparse(&SymmetricSet::NonnegSimplex(1.0), 1, &[0.5, 0.4, 0.1]).unwrap();
        assert_eq!(p.point, vec![1.0, 0.0, 0.0]);

        let x = [0.0, 1.0, 0.5];
        let p = project_sparse(&SymmetricSet::NonnegOrthant, 2, &x).unwrap();
        assert_eq!(p.point, x.to_vec());
    }

    #[test]
    fn brute_force_oracle_on_examples() {
        // three candidate supports for the first example, distances 1, 4, 9
        let all = brute_force_project(&SymmetricSet::FullSpace, 2, &[3.0, -1.0, 2.0]).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].point, vec![3.0, 0.0, 2.0]);

        let all = brute_force_project(&SymmetricSet::NonnegSimplex(1.0), 1, &[0.5, 0.4, 0.1]).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].point, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn brute_force_examples() {
        let all = brute_force_project(&SymmetricSet::FullSpace, 1, &[1.0, 1.0]).unwrap();
        let pts: Vec<_> = all.iter().map(|p| p.point.clone()).collect();
        assert_eq!(pts, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let x = [0.0, 2.0, -1.0, 0.0];
        let all = brute_force_project(&SymmetricSet::FullSpace, 3, &x).unwrap();
        assert!(all.iter().any(|p| p.point == x.to_vec()));

        let all = brute_force_project(&SymmetricSet::NonnegOrthant, 1, &[-5.0, -3.0]).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].point, vec![0.0, 0.0]);
        assert!(all[0].certified_unique);
    }

    #[test]
    fn brute_force_guards() {
        let x = vec![1.0; 40];
        assert!(matches!(
            brute_force_project(&SymmetricSet::FullSpace, 20, &x),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            project_sparse(&SymmetricSet::FullSpace, 0, &[1.0, 2.0]),
            Err(Error::InvalidSparsity { .. })
        ));
        assert!(matches!(
            project_sparse(&SymmetricSet::FullSpace, 2, &[1.0, 2.0]),
            Err(Error::InvalidSparsity { .. })
        ));
    }

    #[test]
    fn certify_examples() {
        let set = SymmetricSet::FullSpace;
        let x = [3.0, -1.0, 2.0];
        let y = project_sparse(&set, 2, &x).unwrap();
        assert!(certify_unique(&set, 2, &x, &y, 1e-10));

        let x = [1.0, 1.0, 0.0];
        let y = project_sparse(&set, 2, &x).unwrap();
        assert!(certify_unique(&set, 2, &x, &y, 1e-10));

        let x = [1.0, 1.0];
        let y = project_sparse(&set, 1, &x).unwrap();
        assert_eq!(y.point, vec![1.0, 0.0]);
        assert!(!certify_unique(&set, 1, &x, &y, 1e-10));
        assert_eq!(brute_force_project(&set, 1, &x).unwrap().len(), 2);
    }

    #[test]
    fn combinations_enumerated_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_combination(7, 3, |_| count += 1);
        assert_eq!(count, binomial(7, 3) as usize);
        let mut count = 0;
        for_each_combination(3, 3, |_| count += 1);
        assert_eq!(count, 1);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }

    #[test]
    fn matches_brute_force_and_restriction_property() {
        let mut rng = seeded_rng(21);
        for set in SymmetricSet::CATALOG {
            for n in 4..=7 {
                for s in 1..=3 {
                    for _ in 0..60 {
                        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                        let y = project_sparse(&set, s, &x).unwrap();
                        let all = brute_force_project(&set, s, &x).unwrap();
                        let best = dist_sq(&all[0].point, &x);
                        assert!(dist_sq(&y.point, &x) <= best + 1e-10, "{set} n={n} s={s}");
                        assert!(nnz(&y.point) <= s);
                        assert!(set.contains(&y.point, 1e-12));
                        if y.certified_unique {
                            assert_eq!(all.len(), 1, "{set} {x:?}");
                        }
                        // re-projecting on any super support of size s reproduces y_T
                        let supp = crate::linalg::support_of(&y.point, 0.0);
                        let free: Vec<usize> = supp.complement(n);
                        for_each_combination(free.len(), s - supp.len(), |extra| {
                            let mut t = supp.indices().to_vec();
                            t.extend(extra.iter().map(|&k| free[k]));
                            let t = Support::from_indices(t);
                            let z = embed(&set, &x, t.indices());
                            for &i in t.indices() {
                                assert!((z[i] - y.point[i]).abs() <= 1e-12, "{set} {x:?}");
                            }
                        });
                    }
                }
            }
        }
    }

    #[test]
    fn feasible_points_are_fixed() {
        let mut rng = seeded_rng(2);
        for set in SymmetricSet::CATALOG {
            for _ in 0..100 {
                let z: Vec<f64> = (0..6).map(|_| StandardNormal.sample(&mut rng)).collect();
                let x = project_sparse(&set, 3, &z).unwrap().point;
                let again = project_sparse(&set, 3, &x).unwrap().point;
                // the simplex threshold can move entries by an ulp
                for (a, b) in again.iter().zip(&x) {
                    assert!((a - b).abs() <= 1e-15, "{set}");
                }
            }
        }
    }
}
