//! Catalog of permutation-invariant closed convex sets and their projections.
//!
//! Every member is either *nonnegative* (contained in the nonnegative orthant)
//! or *sign-free* (closed under flipping the sign of any coordinate). The
//! restriction of a member to an index set `T` has the same form in dimension
//! `|T|`, so the projection routines work on a slice of any length.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    Nonnegative,
    SignFree,
}

/// Serialized as its CLI spelling, e.g. `"l1ball:2"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SymmetricSet {
    /// All of ℝⁿ.
    FullSpace,
    /// ℝⁿ₊.
    NonnegOrthant,
    /// `{x ≥ 0, Σx = r}`.
    NonnegSimplex(f64),
    /// `{‖x‖₁ ≤ r}`.
    L1Ball(f64),
    /// `{‖x‖₂ ≤ r}`.
    L2Ball(f64),
    /// `{x ≥ 0, Σx ≤ r}`.
    NonnegL1Ball(f64),
    /// `{x ≥ 0, ‖x‖₂ ≤ r}`.
    NonnegL2Ball(f64),
}

impl SymmetricSet {
    /// Every catalog member with unit radius where a radius applies.
    pub const CATALOG: [SymmetricSet; 7] = [
        SymmetricSet::FullSpace,
        SymmetricSet::NonnegOrthant,
        SymmetricSet::NonnegSimplex(1.0),
        SymmetricSet::L1Ball(1.0),
        SymmetricSet::L2Ball(1.0),
        SymmetricSet::NonnegL1Ball(1.0),
        SymmetricSet::NonnegL2Ball(1.0),
    ];

    pub fn kind(&self) -> SetKind {
        match self {
            SymmetricSet::FullSpace | SymmetricSet::L1Ball(_) | SymmetricSet::L2Ball(_) => {
                SetKind::SignFree
            }
            _ => SetKind::Nonnegative,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            SymmetricSet::FullSpace | SymmetricSet::NonnegOrthant => None,
            SymmetricSet::NonnegSimplex(r)
            | SymmetricSet::L1Ball(r)
            | SymmetricSet::L2Ball(r)
            | SymmetricSet::NonnegL1Ball(r)
            | SymmetricSet::NonnegL2Ball(r) => Some(r),
        }
    }

    /// The intersection with the nonnegative orthant, as a catalog member.
    pub fn nonnegative_part(&self) -> SymmetricSet {
        match *self {
            SymmetricSet::FullSpace => SymmetricSet::NonnegOrthant,
            SymmetricSet::L1Ball(r) => SymmetricSet::NonnegL1Ball(r),
            SymmetricSet::L2Ball(r) => SymmetricSet::NonnegL2Ball(r),
            other => other,
        }
    }

    /// Whether the zero vector belongs to the set.
    pub fn contains_origin(&self) -> bool {
        !matches!(self, SymmetricSet::NonnegSimplex(_))
    }

    /// `x` itself for nonnegative sets, `|x|` for sign-free ones.
    pub fn p_operator(&self, x: &[f64]) -> Vec<f64> {
        match self.kind() {
            SetKind::Nonnegative => x.to_vec(),
            SetKind::SignFree => x.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Scalar version of [`p_operator`](Self::p_operator).
    #[inline]
    pub fn p(&self, v: f64) -> f64 {
        match self.kind() {
            SetKind::Nonnegative => v,
            SetKind::SignFree => v.abs(),
        }
    }

    /// Euclidean projection onto the set in dimension `x.len()`.
    ///
    /// By symmetry the restriction of the set to any index set `T` is the same
    /// set in dimension `|T|`, so this also serves as the projection onto `Ω_T`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            SymmetricSet::FullSpace => x.to_vec(),
            SymmetricSet::NonnegOrthant => x.iter().map(|v| v.max(0.0)).collect(),
            SymmetricSet::NonnegSimplex(r) => project_simplex(x, r),
            SymmetricSet::L1Ball(r) => {
                let l1: f64 = x.iter().map(|v| v.abs()).sum();
                if l1 <= r {
                    return x.to_vec();
                }
                let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
                project_simplex(&abs, r)
                    .into_iter()
                    .zip(x)
                    .map(|(p, v)| if *v < 0.0 { -p } else { p })
                    .collect()
            }
            SymmetricSet::L2Ball(r) => scale_into_ball(x.to_vec(), r),
            SymmetricSet::NonnegL1Ball(r) => {
                let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
                if clipped.iter().sum::<f64>() <= r {
                    clipped
                } else {
                    project_simplex(&clipped, r)
                }
            }
            SymmetricSet::NonnegL2Ball(r) => {
                scale_into_ball(x.iter().map(|v| v.max(0.0)).collect(), r)
            }
        }
    }

    /// Projection onto the restriction `Ω_T` given only the sub-vector `x_T`.
    pub fn project_sub(&self, x_t: &[f64]) -> Vec<f64> {
        self.project(x_t)
    }

    /// Membership test with absolute tolerance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let nonneg = || x.iter().all(|v| *v >= -tol);
        match *self {
            SymmetricSet::FullSpace => true,
            SymmetricSet::NonnegOrthant => nonneg(),
            SymmetricSet::NonnegSimplex(r) => nonneg() && (x.iter().sum::<f64>() - r).abs() <= tol,
            SymmetricSet::L1Ball(r) => x.iter().map(|v| v.abs()).sum::<f64>() <= r + tol,
            SymmetricSet::L2Ball(r) => crate::linalg::norm(x) <= r + tol,
            SymmetricSet::NonnegL1Ball(r) => nonneg() && x.iter().sum::<f64>() <= r + tol,
            SymmetricSet::NonnegL2Ball(r) => nonneg() && crate::linalg::norm(x) <= r + tol,
        }
    }
}

/// Projection onto `{y ≥ 0, Σy = r}` by sorting and thresholding.
fn project_simplex(x: &[f64], r: f64) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let candidate = (cumsum - r) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            theta = candidate;
        }
    }
    x.iter().map(|v| (v - theta).max(0.0)).collect()
}

fn scale_into_ball(mut x: Vec<f64>, r: f64) -> Vec<f64> {
    let nx = crate::linalg::norm(&x);
    if nx > r {
        let factor = r / nx;
        x.iter_mut().for_each(|v| *v *= factor);
    }
    x
}

impl fmt::Display for SymmetricSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymmetricSet::FullSpace => write!(f, "full"),
            SymmetricSet::NonnegOrthant => write!(f, "nonneg"),
            SymmetricSet::NonnegSimplex(r) if r == 1.0 => write!(f, "simplex"),
            SymmetricSet::NonnegSimplex(r) => write!(f, "simplex:{r}"),
            SymmetricSet::L1Ball(r) => write!(f, "l1ball:{r}"),
            SymmetricSet::L2Ball(r) => write!(f, "l2ball:{r}"),
            SymmetricSet::NonnegL1Ball(r) => write!(f, "nonneg-l1ball:{r}"),
            SymmetricSet::NonnegL2Ball(r) => write!(f, "nonneg-l2ball:{r}"),
        }
    }
}

impl From<SymmetricSet> for String {
    fn from(set: SymmetricSet) -> String {
        set.to_string()
    }
}

impl TryFrom<String> for SymmetricSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for SymmetricSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, radius) = match s.split_once(':') {
            Some((name, r)) => {
                let r: f64 = r
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radius in set spec `{s}`")))?;
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::Parse(format!("radius must be positive in `{s}`")));
                }
                (name.trim(), Some(r))
            }
            None => (s.trim(), None),
        };
        let r = radius.unwrap_or(1.0);
        let set = match name {
            "full" if radius.is_none() => SymmetricSet::FullSpace,
            "nonneg" if radius.is_none() => SymmetricSet::NonnegOrthant,
            "simplex" => SymmetricSet::NonnegSimplex(r),
            "l1ball" => SymmetricSet::L1Ball(r),
            "l2ball" => SymmetricSet::L2Ball(r),
            "nonneg-l1ball" => SymmetricSet::NonnegL1Ball(r),
            "nonneg-l2ball" => SymmetricSet::NonnegL2Ball(r),
            _ => return Err(Error::Parse(format!("unknown set `{s}`"))),
        };
        Ok(set)
    }
}
