//! Seeded generators for the three benchmark families and a plain-text
//! instance file format.
//!
//! Instance files are UTF-8 text:
//!
//! ```text
//! npg-instance 1
//! family=cs-least-squares
//! objective=least-squares
//! set=full
//! m=120
//! n=512
//! s=20
//! seed=7
//! matrix
//! <m lines of n whitespace-separated floats, row-major>
//! rhs
//! <m floats: targets, or ±1 labels for logistic>
//! x0
//! <n floats>
//! ground_truth
//! <n floats>          (section optional)
//! ```
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the instance bit for bit. Point files hold one float per line.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{nnz, seeded_rng, Matrix, Rng};
use crate::objectives::{Loss, Objective, SmoothObjective};
use crate::sets::SymmetricSet;

const HEADER: &str = "npg-instance 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "cs-least-squares")]
    CsLeastSquares,
    #[serde(rename = "logistic")]
    Logistic,
    #[serde(rename = "simplex-least-squares")]
    SimplexLeastSquares,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::CsLeastSquares, Family::Logistic, Family::SimplexLeastSquares];

    pub fn name(self) -> &'static str {
        match self {
            Family::CsLeastSquares => "cs-least-squares",
            Family::Logistic => "logistic",
            Family::SimplexLeastSquares => "simplex-least-squares",
        }
    }

    /// `max(1, n/100)`, the level used by the logistic and simplex families.
    pub fn default_sparsity(self, n: usize) -> usize {
        (n / 100).max(1)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cs-least-squares" | "cs" => Ok(Family::CsLeastSquares),
            "logistic" => Ok(Family::Logistic),
            "simplex-least-squares" | "simplex" => Ok(Family::SimplexLeastSquares),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub family: Family,
    pub objective: Objective,
    pub set: SymmetricSet,
    pub s: usize,
    pub x0: Vec<f64>,
    pub ground_truth: Option<Vec<f64>>,
    pub seed: u64,
}

impl Instance {
    /// Generates a family member from a fresh stream seeded with `seed`.
    /// `s` is only used by the compressed sensing family; the others use
    /// `s = max(1, n/100)` unless `s` is given explicitly.
    pub fn generate(family: Family, m: usize, n: usize, s: Option<usize>, sigma: f64, seed: u64) -> Result<Self> {
        let mut rng = seeded_rng(seed);
        let mut inst = match family {
            Family::CsLeastSquares => {
                let s = s.ok_or_else(|| Error::InvalidInstance("compressed sensing needs s".into()))?;
                gen_cs_instance(m, n, s, sigma, &mut rng)?
            }
            Family::Logistic => gen_logistic_instance(m, n, &mut rng)?,
            Family::SimplexLeastSquares => gen_simplex_instance(m, n, &mut rng)?,
        };
        if let (Some(s), true) = (s, family != Family::CsLeastSquares) {
            inst = inst.with_sparsity(s)?;
        }
        inst.seed = seed;
        Ok(inst)
    }

    pub fn m(&self) -> usize {
        self.objective.matrix().rows()
    }

    pub fn n(&self) -> usize {
        self.objective.dim()
    }

    /// Replaces `s`, rebuilding the default starting point for the new level.
    pub fn with_sparsity(mut self, s: usize) -> Result<Self> {
        let n = self.n();
        check_sparsity(s, n)?;
        self.s = s;
        if self.family == Family::SimplexLeastSquares {
            self.x0 = simplex_start(n, s);
        }
        Ok(self)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let objective = match self.objective.loss() {
            Loss::LeastSquares { .. } => "least-squares",
            Loss::Logistic { .. } => "logistic",
        };
        let a = self.objective.matrix();
        writeln!(w, "{HEADER}")?;
        writeln!(w, "family={}", self.family)?;
        writeln!(w, "objective={objective}")?;
        writeln!(w, "set={}", self.set)?;
        writeln!(w, "m={}", a.rows())?;
        writeln!(w, "n={}", a.cols())?;
        writeln!(w, "s={}", self.s)?;
        writeln!(w, "seed={}", self.seed)?;
        writeln!(w, "matrix")?;
        for i in 0..a.rows() {
            write_row(&mut w, a.row(i))?;
        }
        writeln!(w, "rhs")?;
        write_row(&mut w, self.objective.rhs())?;
        writeln!(w, "x0")?;
        write_row(&mut w, &self.x0)?;
        if let Some(g) = &self.ground_truth {
            writeln!(w, "ground_truth")?;
            write_row(&mut w, g)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let lines = r.lines().collect::<std::io::Result<Vec<String>>>()?;
        let mut cur = Lines { lines: &lines, pos: 0 };
        if cur.next("header")?.trim() != HEADER {
            return Err(Error::Parse(format!("missing '{HEADER}' header")));
        }
        let family: Family = cur.field("family")?.parse()?;
        let objective = cur.field("objective")?;
        let set: SymmetricSet = cur.field("set")?.parse()?;
        let m: usize = parse_num(&cur.field("m")?)?;
        let n: usize = parse_num(&cur.field("n")?)?;
        let s: usize = parse_num(&cur.field("s")?)?;
        let seed: u64 = parse_num(&cur.field("seed")?)?;

        cur.section("matrix")?;
        let mut data = Vec::with_capacity(m * n);
        for _ in 0..m {
            data.extend(cur.row("matrix", n)?);
        }
        let a = Matrix::from_row_major(m, n, data)?;
        cur.section("rhs")?;
        let rhs = cur.row("rhs", m)?;
        cur.section("x0")?;
        let x0 = cur.row("x0", n)?;
        let ground_truth = match cur.peek() {
            Some(_) => {
                cur.section("ground_truth")?;
                Some(cur.row("ground_truth", n)?)
            }
            None => None,
        };
        let objective = match objective.as_str() {
            "least-squares" => Objective::least_squares(a, rhs)?,
            "logistic" => Objective::logistic(a, rhs)?,
            other => return Err(Error::Parse(format!("unknown objective '{other}'"))),
        };
        check_sparsity(s, n)?;
        Ok(Instance {
            family,
            objective,
            set,
            s,
            x0,
            ground_truth,
            seed,
        })
    }
}

struct Lines<'a> {
    lines: &'a [String],
    pos: usize,
}

impl Lines<'_> {
    fn peek(&mut self) -> Option<&str> {
        while self.pos < self.lines.len() && self.lines[self.pos].trim().is_empty() {
            self.pos += 1;
        }
        self.lines.get(self.pos).map(String::as_str)
    }

    fn next(&mut self, what: &str) -> Result<&str> {
        self.peek();
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::Parse(format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    fn field(&mut self, key: &str) -> Result<String> {
        let line = self.next(key)?;
        match line.split_once('=') {
            Some((k, v)) if k.trim() == key => Ok(v.trim().to_string()),
            _ => Err(Error::Parse(format!("expected '{key}=...', found '{line}'"))),
        }
    }

    fn section(&mut self, name: &str) -> Result<()> {
        let line = self.next(name)?;
        if line.trim() != name {
            return Err(Error::Parse(format!("expected section '{name}', found '{line}'")));
        }
        Ok(())
    }

    fn row(&mut self, what: &str, len: usize) -> Result<Vec<f64>> {
        let row = parse_row(self.next(what)?)?;
        if row.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                actual: row.len(),
            });
        }
        Ok(row)
    }
}

fn check_sparsity(s: usize, n: usize) -> Result<()> {
    if s == 0 || s >= n {
        return Err(Error::InvalidSparsity { s, n });
    }
    Ok(())
}

fn parse_num<T: FromStr>(v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("invalid number '{v}'")))
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace().map(parse_float).collect()
}

fn parse_float(v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::Parse(format!("invalid float '{v}'")))?;
    if !x.is_finite() {
        return Err(Error::NonFinite("file entry"));
    }
    Ok(x)
}

fn write_row<W: Write>(w: &mut W, row: &[f64]) -> Result<()> {
    let mut first = true;
    for v in row {
        if !first {
            w.write_all(b" ")?;
        }
        write!(w, "{v}")?;
        first = false;
    }
    writeln!(w)?;
    Ok(())
}

/// Writes one float per line.
pub fn write_point<W: Write>(mut w: W, x: &[f64]) -> Result<()> {
    for v in x {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

/// Reads one float per line, skipping blank lines.
pub fn read_point<R: BufRead>(r: R) -> Result<Vec<f64>> {
    let mut x = Vec::new();
    for line in r.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() {
            x.push(parse_float(t)?);
        }
    }
    Ok(x)
}

fn gaussian(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `m × n` matrix with orthonormal rows: the transpose of an orthonormal
/// basis (thin QR factor) of the range of an `n × m` Gaussian matrix.
fn orthonormal_rows(m: usize, n: usize, rng: &mut Rng) -> Result<Matrix> {
    // Fill column-major so the draw order is column by column of W.
    let mut w = DMatrix::<f64>::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            w[(i, j)] = gaussian(rng);
        }
    }
    let q = w.qr().q();
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            data.push(q[(j, i)]);
        }
    }
    Matrix::from_row_major(m, n, data)
}

/// Compressed sensing: orthonormal-row sensing matrix, `±1` signal on a
/// uniformly random support of size `s`, `b = Ax̃ + σv`, start at zero.
pub fn gen_cs_instance(m: usize, n: usize, s: usize, sigma: f64, rng: &mut Rng) -> Result<Instance> {
    if m == 0 || m >= n {
        return Err(Error::InvalidInstance(format!("need 0 < m < n, got m = {m}, n = {n}")));
    }
    check_sparsity(s, n)?;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInstance(format!("sigma must be finite and nonnegative, got {sigma}")));
    }
    let a = orthonormal_rows(m, n, rng)?;
    let mut truth = vec![0.0; n];
    for i in index::sample(rng, n, s) {
        truth[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let mut b = a.mul_vec(&truth);
    for bi in &mut b {
        *bi += sigma * gaussian(rng);
    }
    Ok(Instance {
        family: Family::CsLeastSquares,
        objective: Objective::least_squares(a, b)?,
        set: SymmetricSet::FullSpace,
        s,
        x0: vec![0.0; n],
        ground_truth: Some(truth),
        seed: 0,
    })
}

/// Logistic regression with `m/2` positive and `m/2` negative samples.
/// Features of positive samples are i.i.d. `N(μ₊, 1)` with `μ₊ ~ U[0, 1]`
/// drawn once per instance; negative samples use `μ₋ ~ U[−1, 0]`.
pub fn gen_logistic_instance(m: usize, n: usize, rng: &mut Rng) -> Result<Instance> {
    gen_logistic_with_labels(m, n, rng, false)
}

/// As [`gen_logistic_instance`], optionally labelling every sample `+1`.
pub fn gen_logistic_with_labels(m: usize, n: usize, rng: &mut Rng, all_positive: bool) -> Result<Instance> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::InvalidInstance(format!("m must be even and positive, got {m}")));
    }
    let s = Family::Logistic.default_sparsity(n);
    check_sparsity(s, n)?;
    let mu_pos: f64 = Uniform::new_inclusive(0.0, 1.0).expect("valid range").sample(rng);
    let mu_neg: f64 = Uniform::new_inclusive(-1.0, 0.0).expect("valid range").sample(rng);
    let mut data = Vec::with_capacity(m * n);
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        let positive = i < m / 2;
        let mu = if positive { mu_pos } else { mu_neg };
        for _ in 0..n {
            data.push(mu + gaussian(rng));
        }
        labels.push(if positive || all_positive { 1.0 } else { -1.0 });
    }
    Ok(Instance {
        family: Family::Logistic,
        objective: Objective::logistic(Matrix::from_row_major(m, n, data)?, labels)?,
        set: SymmetricSet::FullSpace,
        s,
        x0: vec![0.0; n],
        ground_truth: None,
        seed: 0,
    })
}

/// Sparse simplex least squares: `A = D·Ā` with `Ā` orthonormal-row and
/// `D = diag(1², 2², …, m²)`, `b = Az/‖z‖₁` for `z ~ U[0, 1]ⁿ`, over the
/// unit simplex, starting from the uniform point on the first `s` coordinates.
pub fn gen_simplex_instance(m: usize, n: usize, rng: &mut Rng) -> Result<Instance> {
    if m == 0 || m >= n {
        return Err(Error::InvalidInstance(format!("need 0 < m < n, got m = {m}, n = {n}")));
    }
    let s = Family::SimplexLeastSquares.default_sparsity(n);
    check_sparsity(s, n)?;
    let mut a = orthonormal_rows(m, n, rng)?;
    for i in 0..m {
        let d = ((i + 1) * (i + 1)) as f64;
        for v in a.row_mut(i) {
            *v *= d;
        }
    }
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let z: Vec<f64> = (0..n).map(|_| unit.sample(rng)).collect();
    let total: f64 = z.iter().sum();
    let z: Vec<f64> = z.iter().map(|v| v / total).collect();
    let b = a.mul_vec(&z);
    Ok(Instance {
        family: Family::SimplexLeastSquares,
        objective: Objective::least_squares(a, b)?,
        set: SymmetricSet::NonnegSimplex(1.0),
        s,
        x0: simplex_start(n, s),
        ground_truth: None,
        seed: 0,
    })
}

fn simplex_start(n: usize, s: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for v in x.iter_mut().take(s) {
        *v = 1.0 / s as f64;
    }
    x
}

/// Whether `x` has at most `s` nonzeros and lies in `set` up to `tol`.
pub fn is_feasible(set: &SymmetricSet, s: usize, x: &[f64], tol: f64) -> bool {
    nnz(x) <= s && set.contains(x, tol)
}
