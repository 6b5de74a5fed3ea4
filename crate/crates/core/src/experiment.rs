//! Benchmark runner comparing the PG baseline with NPG on generated instances.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{Family, Instance};
use crate::objectives::SmoothObjective;
use crate::solvers::{npg_solve, pg_solve_with, Certification, IterateTrace, PgConfig, SolverConfig};

/// Termination tolerance on `|f(x^k) − f(x^{k−1})|` used by both methods.
pub const BENCH_F_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pg,
    Npg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pg => "pg",
            Method::Npg => "npg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pg" => Ok(Method::Pg),
            "npg" => Ok(Method::Npg),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// `(M, N, q)` used for each family.
pub fn family_cycle(family: Family) -> (usize, usize, usize) {
    match family {
        Family::CsLeastSquares => (4, 5, 3),
        Family::Logistic => (2, 3, 2),
        Family::SimplexLeastSquares => (3, 4, 3),
    }
}

/// NPG settings for `family` on an objective with Lipschitz constant `lipschitz`.
pub fn family_config(family: Family, lipschitz: f64) -> SolverConfig {
    let (memory, n_cycle, q) = family_cycle(family);
    SolverConfig::with_defaults(lipschitz, memory, n_cycle, q)
}

/// Runs `method` on `inst` with the benchmark settings.
pub fn solve_instance(
    inst: &Instance,
    method: Method,
    max_iter: usize,
    cert: Option<Certification>,
) -> Result<IterateTrace> {
    let l = inst.objective.lipschitz();
    match method {
        Method::Pg => {
            let config = PgConfig {
                alpha: 0.995 / l,
                f_tol: BENCH_F_TOL,
                max_iter,
                certification: cert,
                record_iterates: false,
            };
            pg_solve_with(&inst.objective, &inst.set, inst.s, &inst.x0, &config)
        }
        Method::Npg => {
            let mut config = family_config(inst.family, l);
            config.max_iter = max_iter;
            config.certification = cert;
            npg_solve(&inst.objective, &inst.set, inst.s, &inst.x0, &config)
        }
    }
}

/// One instance shape; `s: None` selects the family default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub family: Family,
    pub m: usize,
    pub n: usize,
    pub s: Option<usize>,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub methods: Vec<Method>,
    pub max_iter: usize,
    pub certification: Option<Certification>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            methods: vec![Method::Pg, Method::Npg],
            max_iter: crate::solvers::DEFAULT_MAX_ITER,
            certification: Some(Certification::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: Family,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub method: Method,
    pub seed: u64,
    pub cardinality: Option<usize>,
    pub objective: Option<f64>,
    pub time_s: Option<f64>,
    pub strong_stationary: Option<bool>,
    pub violation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    m: usize,
    n: usize,
    s: usize,
    method: &'a str,
    seed: u64,
    cardinality: Option<usize>,
    objective: Option<f64>,
    time_s: Option<f64>,
    strong_stationary: Option<bool>,
    violation: Option<f64>,
}

pub const CSV_HEADER: &str = "family,m,n,s,method,seed,cardinality,objective,time_s,strong_stationary,violation";

impl BenchReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
        for r in &self.rows {
            out.serialize(CsvRow {
                family: r.family.name(),
                m: r.m,
                n: r.n,
                s: r.s,
                method: r.method.name(),
                seed: r.seed,
                cardinality: r.cardinality,
                objective: r.objective,
                time_s: r.time_s,
                strong_stationary: r.strong_stationary,
                violation: r.violation,
            })
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Generates every `(case, seed)` instance and solves it with each method.
///
/// Failures are recorded in the affected rows and do not stop the batch.
/// Rows come out in declaration order: case, then seed, then method.
pub fn run_benchmark(cases: &[BenchCase], seeds: &[u64], options: &BenchOptions) -> BenchReport {
    let mut rows = Vec::new();
    for case in cases {
        for &seed in seeds {
            let inst = Instance::generate(case.family, case.m, case.n, case.s, case.sigma, seed);
            for &method in &options.methods {
                let mut row = BenchRow {
                    family: case.family,
                    m: case.m,
                    n: case.n,
                    s: case.s.unwrap_or_else(|| case.family.default_sparsity(case.n)),
                    method,
                    seed,
                    cardinality: None,
                    objective: None,
                    time_s: None,
                    strong_stationary: None,
                    violation: None,
                    error: None,
                };
                let outcome = inst
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|inst| solve_instance(inst, method, options.max_iter, options.certification));
                match outcome {
                    Ok(tr) => {
                        row.cardinality = Some(tr.cardinality());
                        row.objective = Some(tr.f_final);
                        row.time_s = Some(tr.wall_time_seconds);
                        if let Some(c) = &tr.certificate {
                            row.strong_stationary = Some(c.strong);
                            row.violation = Some(c.worst_violation);
                        }
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }
    BenchReport { rows }
}
