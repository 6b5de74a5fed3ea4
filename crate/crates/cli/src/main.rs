use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use npg_core::experiment::solve_instance;
use npg_core::instances::{read_point, write_point};
use npg_core::stationarity::{stationarity_report, uniform_grid, DEFAULT_GRID_POINTS};
use npg_core::{
    run_benchmark, BenchCase, BenchOptions, BenchReport, BenchRow, Certification, Family, Instance, Method,
    SmoothObjective,
};

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;

#[derive(Parser)]
#[command(name = "npg", version, about = "Sparse projected gradient solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance with one method and print the trace.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Npg)]
        method: MethodArg,
        #[command(flatten)]
        cert: CertArgs,
        #[arg(long, default_value_t = npg_core::solvers::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Also write the final point, one value per line.
        #[arg(long)]
        point_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare PG and NPG over consecutive seeds.
    Bench {
        /// Instance families, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        family: Vec<Family>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Sparsity; defaults to max(1, n/100) for logistic and simplex.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        cert: CertArgs,
        #[arg(long, default_value_t = npg_core::solvers::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the stationarity conditions at a point.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        /// Point file, one value per line.
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        cert: CertArgs,
        /// Right end of the stepsize grid; defaults to 0.995/L.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Sparsity; required for compressed sensing.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SourceArgs {
    /// Instance file written by `npg gen`.
    #[arg(long, conflicts_with_all = ["family", "m", "n", "s", "sigma", "seed"])]
    instance: Option<PathBuf>,
    #[arg(long, requires_all = ["m", "n"])]
    family: Option<Family>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CertArgs {
    /// Points in the stepsize grid of the stationarity check (0 disables it).
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Tolerance of the stationarity check.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl CertArgs {
    fn certification(&self) -> Option<Certification> {
        (self.grid_points > 0).then_some(Certification {
            grid_points: self.grid_points,
            tol: self.tol,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pg,
    Npg,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Pg => vec![Method::Pg],
            MethodArg::Npg => vec![Method::Npg],
            MethodArg::Both => vec![Method::Pg, Method::Npg],
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Solver(String),
}

impl From<npg_core::Error> for Failure {
    fn from(e: npg_core::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Gen { gen, out } => {
            let inst = Instance::generate(gen.family, gen.m, gen.n, gen.s, gen.sigma, gen.seed)?;
            emit(out.as_deref(), |w| inst.write_to(w))
        }
        Command::Solve {
            source,
            method,
            cert,
            max_iter,
            point_out,
            format,
            out,
        } => {
            let method = match method {
                MethodArg::Pg => Method::Pg,
                MethodArg::Npg => Method::Npg,
                MethodArg::Both => return Err(Failure::Usage("solve runs a single method".into())),
            };
            let inst = load_source(&source)?;
            let trace = solve_instance(&inst, method, max_iter, cert.certification())?;
            if let Some(path) = point_out {
                write_point(BufWriter::new(File::create(path)?), &trace.x_final)?;
            }
            match format {
                Format::Json => emit(out.as_deref(), |w| {
                    serde_json::to_writer_pretty(&mut *w, &trace).map_err(|e| npg_core::Error::Io(e.to_string()))?;
                    writeln!(w)?;
                    Ok(())
                }),
                Format::Csv => {
                    let row = BenchRow {
                        family: inst.family,
                        m: inst.m(),
                        n: inst.n(),
                        s: inst.s,
                        method,
                        seed: inst.seed,
                        cardinality: Some(trace.cardinality()),
                        objective: Some(trace.f_final),
                        time_s: Some(trace.wall_time_seconds),
                        strong_stationary: trace.certificate.as_ref().map(|c| c.strong),
                        violation: trace.certificate.as_ref().map(|c| c.worst_violation),
                        error: None,
                    };
                    let report = BenchReport { rows: vec![row] };
                    emit(out.as_deref(), |w| report.write_csv(w))
                }
            }
        }
        Command::Bench {
            family,
            m,
            n,
            s,
            sigma,
            seed,
            seeds,
            method,
            cert,
            max_iter,
            format,
            out,
        } => {
            let cases: Vec<BenchCase> = family
                .into_iter()
                .map(|family| BenchCase { family, m, n, s, sigma })
                .collect();
            let seeds: Vec<u64> = (0..seeds).map(|k| seed + k).collect();
            let options = BenchOptions {
                methods: method.methods(),
                max_iter,
                certification: cert.certification(),
            };
            let report = run_benchmark(&cases, &seeds, &options);
            emit(out.as_deref(), |w| match format {
                Format::Csv => report.write_csv(w),
                Format::Json => report.write_json(w),
            })?;
            if let Some(row) = report.rows.iter().find(|r| r.error.is_some()) {
                let msg = row.error.as_deref().unwrap_or_default();
                return Err(Failure::Solver(format!("{} seed {}: {msg}", row.family, row.seed)));
            }
            Ok(())
        }
        Command::Certify {
            instance,
            point,
            cert,
            t_max,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let x = read_point(BufReader::new(File::open(&point)?))?;
            if x.len() != inst.n() {
                return Err(npg_core::Error::DimensionMismatch {
                    expected: inst.n(),
                    actual: x.len(),
                }
                .into());
            }
            let t_max = t_max.unwrap_or(0.995 / inst.objective.lipschitz());
            if !(t_max > 0.0) {
                return Err(Failure::Usage("--t-max must be positive".into()));
            }
            let grid = uniform_grid(t_max, cert.grid_points.max(1));
            let report = stationarity_report(&inst.objective, &inst.set, inst.s, &x, &grid, cert.tol);
            emit(out.as_deref(), |w| {
                serde_json::to_writer_pretty(&mut *w, &report).map_err(|e| npg_core::Error::Io(e.to_string()))?;
                writeln!(w)?;
                Ok(())
            })
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(Instance::read_from(BufReader::new(File::open(path)?))?)
}

fn load_source(src: &SourceArgs) -> Result<Instance, Failure> {
    if let Some(path) = &src.instance {
        return read_instance(path);
    }
    match (src.family, src.m, src.n) {
        (Some(family), Some(m), Some(n)) => Ok(Instance::generate(
            family,
            m,
            n,
            src.s,
            src.sigma.unwrap_or(0.1),
            src.seed.unwrap_or(0),
        )?),
        _ => Err(Failure::Usage("give either --instance or --family with --m and --n".into())),
    }
}

fn emit(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> npg_core::Result<()>,
) -> Outcome {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
