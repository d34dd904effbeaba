//! The `vie` command line: `bench`, `solve` and `validate`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage error (bad flag, unknown problem, method/problem mismatch) |
//! | 2 | solver or I/O error |
//! | 3 | validation failure |
//! | 4 | problem-file parse error |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::builtin::{builtin_example, Problem, RhsVariant, NAMES};
use crate::convergence::{halving_chain, run_benchmark, segments_for_step, solve_with, Method};
use crate::error::VieError;
use crate::func::RealFn;
use crate::iterative::IterativeConfig;
use crate::mesh::Mesh;
use crate::nonlinear::{DirectConfig, NkConfig};
use crate::problem::{ValidationReport, CHECK_RHS_ORIGIN, DEFAULT_SAMPLES};
use crate::problem_file::load_problem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "vie",
    version,
    about = "Volterra first-kind equations with discontinuous kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence table over a halving chain of steps.
    Bench(BenchArgs),
    /// Solve at one step and print `t,x` samples.
    Solve(SolveArgs),
    /// Check the structural hypotheses of a problem file.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Pc,
    Pl,
    Iter,
    Nk,
    Nld,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RhsArg {
    Manufactured,
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Built-in name (example1..example4) or path to a problem file.
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Right-hand side of a built-in example.
    #[arg(long, value_enum, default_value = "manufactured")]
    rhs: RhsArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Regularization parameters tried by `iter`.
    #[arg(long, value_delimiter = ',')]
    gamma_grid: Option<Vec<f64>>,
    /// Sweep limit for `iter`, outer-step limit for `nk`.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Stagnation threshold for `iter`, iterate-gap tolerance for `nk`.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Coarsest step `1/N`, e.g. `1/32` or `0.03125`.
    #[arg(long, value_parser = parse_step, default_value = "1/32")]
    h_max: f64,
    /// Finest step.
    #[arg(long, value_parser = parse_step, default_value = "1/4096")]
    h_min: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Step `1/N`.
    #[arg(long, value_parser = parse_step, default_value = "1/128")]
    h: f64,
    /// Number of sample intervals; `samples + 1` rows are written.
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    path: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

/// Parses `1/N` or a decimal step.
fn parse_step(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in '{s}'"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in '{s}'"))?;
            a / b
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("'{s}' is not a number"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("step must be positive, got '{s}'"))
    }
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<VieError> for Failure {
    fn from(e: VieError) -> Self {
        let code = match e {
            VieError::Parse { .. } => EXIT_PARSE,
            _ => EXIT_SOLVER,
        };
        Failure::new(code, e.to_string())
    }
}

struct Resolved {
    name: String,
    problem: Problem,
    exact: Option<RealFn>,
    direct: DirectConfig,
    nk: NkConfig,
}

fn resolve(run: &RunArgs) -> Result<Resolved, Failure> {
    if NAMES.contains(&run.problem.as_str()) {
        let variant = match run.rhs {
            RhsArg::Manufactured => RhsVariant::Manufactured,
            RhsArg::Printed => RhsVariant::Printed,
        };
        let ex = builtin_example(&run.problem, variant)?;
        return Ok(Resolved {
            name: ex.name.to_string(),
            direct: ex.direct_config(),
            nk: ex.nk_config(),
            problem: ex.problem,
            exact: Some(ex.exact),
        });
    }
    let path = Path::new(&run.problem);
    if !path.exists() {
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "unknown problem '{}': expected one of {} or a file path",
                run.problem,
                NAMES.join(", ")
            ),
        ));
    }
    if run.rhs == RhsArg::Printed {
        return Err(Failure::new(
            EXIT_USAGE,
            "--rhs printed applies to built-in examples only",
        ));
    }
    let def = load_problem(path)?;
    Ok(Resolved {
        direct: def.direct_config(),
        nk: def.nk_config(),
        name: def.name,
        problem: def.problem,
        exact: def.exact,
    })
}

fn method(run: &RunArgs, resolved: &Resolved) -> Result<Method, Failure> {
    let method = match run.method {
        MethodArg::Pc => Method::Constant,
        MethodArg::Pl => Method::Linear,
        MethodArg::Iter => {
            let mut c = IterativeConfig::default();
            if let Some(g) = &run.gamma_grid {
                c.gamma_grid = g.clone();
            }
            if let Some(m) = run.max_iter {
                c.max_iter = m;
            }
            if let Some(t) = run.tol {
                c.stagnation = t;
            }
            Method::Iterative(c)
        }
        MethodArg::Nk => {
            let mut c = resolved.nk.clone();
            if let Some(m) = run.max_iter {
                c.max_outer = m;
            }
            if let Some(t) = run.tol {
                c.tolerance = t;
            }
            Method::NewtonKantorovich(c)
        }
        MethodArg::Nld => Method::NonlinearDirect(resolved.direct),
    };
    if method.needs_linear() != resolved.problem.is_linear() {
        let want = if method.needs_linear() {
            "linear"
        } else {
            "nonlinear"
        };
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "method {} needs a {want} problem; '{}' is not",
                method.id(),
                resolved.name
            ),
        ));
    }
    Ok(method)
}

/// Structural failures abort; a nonzero `f(0)` only warns.
fn precheck(problem: &Problem, stderr: &mut dyn Write) -> Result<(), Failure> {
    let report = problem.validate(DEFAULT_SAMPLES);
    if let Some(c) = report.structural_failures().next() {
        return Err(Failure::new(
            EXIT_VALIDATION,
            format!("validation failed: {} (measured {:e})", c.name, c.measured),
        ));
    }
    if let Some(c) = report.check(CHECK_RHS_ORIGIN).filter(|c| !c.passed) {
        let _ = writeln!(stderr, "warning: f(0) != 0 (|f(0)| = {:e})", c.measured);
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let result = match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    result.map_err(|m| Failure::new(EXIT_SOLVER, m))
}

fn bench(args: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let steps = halving_chain(args.h_max, args.h_min)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    for &h in &steps {
        segments_for_step(h).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    }
    let resolved = resolve(&args.run)?;
    let method = method(&args.run, &resolved)?;
    precheck(&resolved.problem, stderr)?;
    let report = run_benchmark(
        &resolved.name,
        &resolved.problem,
        resolved.exact.as_ref(),
        &method,
        &steps,
    )?;
    let text = match args.run.format {
        Format::Csv => report.to_csv(),
        Format::Md => report.to_markdown(),
    };
    emit(&text, args.run.out.as_deref(), stdout)
}

fn solve(args: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let n = segments_for_step(args.h).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if args.samples == 0 {
        return Err(Failure::new(EXIT_USAGE, "--samples must be positive"));
    }
    let resolved = resolve(&args.run)?;
    let method = method(&args.run, &resolved)?;
    precheck(&resolved.problem, stderr)?;
    let horizon = resolved.problem.horizon();
    let mesh = Mesh::uniform(n, horizon)?;
    let solution = solve_with(&resolved.problem, &method, &mesh)?;
    let rows: Vec<(f64, f64)> = (0..=args.samples)
        .map(|i| {
            let t = horizon * i as f64 / args.samples as f64;
            (t, solution.evaluate(t))
        })
        .collect();
    if let Some((t, x)) = rows.iter().find(|(_, x)| !x.is_finite()) {
        return Err(Failure::new(
            EXIT_SOLVER,
            format!("non-finite solution value {x} at t={t}"),
        ));
    }
    let mut text = String::new();
    match args.run.format {
        Format::Csv => {
            text.push_str("t,x\n");
            for (t, x) in rows {
                text.push_str(&format!("{t:.11e},{x:.11e}\n"));
            }
        }
        Format::Md => {
            text.push_str("| t | x |\n|---|---|\n");
            for (t, x) in rows {
                text.push_str(&format!("| {t:.11e} | {x:.11e} |\n"));
            }
        }
    }
    emit(&text, args.run.out.as_deref(), stdout)
}

fn validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let def = load_problem(&args.path)?;
    let report: ValidationReport = def.problem.validate(args.samples.max(2));
    let _ = writeln!(stdout, "{}\n{report}", def.name);
    if report.overall {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VALIDATION, "validation failed"))
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Diagnostics go to `stderr` as single lines.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bench(a) => bench(a, stdout, stderr),
        Command::Solve(a) => solve(a, stdout, stderr),
        Command::Validate(a) => validate(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
