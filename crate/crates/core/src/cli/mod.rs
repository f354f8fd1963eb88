//! The `maxent` command line.
//!
//! Exit codes: 0 success, 1 solver failure or failed check, 2 input error,
//! 3 size limit.

mod output;
mod spec;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::maxent::{
    direct_system_weighted, dual_system_weighted, fit_algebraic, fit_numeric, kl_divergence,
    moments, shannon_entropy, FitOptions, SolverKind,
};
use crate::par::{self, Execution};
use crate::ratpoly::{rat_to_f64, MonomialOrder};
use crate::toric::{toric_ideal_generators, DistributionVector, MAX_IDEAL_COLUMNS};

pub use output::format_real;
pub use spec::{parse_problem, parse_rational, ConstraintSpec, ProblemSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIZE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "maxent",
    version,
    about = "Maximum-entropy fitting with exact polynomial systems and toric ideals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model to the targets or samples of each problem
    Fit(FitArgs),
    /// Print the direct polynomial system of the moment equations
    System(EmitArgs),
    /// Print the gradient system of the dual objective
    Dual(EmitArgs),
    /// Print generators of the toric ideal of the constraint matrix
    Ideal(EmitArgs),
    /// Check that a distribution lies in the model and matches the targets
    Check(CheckArgs),
    /// Entropy of a distribution and its divergence from the prior
    Entropy(DistArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Gis,
    Newton,
    Groebner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Lex,
    Grevlex,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Problem files in JSON; `-` reads standard input
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value = "newton")]
    pub solver: SolverArg,
    /// Tolerance on the largest moment residual
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration limit (default 10000 for gis, 100 for newton)
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Monomial order for the groebner solver
    #[arg(long, value_enum, default_value = "lex")]
    pub order: OrderArg,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Distribution as a JSON array or a fit result; `-` reads standard input
    #[arg(long)]
    pub dist: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Tolerance for moment residuals and generator values
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfeasibleMoments { .. }
        | Error::RankDeficient(_)
        | Error::UnsupportedStructure(_) => EXIT_SOLVER,
        Error::SizeLimit(_) => EXIT_SIZE,
        Error::Dimension(_)
        | Error::Domain(_)
        | Error::Argument(_)
        | Error::Parse { .. }
        | Error::Input(_) => EXIT_INPUT,
    }
}

/// Output of one problem file.
struct Report {
    stdout: String,
    stderr: String,
    code: i32,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn failed(label: &str, e: &Error) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("{label}: error: {e}\n"),
            code: exit_code(e),
        }
    }
}

fn is_stdin(p: &std::path::Path) -> bool {
    p.as_os_str() == "-"
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INPUT
                }
            };
        }
    };
    execute(&cli.command, stdin, out, err)
}

fn execute(cmd: &Command, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let inputs = match cmd {
        Command::Fit(a) => &a.inputs,
        Command::System(a) | Command::Dual(a) | Command::Ideal(a) => &a.inputs,
        Command::Check(a) => &a.dist.inputs,
        Command::Entropy(a) => &a.inputs,
    };
    let dist_path = match cmd {
        Command::Check(a) => Some(&a.dist.dist),
        Command::Entropy(a) => Some(&a.dist),
        _ => None,
    };
    let stdin_users = inputs.files.iter().filter(|p| is_stdin(p)).count()
        + dist_path.iter().filter(|p| is_stdin(p)).count();
    if stdin_users > 1 {
        let _ = writeln!(err, "error: standard input can be read only once");
        return EXIT_INPUT;
    }
    let mut stdin_text = None;
    if stdin_users == 1 {
        let mut s = String::new();
        if let Err(e) = stdin.read_to_string(&mut s) {
            let _ = writeln!(err, "error: reading standard input: {e}");
            return EXIT_INPUT;
        }
        stdin_text = Some(s);
    }
    let read = |p: &PathBuf| -> Result<String> {
        if is_stdin(p) {
            Ok(stdin_text.clone().unwrap_or_default())
        } else {
            std::fs::read_to_string(p)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", p.display())))
        }
    };

    let dist = match dist_path.map(|p| read(p).and_then(|t| parse_distribution(&t))) {
        Some(Err(e)) => {
            let _ = writeln!(err, "error: distribution: {e}");
            return exit_code(&e);
        }
        Some(Ok(d)) => Some(d),
        None => None,
    };

    let reports = par::map(Execution::default(), &inputs.files, |path| {
        let label = path.display().to_string();
        let spec = match read(path).and_then(|t| parse_problem(&t)) {
            Ok(s) => s,
            Err(e) => return Report::failed(&label, &e),
        };
        let result = match cmd {
            Command::Fit(a) => cmd_fit(&spec, a),
            Command::System(a) => cmd_system(&spec, a.inputs.format, false),
            Command::Dual(a) => cmd_system(&spec, a.inputs.format, true),
            Command::Ideal(a) => cmd_ideal(&spec, a.inputs.format),
            Command::Check(a) => cmd_check(&spec, a, dist.as_ref().expect("read above")),
            Command::Entropy(a) => {
                cmd_entropy(&spec, a.inputs.format, dist.as_ref().expect("read above"))
            }
        };
        match result {
            Ok(r) => r,
            Err(e) => Report::failed(&label, &e),
        }
    });

    let mut code = EXIT_OK;
    for r in reports {
        let _ = out.write_all(r.stdout.as_bytes());
        let _ = err.write_all(r.stderr.as_bytes());
        code = code.max(r.code);
    }
    code
}

/// A JSON array of probabilities or an object with a `p` array.
pub fn parse_distribution(text: &str) -> Result<DistributionVector> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("invalid distribution: {e}")))?;
    let arr = match &v {
        Value::Array(a) => a,
        Value::Object(o) => o
            .get("p")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input("object without a `p` array".into()))?,
        _ => {
            return Err(Error::Input(
                "expected an array or an object with `p`".into(),
            ))
        }
    };
    let probs = arr
        .iter()
        .enumerate()
        .map(|(j, x)| match x {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Input(format!("p[{j}]: not a finite number"))),
            Value::String(s) => parse_rational(s)
                .map(|q| rat_to_f64(&q))
                .map_err(|e| Error::Input(format!("p[{j}]: {e}"))),
            _ => Err(Error::Input(format!("p[{j}]: expected a number"))),
        })
        .collect::<Result<Vec<f64>>>()?;
    DistributionVector::new(probs).map_err(|e| Error::Input(e.to_string()))
}

fn order_for(arg: OrderArg, d: usize) -> MonomialOrder {
    match arg {
        OrderArg::Lex => MonomialOrder::lex(d),
        OrderArg::Grevlex => MonomialOrder::grevlex(d),
    }
}

fn cmd_fit(spec: &ProblemSpec, args: &FitArgs) -> Result<Report> {
    let problem = spec.to_problem()?;
    let opts = FitOptions {
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let mut warning = String::new();
    let fit = match args.solver {
        SolverArg::Gis => fit_numeric(&problem, SolverKind::Gis, &opts)?,
        SolverArg::Newton => fit_numeric(&problem, SolverKind::Newton, &opts)?,
        SolverArg::Groebner => {
            match fit_algebraic(&problem, &order_for(args.order, problem.matrix().d())) {
                Ok(f) => f,
                Err(Error::UnsupportedStructure(msg)) => {
                    warning =
                        format!("warning: algebraic solver unavailable ({msg}); using newton\n");
                    fit_numeric(&problem, SolverKind::Newton, &opts)?
                }
                Err(e) => return Err(e),
            }
        }
    };
    let m = moments(problem.matrix(), &fit.p)?;
    let stdout = match args.inputs.format.unwrap_or(Format::Json) {
        Format::Json => output::to_json_string(&output::fit_json(&fit, &m)),
        Format::Text => output::fit_text(&fit, &m),
    };
    Ok(Report {
        stdout,
        stderr: warning,
        code: EXIT_OK,
    })
}

fn cmd_system(spec: &ProblemSpec, format: Option<Format>, dual: bool) -> Result<Report> {
    let problem = spec.to_problem()?;
    let a = problem.matrix();
    let system = if dual {
        dual_system_weighted(a, problem.targets(), problem.prior())?
    } else {
        direct_system_weighted(a, &problem.exact_targets(), problem.prior())?
    };
    Ok(Report::ok(match format.unwrap_or(Format::Text) {
        Format::Json => output::to_json_string(&output::system_json(&system)),
        Format::Text => output::system_text(&system),
    }))
}

fn cmd_ideal(spec: &ProblemSpec, format: Option<Format>) -> Result<Report> {
    let gens = toric_ideal_generators(&spec.matrix()?)?;
    Ok(Report::ok(match format.unwrap_or(Format::Text) {
        Format::Json => output::to_json_string(&output::ideal_json(&gens)),
        Format::Text => output::ideal_text(&gens),
    }))
}

fn check_problem(spec: &ProblemSpec, p: &DistributionVector) -> Result<()> {
    if p.len() != spec.m {
        return Err(Error::Input(format!(
            "distribution has {} cells, the problem has {}",
            p.len(),
            spec.m
        )));
    }
    Ok(())
}

/// Generators of the model family through the normalized cells `p_j / h_j`.
///
/// The family is the toric variety of the constraint matrix with a row of
/// ones added, which makes every generator homogeneous and the test
/// independent of the normalization of `h`.
fn family_residual(
    problem_matrix: &crate::toric::ConstraintMatrix,
    p: &[f64],
    h: &[f64],
) -> Result<Option<f64>> {
    if problem_matrix.m() > MAX_IDEAL_COLUMNS {
        return Ok(None);
    }
    let gens = toric_ideal_generators(&problem_matrix.with_ones_row())?;
    let scaled: Vec<f64> = p.iter().zip(h).map(|(x, w)| x / w).collect();
    let values = gens.evaluate(&scaled)?;
    Ok(Some(values.iter().map(|v| v.abs()).fold(0.0, f64::max)))
}

fn cmd_check(spec: &ProblemSpec, args: &CheckArgs, p: &DistributionVector) -> Result<Report> {
    check_problem(spec, p)?;
    let a = spec.matrix()?;
    let h: Vec<f64> = spec.prior_or_ones().iter().map(rat_to_f64).collect();
    let family = family_residual(&a, p, &h)?;
    let got = moments(&a, p)?;
    let targets: Option<Vec<f64>> = if spec.has_targets() {
        Some(spec.to_problem()?.target_values())
    } else {
        None
    };
    let moment_residual = targets.as_ref().map(|t| {
        got.iter()
            .zip(t)
            .map(|(g, t)| (g - t).abs())
            .fold(0.0, f64::max)
    });
    let member = family.map(|r| r <= args.tol);
    let matches = moment_residual.map(|r| r <= args.tol);
    let pass = member.unwrap_or(true) && matches.unwrap_or(true);

    let stdout = match args.dist.inputs.format.unwrap_or(Format::Json) {
        Format::Json => {
            let opt_real = |x: Option<f64>| x.map_or(Value::Null, output::real);
            let obj = output::Object::new()
                .with("pass", pass)
                .with("member", member.map_or(Value::Null, Value::Bool))
                .with("family_residual", opt_real(family))
                .with("moments_match", matches.map_or(Value::Null, Value::Bool))
                .with("moment_residual", opt_real(moment_residual))
                .with("moments", output::reals(&got))
                .with("tol", output::real(args.tol));
            output::to_json_string(&obj.into_value())
        }
        Format::Text => {
            let show = |x: Option<f64>| x.map_or("n/a".to_string(), format_real);
            format!(
                "pass: {pass}\nfamily_residual: {}\nmoment_residual: {}\n",
                show(family),
                show(moment_residual)
            )
        }
    };
    Ok(Report {
        stdout,
        stderr: String::new(),
        code: if pass { EXIT_OK } else { EXIT_SOLVER },
    })
}

fn cmd_entropy(
    spec: &ProblemSpec,
    format: Option<Format>,
    p: &DistributionVector,
) -> Result<Report> {
    check_problem(spec, p)?;
    let h: Vec<f64> = spec.prior_or_ones().iter().map(rat_to_f64).collect();
    let h = DistributionVector::from_weights(&h)?;
    let s = shannon_entropy(p);
    let kl = kl_divergence(p, &h)?;
    Ok(Report::ok(match format.unwrap_or(Format::Json) {
        Format::Json => output::to_json_string(
            &output::Object::new()
                .with("entropy", output::real(s))
                .with("kl_to_prior", output::real(kl))
                .into_value(),
        ),
        Format::Text => format!(
            "entropy: {}\nkl_to_prior: {}\n",
            format_real(s),
            format_real(kl)
        ),
    }))
}
