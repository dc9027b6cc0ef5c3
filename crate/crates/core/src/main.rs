//! Command-line interface: classify built-in example geometries and run the
//! verification suites, emitting JSON on standard output.

use clap::{Args, Parser, Subcommand};
use spin7lab::lab::{self, ExampleName, ExampleSpec, RunOptions};
use spin7lab::subman::GammaField;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spin7lab", version, about = "Spin(7)/SU(3) structure engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep an example geometry and emit a classification report
    Classify(ClassifyArgs),
    /// Run the invariant suites of every module
    Verify(VerifyArgs),
    /// List the built-in examples
    ExampleList,
}

#[derive(Args)]
struct ClassifyArgs {
    /// example name (see `example-list`)
    #[arg(long)]
    example: String,
    /// orientation sign of the fundamental form
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    sigma: i32,
    /// phase of the complex volume form: a float or `pi/4`-style token
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    gamma: String,
    /// grid side length (the sweep covers grid^2 points)
    #[arg(long, default_value_t = 3)]
    grid: usize,
    /// finite-difference step
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    /// classification tolerance
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// seed for the seeded examples
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// also write the report to this path
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// tolerance of the exact algebraic suites
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Parse `0`, `0.3`, `pi/4`, `-3pi/4` style phase expressions.
fn parse_gamma(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some(pos) = t.find("pi") {
        let (pre, post) = (&t[..pos], &t[pos + 2..]);
        let coeff = match pre {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse::<f64>()
                .map_err(|_| format!("bad phase coefficient `{}`", other))?,
        };
        let denom = if post.is_empty() {
            1.0
        } else if let Some(d) = post.strip_prefix('/') {
            d.parse::<f64>()
                .map_err(|_| format!("bad phase divisor `{}`", d))?
        } else {
            return Err(format!("cannot parse phase `{}`", s));
        };
        Ok(coeff * std::f64::consts::PI / denom)
    } else {
        t.parse::<f64>().map_err(|_| format!("cannot parse phase `{}`", s))
    }
}

fn classify(args: &ClassifyArgs) -> Result<bool, spin7lab::GeomError> {
    let name = ExampleName::parse(&args.example)?;
    let gamma = parse_gamma(&args.gamma)
        .map_err(spin7lab::GeomError::InvalidArgument)?;
    let mut spec = ExampleSpec::new(name);
    spec.sigma = args.sigma as f64;
    spec.gamma = GammaField::Constant(gamma);
    spec.grid = args.grid;
    spec.seed = args.seed;
    let example = lab::build_example(&spec)?;
    let opts = RunOptions {
        tol: args.tol,
        fd_step: args.h,
        fd_cross_check: true,
    };
    let report = lab::run_report(&spec, &example, &opts)?;
    let json = lab::to_json(&report)?;
    println!("{}", json);
    if let Some(path) = &args.json {
        std::fs::write(path, &json).map_err(|e| {
            spin7lab::GeomError::InvalidArgument(format!("cannot write {}: {}", path.display(), e))
        })?;
    }
    // within tolerance: every table row consistent and the cross-route
    // residuals below the documented FD bound
    let fd_bound = 1e4 * args.h * args.h;
    let ok = report.aggregate.all_rows_consistent
        && report
            .aggregate
            .max_residuals
            .iter()
            .filter(|(k, _)| k.ends_with("_agreement") || k.starts_with("trace_identity"))
            .all(|(_, &v)| v < fd_bound);
    Ok(ok)
}

fn verify(args: &VerifyArgs) -> Result<bool, spin7lab::GeomError> {
    let results = lab::run_all_suites(args.tol, args.seed)?;
    let json = serde_json::to_string_pretty(&results)
        .map_err(|e| spin7lab::GeomError::InvalidArgument(e.to_string()))?;
    println!("{}", json);
    Ok(results.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify(args) => classify(args),
        Command::Verify(args) => verify(args),
        Command::ExampleList => {
            for name in ExampleName::ALL {
                println!("{}", name.as_str());
            }
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let diag = serde_json::json!({ "error": e.to_string() });
            eprintln!("{}", diag);
            ExitCode::from(1)
        }
    }
}
