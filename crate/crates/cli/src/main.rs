mod commands;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treeconf::fp::{is_prime, DEFAULT_PRIME};
use treeconf::rational::{parse_q, Q};
use treeconf::Error;

/// Exact two-parameter persistent homology of second configuration spaces of metric trees.
#[derive(Parser, Debug)]
#[command(name = "treeconf", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Betti numbers and torsion of X^2_{r,L}.
    Betti {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cell counts and, optionally, the incidence listing of the cell complex.
    Complex {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        incidence: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Critical lines, chamber samples and the Hasse diagram of the chamber poset.
    Chambers {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the chamber arrangement labelled with (h0, h1).
    Plot {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The persistence module PH_degree over the chamber poset.
    Module {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Indecomposable summands of PH_degree and their multiplicities.
    Decompose {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sweeps every chamber and compares the pipeline against the closed forms.
    Verify {
        #[command(flatten)]
        graph: GraphSource,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also check the Mayer-Vietoris pages of the built-in cover.
        #[arg(long)]
        mv: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rewrites a graph file so loops and parallel edges become simple paths.
    Subdivide {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Star graph with k edges; the edge e1 has length L, the others 1.
    #[arg(long, value_name = "K")]
    pub star: Option<usize>,
    /// Generalized H graph with hub degrees M and N; the bridge has length L.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    pub h: Option<Vec<usize>>,
    /// Graph file in JSON form.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[arg(long, value_parser = positive_q)]
    pub r: Q,
    #[arg(long = "L", value_parser = positive_q)]
    pub l: Q,
    #[command(flatten)]
    pub field: FieldArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long, default_value_t = DEFAULT_PRIME, value_parser = prime)]
    pub prime: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

fn positive_q(s: &str) -> Result<Q, String> {
    let x = parse_q(s).map_err(|e| e.to_string())?;
    if x <= Q::from_integer(0.into()) {
        return Err(format!("{s} is not positive"));
    }
    Ok(x)
}

fn prime(s: &str) -> Result<u32, String> {
    let p: u32 = s.parse().map_err(|_| format!("{s} is not an integer"))?;
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    Ok(p)
}

/// Result of a subcommand: the rendered output and whether every check passed.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

fn error_kind(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Parse(_) => ("parse", 2),
        Error::NotATree(_) => ("not_a_tree", 2),
        Error::NonPositiveLength(_) => ("non_positive_length", 2),
        Error::InvalidArgument(_) => ("invalid_argument", 2),
        Error::PointNotOnGraph(_) => ("point_not_on_graph", 2),
        Error::OnWall => ("on_wall", 2),
        Error::Unsupported(_) => ("unsupported", 2),
        Error::IllGlued(_) => ("ill_glued", 1),
        Error::NotComparable(_) => ("not_comparable", 1),
        Error::AmbiguousWall(_) => ("ambiguous_wall", 1),
        Error::CommutativityViolation(_) => ("commutativity_violation", 1),
        Error::TorsionDetected(_) => ("torsion_detected", 1),
        Error::IndecomposabilityUndecided(..) => ("indecomposability_undecided", 1),
        Error::NotACover(_) => ("not_a_cover", 1),
        Error::ColumnsOutOfRange => ("columns_out_of_range", 1),
    }
}

/// Exit code and captured streams of one invocation.
pub struct Run {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

fn failure(kind: &str, message: &str, code: u8) -> Run {
    let record = serde_json::json!({ "error": { "kind": kind, "message": message }, "exit_code": code });
    Run { code, stdout: String::new(), stderr: format!("{record}\n") }
}

/// Runs the command line `argv` (program name first).
pub fn run<I, T>(argv: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => return Run { code: 0, stdout: e.render().to_string(), stderr: String::new() },
        Err(e) => return failure("usage", e.render().to_string().trim(), 2),
    };
    let out_path = match &cli.command {
        Command::Chambers { out, .. } | Command::Plot { out, .. } => out.clone(),
        _ => None,
    };
    match commands::run(&cli.command) {
        Ok(outcome) => {
            let code = if outcome.passed { 0 } else { 1 };
            match out_path {
                Some(p) => match std::fs::write(&p, &outcome.body) {
                    Ok(()) => Run { code, stdout: String::new(), stderr: String::new() },
                    Err(e) => failure("io", &format!("{}: {e}", p.display()), 2),
                },
                None => Run { code, stdout: outcome.body, stderr: String::new() },
            }
        }
        Err(e) => {
            let (kind, code) = error_kind(&e);
            failure(kind, &e.to_string(), code)
        }
    }
}

fn main() -> ExitCode {
    let r = run(std::env::args_os());
    let ok = std::io::stdout().write_all(r.stdout.as_bytes()).is_ok();
    let _ = std::io::stderr().write_all(r.stderr.as_bytes());
    if !ok {
        return ExitCode::from(2);
    }
    ExitCode::from(r.code)
}
