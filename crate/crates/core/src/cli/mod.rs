//! Command-line front end: argument parsing, dispatch, report output and
//! exit codes.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 unreadable or
//! invalid input, 3 shape mismatch, 4 numerical failure.

pub mod commands;
pub mod demo;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::error::Error;
use commands::Params;
use report::{Header, Status};

pub const SEED_ENV: &str = "SSRLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "ssrlab", version, about = "Superselection structure of finite-dimensional observable algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebra generated by matrices: commutant, sectors, Dirac check.
    Analyze(InputArgs),
    /// Split a state across given sector projectors.
    Reduce(InputArgs),
    /// Check a measurement model against a conserved additive charge.
    WayCheck(InputArgs),
    /// Multipliers, triviality and direct sums of projective representations.
    RayRep(InputArgs),
    /// CPTP, covariance and twirling of a Kraus channel.
    Channel(InputArgs),
    /// Run a built-in scenario: einselection, univalence or way.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    pub name: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Overridden by the SSRLAB_SEED environment variable when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1e-8")]
    pub tol: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ShapeMismatch(_) | Error::NotSquare { .. } | Error::GroupMismatch => 3,
        Error::NonFinite(_) | Error::Numerical(_) => 4,
        Error::NotConserving { .. } | Error::NotAMeasurement { .. } => 1,
        Error::NotHermitian { .. }
        | Error::NotUnitary { .. }
        | Error::NotDensityMatrix(_)
        | Error::InvalidInput(_)
        | Error::NotProjective { .. }
        | Error::InvalidGroup(_) => 2,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::new(exit_code(&e), e.to_string())
    }
}

/// Rendered report and the exit code it implies.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub rendered: String,
    pub status: Status,
    pub output: Option<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Fail => 1,
            Status::Ok | Status::Pass => 0,
        }
    }
}

fn parse_tol(text: &str) -> Result<f64, CliError> {
    match text.trim().parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(CliError::new(2, format!("--tol must be a positive finite number, got {text:?}"))),
    }
}

fn resolve_seed(flag: u64, env: Option<&str>) -> Result<u64, CliError> {
    match env {
        None => Ok(flag),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::new(2, format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))),
    }
}

/// Runs a parsed command. `env_seed` is the value of [`SEED_ENV`], if set.
pub fn execute(cli: Cli, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let (name, input, common, demo_name) = match cli.command {
        Command::Analyze(a) => ("analyze", Some(a.input), a.common, None),
        Command::Reduce(a) => ("reduce", Some(a.input), a.common, None),
        Command::WayCheck(a) => ("way-check", Some(a.input), a.common, None),
        Command::RayRep(a) => ("ray-rep", Some(a.input), a.common, None),
        Command::Channel(a) => ("channel", Some(a.input), a.common, None),
        Command::Demo(d) => ("demo", None, d.common, Some(d.name)),
    };
    let tol = parse_tol(&common.tol)?;
    let seed = resolve_seed(common.seed, env_seed)?;
    let params = Params { seed, tol };

    let (text, digest_source) = match &input {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::new(2, format!("cannot read {}: {e}", path.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| CliError::new(2, format!("{} is not UTF-8", path.display())))?;
            (text, bytes)
        }
        None => {
            let n = demo_name.clone().unwrap_or_default();
            (String::new(), n.into_bytes())
        }
    };
    let report = match name {
        "analyze" => commands::analyze(&text, params),
        "reduce" => commands::reduce(&text, params),
        "way-check" => commands::way_check(&text, params),
        "ray-rep" => commands::ray_rep(&text, params),
        "channel" => commands::channel(&text, params),
        _ => demo::run(demo_name.as_deref().unwrap_or_default(), params),
    }?;

    let header = Header {
        command: match &demo_name {
            Some(d) => format!("demo {d}"),
            None => name.to_string(),
        },
        seed,
        tol,
        tol_text: common.tol.clone(),
        input_sha256: hex::encode(Sha256::digest(&digest_source)),
    };
    let rendered = match common.format {
        Format::Text => report::render_text(&header, &report),
        Format::Json => report::render_json(&header, &report),
    };
    Ok(Outcome {
        rendered,
        status: report.status,
        output: common.output,
    })
}

/// Full program: parse `args`, run, write the report, return the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match execute(cli, env_seed.as_deref()) {
        Ok(out) => {
            let written = match &out.output {
                Some(path) => std::fs::write(path, &out.rendered)
                    .map_err(|e| CliError::new(2, format!("cannot write {}: {e}", path.display()))),
                None => {
                    print!("{}", out.rendered);
                    Ok(())
                }
            };
            match written {
                Ok(()) => out.exit_code(),
                Err(e) => {
                    eprintln!("error: {}", e.message);
                    e.code
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
