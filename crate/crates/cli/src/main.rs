use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toric_cli::commands::{self, Example};
use toric_cli::format::{FanFile, ResultFile};
use toric_cli::CliError;

/// Toric Calabi-Yau cones: crepant resolutions, support functions, Reeb
/// vectors and symplectic potentials.
#[derive(Parser)]
#[command(name = "toric", version)]
struct Cli {
    /// Print JSON instead of text. Errors become `{"error", "code"}` objects.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validity, Gorenstein data, moment cone and slice polytope.
    Analyze { fan: PathBuf },
    /// Crepant resolution by a basic triangulation of the slice polygon.
    Resolve {
        fan: PathBuf,
        /// Flop the i-th interior edge (sorted order); repeatable.
        #[arg(long = "flop")]
        flops: Vec<usize>,
    },
    /// A compact strictly convex support function on the resolution.
    Support {
        fan: PathBuf,
        #[arg(long = "flop")]
        flops: Vec<usize>,
    },
    /// The volume-minimizing Reeb vector.
    Reeb { fan: PathBuf },
    /// Numerical checks on the canonical potential and the volume.
    Verify { fan: PathBuf },
    /// SVG picture of the triangulated slice polygon.
    Render {
        fan: PathBuf,
        #[arg(long = "flop")]
        flops: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in fan file.
    Example {
        #[command(subcommand)]
        which: ExampleName,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExampleName {
    Ypq {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
    },
    CanonicalCp2,
    CanonicalCp2TwoPoints,
    CanonicalCp1,
    Conifold,
    AffineSpace {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

impl From<ExampleName> for Example {
    fn from(e: ExampleName) -> Self {
        match e {
            ExampleName::Ypq { p, q } => Example::Ypq { p, q },
            ExampleName::CanonicalCp2 => Example::CanonicalCp2,
            ExampleName::CanonicalCp2TwoPoints => Example::CanonicalCp2TwoPoints,
            ExampleName::CanonicalCp1 => Example::CanonicalCp1,
            ExampleName::Conifold => Example::Conifold,
            ExampleName::AffineSpace { n } => Example::AffineSpace { n },
        }
    }
}

fn write_or_print(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit(r: &ResultFile, json: bool) {
    if json {
        print!("{}", r.to_json());
    } else {
        print!("{}", r.to_text());
    }
}

/// Runs one subcommand. A failed verification has already printed its
/// report, so it comes back as `Ok(Some(error))` rather than through `Err`.
fn run(cli: Cli) -> Result<Option<CliError>, CliError> {
    let json = cli.json;
    match cli.command {
        Command::Analyze { fan } => emit(&commands::analyze(&FanFile::read(&fan)?)?, json),
        Command::Resolve { fan, flops } => {
            emit(&commands::resolve(&FanFile::read(&fan)?, &flops)?, json)
        }
        Command::Support { fan, flops } => {
            emit(&commands::support(&FanFile::read(&fan)?, &flops)?, json)
        }
        Command::Reeb { fan } => emit(&commands::reeb(&FanFile::read(&fan)?)?, json),
        Command::Verify { fan } => {
            let r = commands::verify(&FanFile::read(&fan)?)?;
            emit(&r, json);
            if !r.all_checks_pass() {
                let failed: Vec<&str> = r
                    .checks
                    .iter()
                    .filter(|(_, c)| !c.pass)
                    .map(|(k, _)| k.as_str())
                    .collect();
                return Ok(Some(CliError::Verification(failed.join(", "))));
            }
        }
        Command::Render { fan, flops, out } => {
            let svg = commands::render(&FanFile::read(&fan)?, &flops)?;
            write_or_print(&svg, out.as_deref())?;
        }
        Command::Example { which, out } => {
            let file = commands::example(which.into())?;
            write_or_print(&file.to_json(), out.as_deref())?;
        }
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            let code = e.exit_code();
            if json {
                let body = serde_json::json!({ "error": e.to_string(), "code": code });
                println!("{body}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
