use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qsr_cli::commands::{self, EXIT_USAGE};
use qsr_cli::ScenarioFile;

/// Qualitative spatial scenarios as relation-variable constraint networks.
#[derive(Parser)]
#[command(name = "qsr", version)]
struct Cli {
    /// One JSON record per result instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario to its fixpoint (exit 1 if inconsistent).
    Check { file: PathBuf },
    /// Search for an atomic refinement (exit 1 if there is none).
    Decide {
        file: PathBuf,
        /// Stream every atomic refinement.
        #[arg(long)]
        all: bool,
    },
    /// Check the shipped and derived calculi.
    ValidateTables {
        /// Also validate this calculus file.
        #[arg(long)]
        calculus: Option<PathBuf>,
    },
    /// Compare path consistency with propagation on random RCC-8 networks.
    Verify {
        #[arg(long, default_value_t = 500)]
        instances: usize,
        #[arg(long = "max-n", default_value_t = 8, value_parser = clap::value_parser!(u64).range(3..=32))]
        max_n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print a derived calculus in calculus-file syntax.
    Derive {
        which: Derived,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Derived {
    Cyc,
    Size,
    Pointcd,
    Dirsets,
    Rcc8,
}

impl Derived {
    fn name(self) -> &'static str {
        match self {
            Derived::Cyc => "cyc",
            Derived::Size => "size",
            Derived::Pointcd => "pointcd",
            Derived::Dirsets => "dirsets",
            Derived::Rcc8 => "rcc8",
        }
    }
}

fn read(path: &Path) -> Result<ScenarioFile, u8> {
    ScenarioFile::read(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn run(cli: Cli, out: &mut dyn Write) -> io::Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Check { file } => match read(&file) {
            Ok(f) => commands::check(&f, json, out),
            Err(code) => Ok(code),
        },
        Command::Decide { file, all } => match read(&file) {
            Ok(f) => commands::decide(&f, all, json, out),
            Err(code) => Ok(code),
        },
        Command::ValidateTables { calculus } => commands::validate_tables(calculus.as_deref(), json, out),
        Command::Verify { instances, max_n, seed } => commands::verify(instances, max_n as usize, seed, json, out),
        Command::Derive { which, out: dest } => commands::derive(which.name(), dest.as_deref(), json, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match run(cli, &mut out).and_then(|code| out.flush().map(|_| code)) {
        Ok(code) => code,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}
