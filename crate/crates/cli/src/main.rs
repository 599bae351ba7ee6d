mod commands;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kloosterman_core::{Error, GroupKind};

/// Exact Kloosterman sums and trace-vector codes over GF(2^r).
#[derive(Debug, Parser)]
#[command(name = "kloosterman", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Field degree: work in GF(2^r).
    #[arg(long, global = true, conflicts_with = "q")]
    pub r: Option<u32>,
    /// Field size, a power of two.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Reduction polynomial in hex, e.g. 0x13.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Largest moment exponent or codeword weight of interest.
    #[arg(long, global = true, default_value_t = 9)]
    pub hmax: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Shuffle the group enumeration order with this seed.
    #[arg(long, global = true)]
    pub seed_order: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CodeChoice {
    O3,
    Sp2,
    Both,
}

impl CodeChoice {
    pub fn kinds(self) -> Vec<GroupKind> {
        match self {
            CodeChoice::O3 => vec![GroupKind::O3],
            CodeChoice::Sp2 => vec![GroupKind::Sp2],
            CodeChoice::Both => GroupKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// K(a) for every nonzero a.
    Kloosterman,
    /// Power moments MK^h, T0K^h, T1K^h for h <= hmax.
    Moments {
        /// Recompute MK^h and odd T1K^h from code weight distributions.
        #[arg(long)]
        cross_check: bool,
    },
    /// Character sums of the matrix trace over the classical groups.
    Gauss {
        /// Rank: the group is Sp(2n,q), or O(2n+1,q).
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value_t = CodeChoice::Both)]
        code: CodeChoice,
    },
    /// Dual spectra and weight distributions of the trace-vector codes.
    Weights {
        /// Every weight, not only the low ones.
        #[arg(long, conflicts_with = "jmax")]
        full: bool,
        /// Largest weight to count (defaults to hmax).
        #[arg(long)]
        jmax: Option<usize>,
        #[arg(long, value_enum, default_value_t = CodeChoice::Both)]
        code: CodeChoice,
    },
    /// Run the verification sweep; exits 1 if any check fails.
    Verify {
        /// Degrees to check, e.g. `2,3,5` or `2..10`.
        #[arg(long)]
        sweep: Option<String>,
        /// Comma-separated check names.
        #[arg(long)]
        only: Option<String>,
        /// Add one to D_J before the T1K recursion (test hook).
        #[arg(long, value_name = "J")]
        inject_fault: Option<usize>,
    },
}

/// Failure categories mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Verification(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IdentityViolation { .. }
            | Error::Injectivity { .. }
            | Error::InconsistentInput(_)
            | Error::Internal(_) => Failure::Verification(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn emit(global: &Global, text: &str) -> Result<(), Failure> {
    match &global.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = commands::run(&cli).and_then(|out| {
        emit(&cli.global, &out.text)?;
        Ok(out.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
