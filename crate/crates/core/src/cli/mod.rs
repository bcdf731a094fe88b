//! The `isograd` command line.
//!
//! Every command reads problem documents (see [`document`]), prints one JSON
//! value to standard output (or `--output`), and reports failures as
//! `{"error": code, "detail": text}` on standard error. Exit codes: 0 ok,
//! 1 usage, 2 unreadable or invalid input, 3 a mathematical precondition or
//! a verification failed.

pub mod commands;
pub mod document;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::Outcome;
use document::Problem;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MATH: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: String,
    pub detail: String,
    pub exit: i32,
}

impl CliError {
    pub fn usage(detail: impl Into<String>) -> Self {
        Self::new("usage", detail, EXIT_USAGE)
    }

    pub fn parse(detail: impl Into<String>) -> Self {
        Self::new("parse", detail, EXIT_INPUT)
    }

    pub fn io(detail: impl Into<String>) -> Self {
        Self::new("io", detail, EXIT_INPUT)
    }

    /// A library error met while validating input.
    pub fn invalid(e: crate::Error) -> Self {
        Self::new(e.code(), e.to_string(), EXIT_INPUT)
    }

    /// A library error met while computing.
    pub fn math(e: crate::Error) -> Self {
        Self::new(e.code(), e.to_string(), EXIT_MATH)
    }

    pub fn verification(detail: impl Into<String>) -> Self {
        Self::new("verification", detail, EXIT_MATH)
    }

    fn new(code: &str, detail: impl Into<String>, exit: i32) -> Self {
        Self {
            code: code.to_string(),
            detail: detail.into(),
            exit,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"error": self.code, "detail": self.detail})
    }
}

#[derive(Debug, Parser)]
#[command(name = "isograd", version, about = "Filtered q-difference modules with fixed graded part")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the classifying space and the per-pair table.
    Dim { file: PathBuf },
    /// Normal form with its gauge certificate.
    Normalize {
        file: PathBuf,
        /// Check a previous `normalize` output against FILE instead.
        #[arg(long, value_name = "CERT")]
        verify_only: Option<PathBuf>,
    },
    /// Whether two presentations are gauge equivalent, with a witness.
    Equiv { a: PathBuf, b: PathBuf },
    /// Extension classes of a two-block document.
    Ext { file: PathBuf },
    /// Morphisms between the assembled modules of FILE and FILE2 (or FILE).
    Hom {
        file: PathBuf,
        file2: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        window: Option<Vec<i64>>,
    },
    /// Apply the document's gauge to its blocks.
    Act { file: PathBuf },
    /// Baer sum of two extension classes.
    Sum { a: PathBuf, b: PathBuf },
    /// Scalar multiple of an extension class.
    Scale {
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        file: PathBuf,
    },
    /// Compare Ext, Hom and normal forms before and after extending scalars.
    Basechange {
        file: PathBuf,
        /// Target ring, e.g. '{"kind":"quotient","modulus":["0","0","1"]}'.
        #[arg(long)]
        ring: String,
        /// Image of t when the document is over a quotient ring.
        #[arg(long)]
        image: Option<String>,
    },
    /// Check a gauge certificate (from normalize, act or equiv).
    Verify {
        source: PathBuf,
        cert: PathBuf,
        target: Option<PathBuf>,
    },
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let load = |p: &PathBuf| Problem::load(p);
    match command {
        Command::Dim { file } => commands::dim(&load(file)?),
        Command::Normalize { file, verify_only: None } => commands::normalize(&load(file)?),
        Command::Normalize {
            file,
            verify_only: Some(cert),
        } => commands::verify_normal_form(&load(file)?, &load(cert)?),
        Command::Equiv { a, b } => commands::equiv(&load(a)?, &load(b)?),
        Command::Ext { file } => commands::ext(&load(file)?),
        Command::Hom { file, file2, window } => {
            let second = file2.as_ref().map(load).transpose()?;
            let window = window.as_ref().map(|w| (w[0], w[1]));
            commands::hom(&load(file)?, second.as_ref(), window)
        }
        Command::Act { file } => commands::act_cmd(&load(file)?),
        Command::Sum { a, b } => commands::sum(&load(a)?, &load(b)?),
        Command::Scale { lambda, file } => commands::scale(lambda, &load(file)?),
        Command::Basechange { file, ring, image } => commands::basechange(&load(file)?, ring, image.as_deref()),
        Command::Verify { source, cert, target } => {
            let target = target.as_ref().map(load).transpose()?;
            commands::verify(&load(source)?, cert, target.as_ref())
        }
    }
}

/// Canonical text of a result: pretty-printed JSON and a final newline.
pub fn render(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{}", e);
                return 0;
            }
            return report(&CliError::usage(e.to_string().trim_end()));
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => return report(&e),
    };
    let text = render(&outcome.value);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::io(format!("{}: {}", path.display(), e))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    };
    match written {
        Ok(()) => outcome.exit,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("{}", serde_json::to_string(&e.to_json()).expect("JSON values serialize"));
    e.exit
}
