use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "nilcert", version, about = "Certified computations with finitely generated nilpotent groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Search budget level (larger searches further before answering Unknown).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Largest finite quotient table; defaults to NILCERT_QUOTIENT_CAP or 10^6.
    #[arg(long, global = true)]
    pub quotient_cap: Option<usize>,
    /// Print the result payload as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized spot checks in the verification transcript.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the full run report (inputs, result, transcript) to this file.
    #[arg(long = "report", global = true, value_name = "FILE")]
    pub save_report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    pub budget: Option<usize>,
    /// Explicit cap from the flag or NILCERT_QUOTIENT_CAP; each command has its own default.
    pub quotient_cap: Option<usize>,
    pub seed: u64,
}

impl Options {
    pub fn table_cap(&self) -> usize {
        self.quotient_cap.unwrap_or(nilcert::nilgroup::DEFAULT_QUOTIENT_CAP)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Normal forms of words in a presentation.
    Nf {
        pcp: PathBuf,
        /// Words such as "x^2 z^-1"; the empty string is the identity.
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Upper central series.
    Ucs { pcp: PathBuf },
    /// Torsion subgroup, its exponent and a power m with G^m meeting it trivially.
    Torsion { pcp: PathBuf },
    /// Non-trivial elusive outer automorphism classes.
    Elusive { pcp: PathBuf },
    /// A characteristic finite-index subgroup separating the torsion of Out(N).
    SeparateTorsion { pcp: PathBuf },
    /// Mixed Whitehead problem for two tuple systems.
    Whitehead { pcp: PathBuf, tuples: PathBuf },
    /// Isomorphism of two graphs of groups.
    GogIso { source: PathBuf, target: PathBuf },
    /// Unitriangular matrix embedding of a torsion-free group.
    Embed {
        pcp: PathBuf,
        #[arg(long, default_value_t = nilcert::malcev::DEFAULT_CLASS_CAP)]
        class_cap: usize,
    },
    /// Exponential of a strictly upper triangular rational matrix.
    Expm {
        #[arg(long)]
        dim: usize,
        /// Rows separated by ';', entries by whitespace, e.g. "0 1/2; 0 0".
        #[arg(long, allow_hyphen_values = true)]
        entries: String,
    },
    /// Logarithm of a unitriangular rational matrix.
    Logm {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        entries: String,
    },
    /// Re-verify a run report or a torsion-separation certificate.
    Verify { file: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Nf { .. } => "nf",
            Command::Ucs { .. } => "ucs",
            Command::Torsion { .. } => "torsion",
            Command::Elusive { .. } => "elusive",
            Command::SeparateTorsion { .. } => "separate-torsion",
            Command::Whitehead { .. } => "whitehead",
            Command::GogIso { .. } => "gog-iso",
            Command::Embed { .. } => "embed",
            Command::Expm { .. } => "expm",
            Command::Logm { .. } => "logm",
            Command::Verify { .. } => "verify",
        }
    }
}
