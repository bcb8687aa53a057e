use clap::{Parser, Subcommand, ValueEnum};

const SPEC_HELP: &str = "Eta-quotient as m^delta factors joined by '*', e.g. 1^-1*5^-1 for 1/((q;q)(q^5;q^5))";

/// Exact coefficients of eta-quotients and 2-color partition counts.
#[derive(Debug, Parser)]
#[command(name = "etacoef", version, about, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Prime p for the 2-color partition quotient 1/((q;q)(q^p;q^p)).
    #[arg(long, global = true, conflicts_with = "spec")]
    pub p: Option<u64>,

    #[arg(long, global = true, help = SPEC_HELP)]
    pub spec: Option<String>,

    /// Index of a single coefficient.
    #[arg(long, global = true)]
    pub n: Option<u64>,

    /// Upper end of an n-range (table order, sweep or scan limit).
    #[arg(long = "N", value_name = "N", global = true)]
    pub upper: Option<u64>,

    /// Working precision floor in bits; the engine raises it when needed.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,

    /// Output format [default: plain, csv for bench].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Largest truncation index the series engine may use.
    #[arg(long = "max-K", global = true, default_value_t = 1 << 16)]
    pub max_k: u64,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// One coefficient from the exact series, with diagnostics.
    Coeff,
    /// Coefficients 0..=N from the q-series expansion.
    Table,
    /// Asymptotic residual report for a prime p ≤ 23 from exact series values.
    Asympt,
    /// Compare the series engine with the q-series oracle.
    Verify,
    /// Residual scan for a prime p > 23 from q-series values.
    Scan,
    /// Time the q-series table against single series evaluations.
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coeff => "coeff",
            Command::Table => "table",
            Command::Asympt => "asympt",
            Command::Verify => "verify",
            Command::Scan => "scan",
            Command::Bench => "bench",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}
