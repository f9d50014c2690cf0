use std::fmt;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use lucas3::period::DEFAULT_BUDGET;
use lucas3::{SequenceKind, K_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Term value, modulo 3^k when --k is given, exact otherwise
    Eval,
    /// 3-adic valuation of the n-th term, closed form against exact
    Valuation,
    /// Shortest period modulo 3^k
    Period,
    /// Brute-force residue frequencies over one period
    Census,
    /// Closed-form residue frequencies
    Predict,
    /// Closed form against census
    Verify,
    /// Distinct frequencies over all residues
    Omega,
    /// Frequency sets across consecutive k
    Stability,
    /// Exact identity suite
    Identities,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Valuation => "valuation",
            Command::Period => "period",
            Command::Census => "census",
            Command::Predict => "predict",
            Command::Verify => "verify",
            Command::Omega => "omega",
            Command::Stability => "stability",
            Command::Identities => "identities",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    U,
    V,
    Both,
}

impl KindArg {
    pub fn kinds(&self) -> &'static [SequenceKind] {
        match self {
            KindArg::U => &[SequenceKind::U],
            KindArg::V => &[SequenceKind::V],
            KindArg::Both => &SequenceKind::BOTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Inclusive `a..b`, or a single `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: u32,
    pub end: u32,
}

impl KRange {
    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.start..=self.end
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("invalid exponent {t:?}: {e}"))
        };
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if start == 0 {
            return Err("k must be at least 1".into());
        }
        if start > end {
            return Err(format!("empty range {start}..{end}"));
        }
        Ok(KRange { start, end })
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "lucas3",
    version,
    about = "Lucas sequences modulo powers of three"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Recurrence coefficient P (nonzero)
    #[arg(long = "P", allow_hyphen_values = true)]
    pub p: i64,

    #[arg(long, value_enum, default_value = "both")]
    pub kind: KindArg,

    /// Exponent range `a..b` (inclusive) or a single k
    #[arg(long)]
    pub k: Option<KRange>,

    /// Single residue for `predict`
    #[arg(long)]
    pub b: Option<u64>,

    /// Term index for `eval` and `valuation`
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,

    /// Step budget for brute-force walks
    #[arg(long, env = "LUCAS3_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    /// Largest admissible k
    #[arg(long, env = "LUCAS3_KMAX", default_value_t = K_MAX)]
    pub kmax: u32,

    /// Split brute-force walks into chunks of this many indices
    #[arg(long)]
    pub chunk: Option<u64>,

    /// Bound on |n|, |s|, |t| for `identities`
    #[arg(long, default_value_t = 50)]
    pub radius: i64,
}
