use std::fmt;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Qcomb,
    Padic,
    Series,
    Prism,
    Qlog,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Qcomb, Suite::Padic, Suite::Series, Suite::Prism, Suite::Qlog];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Qcomb => "qcomb",
            Suite::Padic => "padic",
            Suite::Series => "series",
            Suite::Prism => "prism",
            Suite::Qlog => "qlog",
        };
        f.write_str(s)
    }
}

/// Flags shared by every subcommand. Each one can also be set through an
/// environment variable with the `QPRISM_` prefix; an explicit flag wins.
#[derive(Args, Clone, Debug)]
pub struct ConfigArgs {
    /// The prime p.
    #[arg(long, env = "QPRISM_PRIME", default_value_t = 3, global = true)]
    pub prime: u64,
    /// Coefficient precision N (digits of p).
    #[arg(long, env = "QPRISM_PRECISION", default_value_t = 32, global = true)]
    pub precision: u32,
    /// Series order M (terms in q - 1).
    #[arg(long, env = "QPRISM_ORDER", default_value_t = 64, global = true)]
    pub order: usize,
    /// Tower level cap h.
    #[arg(long, env = "QPRISM_LEVEL", default_value_t = 1, global = true)]
    pub level: u32,
    /// Truncation order in q for bivariate checks.
    #[arg(long, env = "QPRISM_BIVAR_Q", default_value_t = 12, global = true)]
    pub bivar_q: usize,
    /// Truncation order in x for bivariate checks.
    #[arg(long, env = "QPRISM_BIVAR_X", default_value_t = 12, global = true)]
    pub bivar_x: usize,
    #[arg(long, env = "QPRISM_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Suites to run (repeatable); all of them when omitted.
    #[arg(long = "suite", value_enum, env = "QPRISM_SUITE", value_delimiter = ',', global = true)]
    pub suites: Vec<Suite>,
    /// Write the JSON output here instead of standard output.
    #[arg(long, env = "QPRISM_OUT", global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub prime: u64,
    pub precision: u32,
    pub order: usize,
    pub level: u32,
    pub bivar_q: usize,
    pub bivar_x: usize,
    pub seed: u64,
    pub suites: Vec<Suite>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(a: &ConfigArgs) -> Result<Self, String> {
        if !qprism::padic::is_prime(a.prime) {
            return Err(format!("--prime {} is not a prime", a.prime));
        }
        if a.precision == 0 || a.order == 0 {
            return Err("--precision and --order must be at least 1".into());
        }
        if a.bivar_q == 0 || a.bivar_x == 0 {
            return Err("bivariate truncation orders must be at least 1".into());
        }
        if a.level > 4 {
            return Err(format!("--level {} is above the supported cap of 4", a.level));
        }
        let mut suites = if a.suites.is_empty() { Suite::ALL.to_vec() } else { a.suites.clone() };
        suites.sort();
        suites.dedup();
        Ok(RunConfig {
            prime: a.prime,
            precision: a.precision,
            order: a.order,
            level: a.level,
            bivar_q: a.bivar_q,
            bivar_x: a.bivar_x,
            seed: a.seed,
            suites,
            out: a.out.clone(),
        })
    }
}
