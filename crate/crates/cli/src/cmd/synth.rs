use std::path::PathBuf;

use chrono::{Datelike, NaiveDate, Weekday};
use clap::Args;
use covar_core::pipeline::simulate_pair;
use covar_core::{ArGarchParams, CopulaSpec};
use serde::{Deserialize, Serialize};

use crate::config::{self, required};
use crate::error::{usage, CliError, CliResult};
use crate::io::{self, num};

pub const INSTITUTION: ArGarchParams = ArGarchParams {
    mu: 3e-4,
    phi: 0.05,
    beta0: 2e-6,
    beta1: 0.08,
    beta2: 0.9,
    eta: 6.0,
    lambda_skew: -0.1,
};
pub const SYSTEM: ArGarchParams = ArGarchParams {
    mu: 2e-4,
    phi: 0.03,
    beta0: 1e-6,
    beta1: 0.07,
    beta2: 0.92,
    eta: 7.0,
    lambda_skew: -0.15,
};

/// AR(1)-GARCH(1,1) skew-t returns whose innovations are joined by a Clayton
/// copula, dated on business days.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SynthArgs {
    /// Number of rows [default: 1750].
    #[arg(long)]
    pub n: Option<usize>,
    /// Clayton parameter [default: 2].
    #[arg(long)]
    pub theta: Option<f64>,
    /// [default: 7].
    #[arg(long)]
    pub seed: Option<u64>,
    /// First date, ISO-8601 [default: 2000-01-03].
    #[arg(long)]
    pub start_date: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn run(args: SynthArgs) -> CliResult<()> {
    let mut a = config::resolve(&args, args.config.as_deref())?;
    let out = required("out", a.out.clone())?;
    let n = *a.n.get_or_insert(1750);
    let theta = *a.theta.get_or_insert(2.0);
    let seed = *a.seed.get_or_insert(7);
    let start = a
        .start_date
        .get_or_insert_with(|| "2000-01-03".into())
        .clone();
    let mut date = NaiveDate::parse_from_str(&start, "%Y-%m-%d")
        .map_err(|e| CliError::Usage(format!("--start-date '{start}': {e}")))?;
    let copula = CopulaSpec::clayton(theta).map_err(usage)?;
    let (ri, rs) = simulate_pair(&copula, &INSTITUTION, &SYSTEM, n, seed)?;

    let mut rows = vec![vec!["date".to_string(), "value_i".into(), "value_s".into()]];
    for (x, y) in ri.iter().zip(&rs) {
        while matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
            date = date.succ_opt().expect("date in range");
        }
        rows.push(vec![date.format("%Y-%m-%d").to_string(), num(*x), num(*y)]);
        date = date.succ_opt().expect("date in range");
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        io::ensure_dir(dir)?;
    }
    io::write_csv(&out, &config::header(&a), &rows)?;
    println!("{n} rows written to {}", out.display());
    Ok(())
}
