use std::path::PathBuf;

use clap::{Args, ValueEnum};
use covar_core::empirical::{pseudo_observations, tail_coefficients};
use covar_core::marginal::{self, MIN_OBSERVATIONS};
use covar_core::mde::{self, FitOptions, DEFAULT_K, DEFAULT_TAU};
use covar_core::{Regime, TailFamily};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{self, probability, required};
use crate::error::{usage, CliError, CliResult};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeName {
    Attraction,
    Repulsion,
    Balance,
    Mixed,
}

impl From<RegimeName> for Regime {
    fn from(r: RegimeName) -> Self {
        match r {
            RegimeName::Attraction => Regime::Attraction,
            RegimeName::Repulsion => Regime::Repulsion,
            RegimeName::Balance => Regime::Balance,
            RegimeName::Mixed => Regime::Mixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailFamilyName {
    ReflectedGumbel,
    Clayton,
    StudentT,
    ReflectedIps,
    Frank,
}

impl TailFamilyName {
    fn family(self) -> TailFamily {
        match self {
            TailFamilyName::ReflectedGumbel => TailFamily::ReflectedGumbelTdf { delta: 2.0 },
            TailFamilyName::Clayton => TailFamily::ClaytonTdf { theta: 1.0 },
            TailFamilyName::StudentT => TailFamily::StudentTTdf { rho: 0.0, nu: 4.0 },
            TailFamilyName::ReflectedIps => TailFamily::ReflectedIpsBoundary { theta: 1.0 },
            TailFamilyName::Frank => TailFamily::FrankBoundary { theta: 1.0 },
        }
    }
}

/// Input columns are detected from the header: `u,v` (uniforms), `z_i,z_s`
/// (filtered innovations) or `value_i,value_s` (raw returns, filtered first).
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EstimateArgs {
    /// Input CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Explicit institution and system column names.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub columns: Option<Vec<String>>,
    /// Fit AR-GARCH margins and use their innovations [default: only for value_i,value_s].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub filter: Option<bool>,
    /// Threshold count [default: 100].
    #[arg(long)]
    pub k: Option<usize>,
    /// Tail-coefficient threshold for regime classification [default: 0.1].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Institution level p [default: 0.05].
    #[arg(long)]
    pub p: Option<f64>,
    /// Conditional levels q for v(q|p) [default: the value of --p].
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Skip classification and fit this regime.
    #[arg(long, value_enum)]
    pub regime: Option<RegimeName>,
    /// Fit only this family instead of comparing the regime's candidates.
    #[arg(long, value_enum)]
    pub family: Option<TailFamilyName>,
    /// Fit an attraction model even when the tail coefficient is below tau.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub force: Option<bool>,
    /// Output directory for estimate.json; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn detect_columns(headers: &[String]) -> Option<(String, String, bool)> {
    let has = |c: &str| headers.iter().any(|h| h == c);
    [
        ("u", "v", false),
        ("z_i", "z_s", false),
        ("value_i", "value_s", true),
    ]
    .into_iter()
    .find(|(a, b, _)| has(a) && has(b))
    .map(|(a, b, f)| (a.to_string(), b.to_string(), f))
}

pub fn run(args: EstimateArgs) -> CliResult<()> {
    let mut a = config::resolve(&args, args.config.as_deref())?;
    let input = required("input", a.input.clone())?;
    let (xc, yc, raw) = match &a.columns {
        Some(c) if c.len() == 2 => (c[0].clone(), c[1].clone(), false),
        Some(_) => return Err(CliError::Usage("--columns takes exactly two names".into())),
        None => detect_columns(&io::read_headers(&input)?).ok_or_else(|| {
            CliError::Data(format!(
                "{}: expected columns u,v or z_i,z_s or value_i,value_s",
                input.display()
            ))
        })?,
    };
    let filter = *a.filter.get_or_insert(raw);
    let k = *a.k.get_or_insert(DEFAULT_K);
    let tau = *a.tau.get_or_insert(DEFAULT_TAU);
    let p = probability("p", *a.p.get_or_insert(0.05))?;
    let qs = a.q.get_or_insert_with(|| vec![p]).clone();
    for &q in &qs {
        probability("q", q)?;
    }
    let force = *a.force.get_or_insert(false);
    if k == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }

    let data = io::read_pairs(&input, None, &xc, &yc)?;
    let n = data.x.len();
    if n <= k {
        return Err(CliError::Data(format!(
            "{n} usable rows; need more than k = {k}"
        )));
    }
    let (x, y) = if filter {
        if n < MIN_OBSERVATIONS {
            return Err(CliError::Data(format!(
                "{n} usable rows; filtering needs at least {MIN_OBSERVATIONS}"
            )));
        }
        (
            marginal::fit_ar_garch(&data.x)?.innovations,
            marginal::fit_ar_garch(&data.y)?.innovations,
        )
    } else {
        (data.x, data.y)
    };
    let s = pseudo_observations(&x, &y)?;
    let tc = tail_coefficients(&s, k)?;
    let classified = mde::classify_regime(&tc, tau);
    let regime = a.regime.map_or(classified, Regime::from);
    let opts = FitOptions {
        tau,
        force,
        ..FitOptions::default()
    };
    let fitted = match a.family {
        Some(f) => mde::fit_with_options(&s, k, regime, &f.family(), &opts),
        None => mde::fit_regime(&s, k, regime, &opts),
    };
    let fit = match fitted {
        Err(e @ covar_core::Error::WrongRegime { .. }) => {
            return Err(CliError::Compute(format!(
                "{e}; pass --force to fit anyway"
            )))
        }
        Err(e @ covar_core::Error::InvalidArgument(_)) if a.family.is_some() => {
            return Err(usage(e))
        }
        other => other?,
    };
    let r = mde::adjustment_factor(&fit, p)?;
    let mut clamped = r.clamped;
    let mut v_hat = Vec::new();
    for &q in &qs {
        let v = mde::v_hat(&fit, q, p)?;
        clamped |= v.clamped;
        v_hat.push(json!({ "q": q, "p": p, "value": v.value, "clamped": v.clamped }));
    }
    let doc = json!({
        "schema_version": config::SCHEMA_VERSION,
        "config": a,
        "input": {
            "path": input,
            "columns": [xc, yc],
            "filtered": filter,
            "n": n,
            "dropped_rows": data.dropped,
        },
        "tail_coefficients": tc,
        "classified_regime": classified.name(),
        "regime": regime.name(),
        "family": fit.family_name(),
        "theta_hat": fit.theta_hat,
        "criterion_value": fit.criterion_value,
        "k": k,
        "r_hat": r.value,
        "r_floor": p,
        "r_independence": 1.0,
        "v_hat": v_hat,
        "flags": {
            "clamped": clamped,
            "at_bound": fit.at_bound,
            "not_converged": !fit.converged,
            "independence": fit.independence,
        },
        "fit": fit,
    });
    match &a.out {
        Some(dir) => {
            io::ensure_dir(dir)?;
            let path = dir.join("estimate.json");
            io::write_json(&path, &doc)?;
            println!(
                "regime {} family {} r_hat {} written to {}",
                regime,
                fit.family_name(),
                io::num(r.value),
                path.display()
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&doc).expect("json")),
    }
    Ok(())
}
