use std::path::PathBuf;

use clap::{Args, ValueEnum};
use covar_core::tail::{self, LimitCase, LimitInputs, Table1Row};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{self, probability, required};
use crate::error::{usage, CliError, CliResult};
use crate::io::num;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowName {
    Clayton,
    GumbelStar,
    IpsStar,
    Frank,
    #[value(name = "gumbel-2star")]
    #[serde(rename = "gumbel-2star")]
    Gumbel2Star,
    #[value(name = "clayton-2star")]
    #[serde(rename = "clayton-2star")]
    Clayton2Star,
}

/// Either a catalogued family (`--family` with `--theta`/`--delta`) or a tail
/// order with marginal tail indices (`--kappa ...`).
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct LimitsArgs {
    /// Catalogued copula family.
    #[arg(long, value_enum)]
    pub family: Option<RowName>,
    /// Clayton, IPS or Frank parameter.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Gumbel parameter.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Conditional level q [default: 0.5].
    #[arg(long)]
    pub q: Option<f64>,
    /// Institution level p [default: 0.05].
    #[arg(long)]
    pub p: Option<f64>,
    /// Tail order.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Growth exponent of the second-order term [default: 1].
    #[arg(long)]
    pub rho_exp: Option<f64>,
    /// Lower-tail index of the system margin [default: 0].
    #[arg(long)]
    pub xi: Option<f64>,
    /// Extended regular variation index, `inf` allowed [default: 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Root of a(1, a0) = 1; needed when kappa = 2 and xi > 0.
    #[arg(long)]
    pub a0: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with defaults for any of the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn run(args: LimitsArgs) -> CliResult<()> {
    let a = config::resolve(&args, args.config.as_deref())?;
    let rows = match (a.family, a.kappa) {
        (Some(fam), None) => family_rows(&a, fam)?,
        (None, Some(kappa)) => kappa_rows(&a, kappa)?,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--family and --kappa are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --family or --kappa is required".into(),
            ))
        }
    };
    print!("{}", render(&rows, a.format.unwrap_or_default()));
    Ok(())
}

type Rows = Vec<(&'static str, Value)>;

fn family_rows(a: &LimitsArgs, fam: RowName) -> CliResult<Rows> {
    let q = probability("q", a.q.unwrap_or(0.5))?;
    let p = probability("p", a.p.unwrap_or(0.05))?;
    let (row, param_name, param) = match fam {
        RowName::Clayton => (
            Table1Row::Clayton {
                theta: required("theta", a.theta)?,
            },
            "theta",
            a.theta,
        ),
        RowName::GumbelStar => (
            Table1Row::GumbelStar {
                delta: required("delta", a.delta)?,
            },
            "delta",
            a.delta,
        ),
        RowName::IpsStar => (
            Table1Row::IpsStar {
                theta: required("theta", a.theta)?,
            },
            "theta",
            a.theta,
        ),
        RowName::Frank => (
            Table1Row::Frank {
                theta: required("theta", a.theta)?,
            },
            "theta",
            a.theta,
        ),
        RowName::Gumbel2Star => (
            Table1Row::Gumbel2Star {
                delta: required("delta", a.delta)?,
            },
            "delta",
            a.delta,
        ),
        RowName::Clayton2Star => (
            Table1Row::Clayton2Star {
                theta: required("theta", a.theta)?,
            },
            "theta",
            a.theta,
        ),
    };
    let copula = row.copula().map_err(usage)?;
    let v_qp = tail::table1_v_qp(row, q, p).map_err(usage)?;
    let vp = match tail::table1_vp(row, p) {
        Ok(v) => Some(v),
        Err(covar_core::Error::BranchBoundary { .. }) => None,
        Err(e) => return Err(usage(e)),
    };
    let v_qp_exact = copula.v_exact(q, p)?;
    let vp_exact = copula.v_exact(p, p)?;
    Ok(vec![
        ("family", json!(row.name())),
        (param_name, json!(param)),
        ("q", json!(q)),
        ("p", json!(p)),
        ("regime", json!(row.regime().name())),
        ("kappa", json!(row.kappa())),
        ("v_qp_asymptotic", json!(v_qp)),
        ("v_qp_exact", json!(v_qp_exact)),
        ("vp_asymptotic", json!(vp)),
        ("vp_exact", json!(vp_exact)),
        ("r_exact", json!(vp_exact / p)),
    ])
}

fn kappa_rows(a: &LimitsArgs, kappa: f64) -> CliResult<Rows> {
    let inputs = LimitInputs {
        kappa,
        rho_exp: a.rho_exp.unwrap_or(1.0),
        xi: a.xi.unwrap_or(0.0),
        gamma: a.gamma.unwrap_or(1.0),
        a0: a.a0,
    };
    let rate = tail::vp_rate(&inputs).map_err(usage)?;
    let mut rows: Rows = vec![
        ("kappa", json!(inputs.kappa)),
        ("rho_exp", json!(inputs.rho_exp)),
        ("xi", json!(inputs.xi)),
        ("gamma", number(inputs.gamma)),
        ("a0", json!(inputs.a0)),
        ("vp_exponent", json!(rate.exponent)),
        ("vp_does_not_vanish", json!(rate.does_not_vanish)),
    ];
    if rate.does_not_vanish {
        rows.push(("delta_covar_limit", Value::Null));
        rows.push(("case", json!("undetermined")));
        return Ok(rows);
    }
    let lim = tail::delta_covar_limit(&inputs).map_err(usage)?;
    let case = match lim.case {
        LimitCase::Amplification => "amplification",
        LimitCase::OrthantIndependence => "orthant-independence",
        LimitCase::Attenuation => "attenuation",
    };
    rows.push(("delta_covar_limit", number(lim.value)));
    rows.push(("case", json!(case)));
    rows.push(("rate_exponent", json!(lim.rate_exponent)));
    Ok(rows)
}

/// JSON has no infinities; they are written as strings.
fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(num(x))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.as_f64().map(num).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(rows: &Rows, format: Format) -> String {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> = rows
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&map).expect("json"))
        }
        Format::Csv => {
            let mut out = String::from("quantity,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{k},{}\n", cell(v)));
            }
            out
        }
        Format::Table => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter()
                .map(|(k, v)| {
                    let c = cell(v);
                    format!("{k:<width$}  {}\n", if c.is_empty() { "n/a" } else { &c })
                })
                .collect()
        }
    }
}
