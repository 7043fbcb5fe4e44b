use std::path::PathBuf;

use clap::Args;
use covar_core::mde::{DEFAULT_K, DEFAULT_TAU};
use covar_core::pipeline::{self, AnalysisConfig, WindowResult};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{self, probability, required};
use crate::error::{CliError, CliResult};
use crate::io::{self, num};

const REPORT_COLUMNS: [&str; 10] = [
    "window",
    "window_start",
    "window_end",
    "status",
    "regime",
    "family",
    "metric",
    "value",
    "flags",
    "note",
];
const SERIES_COLUMNS: [&str; 6] = ["window", "date", "t", "return_s", "var", "covar"];

/// Input: CSV with columns `date,value_i,value_s` (ISO-8601 dates, strictly
/// increasing; rows with a missing value are dropped).
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Observations per window [default: 1250].
    #[arg(long)]
    pub window: Option<usize>,
    /// Offset between window starts [default: 250].
    #[arg(long)]
    pub step: Option<usize>,
    /// Level p [default: 0.05].
    #[arg(long)]
    pub p: Option<f64>,
    /// Threshold count [default: 100].
    #[arg(long)]
    pub k: Option<usize>,
    /// Tail-coefficient threshold [default: 0.1].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Report delta-CoVaR with the conditional mean instead of the zero-mean approximation.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact_delta: Option<bool>,
    /// Output directory [default: .].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn run(args: AnalyzeArgs) -> CliResult<()> {
    let mut a = config::resolve(&args, args.config.as_deref())?;
    let input = required("input", a.input.clone())?;
    let cfg = AnalysisConfig {
        window_len: *a.window.get_or_insert(1250),
        step: *a.step.get_or_insert(250),
        p: probability("p", *a.p.get_or_insert(0.05))?,
        k: *a.k.get_or_insert(DEFAULT_K),
        tau: *a.tau.get_or_insert(DEFAULT_TAU),
        exact_delta: *a.exact_delta.get_or_insert(false),
    };
    if cfg.window_len == 0 || cfg.step == 0 || cfg.k == 0 {
        return Err(CliError::Usage(
            "--window, --step and --k must be positive".into(),
        ));
    }
    let out = a.out.get_or_insert_with(|| PathBuf::from(".")).clone();

    let data = io::read_pairs(&input, Some("date"), "value_i", "value_s")?;
    let n = data.x.len();
    if cfg.window_len > n {
        return Err(CliError::Data(format!(
            "window of {} exceeds the {n} usable rows",
            cfg.window_len
        )));
    }
    let results = pipeline::rolling_analysis(&data.x, &data.y, Some(&data.dates), &cfg)?;

    let header = config::header(&a);
    let mut report = vec![REPORT_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    let mut series = vec![SERIES_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    let mut windows = Vec::new();
    let mut reported = 0;
    for res in &results {
        match res {
            WindowResult::Report(rep) => {
                reported += 1;
                let flags = rep.flags.names().join(";");
                let prefix = [
                    rep.window.to_string(),
                    data.dates[rep.start].clone(),
                    data.dates[rep.end - 1].clone(),
                    "ok".to_string(),
                    rep.fit.regime.name().to_string(),
                    rep.fit.family_name().to_string(),
                ];
                for (metric, value) in window_metrics(rep) {
                    let mut row = prefix.to_vec();
                    row.extend([metric, num(value), flags.clone(), String::new()]);
                    report.push(row);
                }
                for (j, (var, covar)) in rep.var_t.iter().zip(&rep.covar_t).enumerate() {
                    let t = rep.start + j;
                    series.push(vec![
                        rep.window.to_string(),
                        data.dates[t].clone(),
                        t.to_string(),
                        num(data.y[t]),
                        num(*var),
                        num(*covar),
                    ]);
                }
                windows.push(json!({
                    "window": rep.window,
                    "status": "ok",
                    "window_start": data.dates[rep.start],
                    "window_end": data.dates[rep.end - 1],
                    "regime": rep.fit.regime.name(),
                    "family": rep.fit.family_name(),
                    "theta_hat": rep.fit.theta_hat,
                    "r_hat": rep.r_hat,
                    "delta_covar": rep.delta_covar,
                    "flags": rep.flags.names(),
                }));
            }
            WindowResult::Skipped {
                window,
                start,
                end,
                reason,
            } => {
                report.push(vec![
                    window.to_string(),
                    data.dates[*start].clone(),
                    data.dates[end - 1].clone(),
                    "skipped".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    reason.clone(),
                ]);
                windows.push(json!({
                    "window": window,
                    "status": "skipped",
                    "window_start": data.dates[*start],
                    "window_end": data.dates[end - 1],
                    "reason": reason,
                }));
            }
        }
    }

    io::ensure_dir(&out)?;
    io::write_csv(&out.join("report.csv"), &header, &report)?;
    io::write_csv(&out.join("series.csv"), &header, &series)?;
    let summary = json!({
        "schema_version": config::SCHEMA_VERSION,
        "config": a,
        "observations": n,
        "dropped_rows": data.dropped,
        "windows": results.len(),
        "reported": reported,
        "skipped": results.len() - reported,
        "results": windows,
    });
    io::write_json(&out.join("summary.json"), &summary)?;
    if reported == 0 {
        return Err(CliError::Compute(format!(
            "all {} windows failed; see {}",
            results.len(),
            out.display()
        )));
    }
    println!(
        "{reported} of {} windows reported; outputs in {}",
        results.len(),
        out.display()
    );
    Ok(())
}

fn window_metrics(rep: &pipeline::CoVaRReport) -> Vec<(String, f64)> {
    let mut m = vec![
        ("lambda_hat".to_string(), rep.tail.lambda_hat),
        ("lambda_hat_2star".to_string(), rep.tail.lambda_hat_2star),
    ];
    for (i, th) in rep.fit.theta_hat.iter().enumerate() {
        m.push((format!("theta_hat_{i}"), *th));
    }
    m.extend([
        ("criterion".to_string(), rep.fit.criterion_value),
        ("r_hat".to_string(), rep.r_hat),
        ("v_hat".to_string(), rep.v_hat),
        ("delta_covar".to_string(), rep.delta_covar),
    ]);
    for (tag, ms) in [("i", &rep.marginal_i), ("s", &rep.marginal_s)] {
        m.extend([
            (format!("mu_{tag}"), ms.mu),
            (format!("phi_{tag}"), ms.phi),
            (format!("beta_sum_{tag}"), ms.beta_sum),
            (format!("eta_{tag}"), ms.eta),
            (format!("lambda_skew_{tag}"), ms.lambda_skew),
            (format!("loglik_{tag}"), ms.loglik),
        ]);
    }
    m
}
