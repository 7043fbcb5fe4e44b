//! End-to-end CoVaR / ΔCoVaR computation, rolling windows, and the Monte Carlo
//! study harness.

use rayon::prelude::*;
use serde::Serialize;

use crate::copula::{CopulaFamily, CopulaSpec, Reflection};
use crate::empirical::{
    a_hat_grid, b_hat_simplex, pseudo_observations, tail_coefficients, TailCoefficients,
};
use crate::error::{check_probability, invalid, Error, Result};
use crate::marginal::{self, ArGarchParams, MarginalFit, MIN_OBSERVATIONS};
use crate::mde::{self, FitOptions, MdeFit, DEFAULT_K, DEFAULT_TAU};
use crate::numerics::DEFAULT_PANELS;
use crate::seed;
use crate::tail::{self, Regime, Table1Row, TailFamily, TailModel};

/// CoVaR_t = μ_t + σ_t F_Z^{-1}(r̂ p).
pub fn covar_t(fit_s: &MarginalFit, r_hat: f64, p: f64, t: usize) -> Result<f64> {
    let level = adjusted_level(r_hat, p)?;
    let (m, s) = fit_s.moments_at(t)?;
    Ok(m + s * fit_s.params.innovation().quantile(level))
}

fn adjusted_level(r_hat: f64, p: f64) -> Result<f64> {
    check_probability("p", p, true, true)?;
    let level = r_hat * p;
    if !(level > 0.0 && level < 1.0) {
        return invalid(format!("adjusted level r*p = {level} must lie in (0, 1)"));
    }
    Ok(level)
}

/// ΔCoVaR ≈ (F^{-1}(r̂p) - F^{-1}(p)) / |F^{-1}(p)|, with the conditional mean
/// neglected.
pub fn delta_covar(fit_s: &MarginalFit, r_hat: f64, p: f64) -> Result<f64> {
    let level = adjusted_level(r_hat, p)?;
    let z = fit_s.params.innovation();
    let base = z.quantile(p);
    if base == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "innovation quantile at p = {p} is zero"
        )));
    }
    Ok((z.quantile(level) - base) / base.abs())
}

/// (CoVaR_t - VaR_t) / |VaR_t| with the conditional mean kept.
pub fn delta_covar_exact(fit_s: &MarginalFit, r_hat: f64, p: f64, t: usize) -> Result<f64> {
    let var = marginal::var_forecast(fit_s, p, t)?;
    if var == 0.0 {
        return Err(Error::InvalidArgument(format!("VaR at t = {t} is zero")));
    }
    Ok((covar_t(fit_s, r_hat, p, t)? - var) / var.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub window_len: usize,
    pub step: usize,
    pub p: f64,
    pub k: usize,
    pub tau: f64,
    /// Report the mean-including ΔCoVaR at the window's last day instead of
    /// the time-invariant approximation.
    pub exact_delta: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window_len: 1250,
            step: 250,
            p: 0.05,
            k: DEFAULT_K,
            tau: DEFAULT_TAU,
            exact_delta: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalSummary {
    pub mu: f64,
    pub phi: f64,
    pub beta_sum: f64,
    pub eta: f64,
    pub lambda_skew: f64,
    pub loglik: f64,
}

impl MarginalSummary {
    fn of(f: &MarginalFit) -> Self {
        let p = &f.params;
        Self {
            mu: p.mu,
            phi: p.phi,
            beta_sum: p.beta1 + p.beta2,
            eta: p.eta,
            lambda_skew: p.lambda_skew,
            loglik: f.loglik,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ReportFlags {
    pub clamped: bool,
    pub at_bound: bool,
    pub not_converged: bool,
    pub independence: bool,
    pub nonstationary_i: bool,
    pub nonstationary_s: bool,
}

impl ReportFlags {
    pub fn names(&self) -> Vec<&'static str> {
        let all = [
            (self.clamped, "clamped"),
            (self.at_bound, "at_bound"),
            (self.not_converged, "not_converged"),
            (self.independence, "independence"),
            (self.nonstationary_i, "nonstationary_i"),
            (self.nonstationary_s, "nonstationary_s"),
        ];
        all.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect()
    }

    pub fn any(&self) -> bool {
        !self.names().is_empty()
    }
}

/// Result of one analysis window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoVaRReport {
    pub window: usize,
    pub start: usize,
    pub end: usize,
    pub start_date: Option<String>,
    pub end_date: Option<String>,
    pub tail: TailCoefficients,
    pub fit: MdeFit,
    pub r_hat: f64,
    pub v_hat: f64,
    pub delta_covar: f64,
    pub var_t: Vec<f64>,
    pub covar_t: Vec<f64>,
    pub marginal_i: MarginalSummary,
    pub marginal_s: MarginalSummary,
    pub flags: ReportFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WindowResult {
    Report(Box<CoVaRReport>),
    Skipped {
        window: usize,
        start: usize,
        end: usize,
        reason: String,
    },
}

/// Fit both margins and the tail model on one aligned window.
pub fn analyze_window(
    returns_i: &[f64],
    returns_s: &[f64],
    cfg: &AnalysisConfig,
) -> Result<CoVaRReport> {
    if returns_i.len() != returns_s.len() {
        return invalid(format!(
            "series lengths differ: {} vs {}",
            returns_i.len(),
            returns_s.len()
        ));
    }
    let fit_i = marginal::fit_ar_garch(returns_i)?;
    let fit_s = marginal::fit_ar_garch(returns_s)?;
    let s = pseudo_observations(&fit_i.innovations, &fit_s.innovations)?;
    let tc = tail_coefficients(&s, cfg.k)?;
    let regime = mde::classify_regime(&tc, cfg.tau);
    let opts = FitOptions {
        tau: cfg.tau,
        ..FitOptions::default()
    };
    let fit = mde::fit_regime(&s, cfg.k, regime, &opts)?;
    let v = mde::v_hat(&fit, cfg.p, cfg.p)?;
    let r_hat = v.value / cfg.p;
    let n = returns_s.len();
    let var_t = (0..n)
        .map(|t| marginal::var_forecast(&fit_s, cfg.p, t))
        .collect::<Result<Vec<_>>>()?;
    let covar = (0..n)
        .map(|t| covar_t(&fit_s, r_hat, cfg.p, t))
        .collect::<Result<Vec<_>>>()?;
    let delta = if cfg.exact_delta {
        delta_covar_exact(&fit_s, r_hat, cfg.p, n - 1)?
    } else {
        delta_covar(&fit_s, r_hat, cfg.p)?
    };
    let flags = ReportFlags {
        clamped: v.clamped,
        at_bound: fit.at_bound,
        not_converged: !fit.converged,
        independence: fit.independence,
        nonstationary_i: fit_i.nonstationary,
        nonstationary_s: fit_s.nonstationary,
    };
    Ok(CoVaRReport {
        window: 0,
        start: 0,
        end: n,
        start_date: None,
        end_date: None,
        tail: tc,
        fit,
        r_hat,
        v_hat: v.value,
        delta_covar: delta,
        var_t,
        covar_t: covar,
        marginal_i: MarginalSummary::of(&fit_i),
        marginal_s: MarginalSummary::of(&fit_s),
        flags,
    })
}

/// Window start offsets for a series of length `n`.
pub fn window_starts(n: usize, window_len: usize, step: usize) -> Result<Vec<usize>> {
    if window_len == 0 || step == 0 {
        return invalid("window length and step must be positive");
    }
    if window_len > n {
        return invalid(format!(
            "window length {window_len} exceeds the {n} available observations"
        ));
    }
    Ok((0..=n - window_len).step_by(step).collect())
}

/// Rolling-window analysis. Windows run in parallel and are returned in
/// window order; failing windows are reported as skipped.
pub fn rolling_analysis(
    returns_i: &[f64],
    returns_s: &[f64],
    dates: Option<&[String]>,
    cfg: &AnalysisConfig,
) -> Result<Vec<WindowResult>> {
    if returns_i.len() != returns_s.len() {
        return invalid(format!(
            "series lengths differ: {} vs {}",
            returns_i.len(),
            returns_s.len()
        ));
    }
    if let Some(d) = dates {
        if d.len() != returns_i.len() {
            return invalid(format!(
                "{} dates for {} observations",
                d.len(),
                returns_i.len()
            ));
        }
    }
    check_probability("p", cfg.p, true, true)?;
    let starts = window_starts(returns_i.len(), cfg.window_len, cfg.step)?;
    Ok(starts
        .par_iter()
        .enumerate()
        .map(|(w, &start)| {
            let end = start + cfg.window_len;
            let (ri, rs) = (&returns_i[start..end], &returns_s[start..end]);
            let skip = |reason: String| WindowResult::Skipped {
                window: w,
                start,
                end,
                reason,
            };
            if cfg.window_len < MIN_OBSERVATIONS {
                return skip(format!(
                    "window shorter than {MIN_OBSERVATIONS} observations"
                ));
            }
            if let Some(t) = ri.iter().chain(rs).position(|x| !x.is_finite()) {
                return skip(format!("non-finite value at offset {}", t % cfg.window_len));
            }
            match analyze_window(ri, rs, cfg) {
                Ok(mut rep) => {
                    rep.window = w;
                    rep.start = start;
                    rep.end = end;
                    if let Some(d) = dates {
                        rep.start_date = Some(d[start].clone());
                        rep.end_date = Some(d[end - 1].clone());
                    }
                    WindowResult::Report(Box::new(rep))
                }
                Err(e) => skip(e.to_string()),
            }
        })
        .collect())
}

/// Simulated returns whose standardized innovations are joined by `copula`.
pub fn simulate_pair(
    copula: &CopulaSpec,
    params_i: &ArGarchParams,
    params_s: &ArGarchParams,
    n: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params_i.validate()?;
    params_s.validate()?;
    const BURN: usize = 500;
    let smp = copula.sample(n + BURN, seed);
    let (zi_law, zs_law) = (params_i.innovation(), params_s.innovation());
    let zi: Vec<f64> = smp.u.iter().map(|&u| zi_law.quantile(u)).collect();
    let zs: Vec<f64> = smp.v.iter().map(|&v| zs_law.quantile(v)).collect();
    let ri = marginal::returns_from_innovations(params_i, &zi);
    let rs = marginal::returns_from_innovations(params_s, &zs);
    Ok((ri[BURN..].to_vec(), rs[BURN..].to_vec()))
}

// ---------------------------------------------------------------------------
// Simulation study
// ---------------------------------------------------------------------------

/// What the estimators should recover for a catalogued copula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub regime: Regime,
    /// True tail model; `None` when the tail functional vanishes.
    pub truth: Option<TailModel>,
    pub row: Option<Table1Row>,
}

pub fn catalog_entry(c: &CopulaSpec) -> Result<CatalogEntry> {
    use CopulaFamily as F;
    use Reflection as R;
    let entry = |regime, fam: Option<TailFamily>, row| -> Result<CatalogEntry> {
        let truth = fam.map(|f| TailModel::new(regime, f)).transpose()?;
        Ok(CatalogEntry { regime, truth, row })
    };
    match (c.family(), c.reflection()) {
        (F::Clayton { theta }, R::None) => entry(
            Regime::Attraction,
            Some(TailFamily::ClaytonTdf { theta }),
            Some(Table1Row::Clayton { theta }),
        ),
        (F::Gumbel { delta }, R::Survival) if delta > 1.0 => entry(
            Regime::Attraction,
            Some(TailFamily::ReflectedGumbelTdf { delta }),
            Some(Table1Row::GumbelStar { delta }),
        ),
        (F::Ips { theta }, R::Survival) => entry(
            Regime::Balance,
            Some(TailFamily::ReflectedIpsBoundary { theta }),
            Some(Table1Row::IpsStar { theta }),
        ),
        (F::Frank { theta }, R::None) => {
            let row = (theta > 0.0).then_some(Table1Row::Frank { theta });
            entry(
                Regime::Balance,
                Some(TailFamily::FrankBoundary { theta }),
                row,
            )
        }
        (F::Gumbel { delta }, R::Reflect2) if delta > 1.0 => entry(
            Regime::Repulsion,
            None,
            Some(Table1Row::Gumbel2Star { delta }),
        ),
        (F::Clayton { theta }, R::Reflect2) => entry(
            Regime::Repulsion,
            Some(TailFamily::ClaytonTdf { theta }),
            Some(Table1Row::Clayton2Star { theta }),
        ),
        (F::StudentT { rho, nu }, R::None | R::Survival) => entry(
            Regime::Mixed,
            Some(TailFamily::StudentTTdf { rho, nu }),
            None,
        ),
        (F::Independence, _) => entry(
            Regime::Balance,
            Some(TailFamily::FrankBoundary { theta: 0.0 }),
            None,
        ),
        _ => invalid(format!(
            "{} with reflection {:?} is not in the simulation catalogue",
            c.family().name(),
            c.reflection()
        )),
    }
}

/// Threshold count as a function of the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KRule {
    Fixed(usize),
    /// k = ⌈c √n⌉.
    SqrtScaled(f64),
}

impl KRule {
    pub fn k(&self, n: usize) -> usize {
        match *self {
            KRule::Fixed(k) => k,
            KRule::SqrtScaled(c) => (c * (n as f64).sqrt()).ceil() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub copula: CopulaSpec,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub k_rule: KRule,
    /// Levels p for the plug-in ratios and the deterministic checks; the
    /// tail fraction k/n is always added for the plug-in ratios.
    pub p_levels: Vec<f64>,
    pub q_levels: Vec<f64>,
    pub seed: u64,
    /// Grid points for the sup-norm errors (interior points i/(m+1)).
    pub sup_grid: usize,
    pub deterministic_only: bool,
}

impl SimConfig {
    pub fn new(copula: CopulaSpec) -> Self {
        Self {
            copula,
            n_grid: vec![2000, 8000, 32000],
            reps: 50,
            k_rule: KRule::SqrtScaled(2.0),
            p_levels: vec![1e-2, 1e-3, 1e-4],
            q_levels: vec![0.5],
            seed: 1,
            sup_grid: 99,
            deterministic_only: false,
        }
    }
}

/// One Monte Carlo measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRecord {
    pub n: usize,
    pub k: usize,
    pub rep: usize,
    pub seed: u64,
    pub metric: String,
    pub q: Option<f64>,
    pub p: Option<f64>,
    pub value: f64,
}

/// A deterministic (sampling-free) theory check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicRecord {
    pub metric: String,
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub metric: String,
    pub q: Option<f64>,
    pub p: Option<f64>,
    pub count: usize,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStudyResult {
    pub config: SimConfig,
    pub regime: Regime,
    pub family: Option<String>,
    pub ks: Vec<usize>,
    pub records: Vec<SimRecord>,
    pub deterministic: Vec<DeterministicRecord>,
    pub summary: Vec<SummaryRow>,
}

impl SimStudyResult {
    /// Values of one metric at sample size `n` (optionally at given q, p).
    pub fn values(&self, n: usize, metric: &str, q: Option<f64>, p: Option<f64>) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.n == n && r.metric == metric && r.q == q && r.p == p)
            .map(|r| r.value)
            .collect()
    }
}

/// Interpolated quantile of a sample (type 7).
pub fn quantile(values: &[f64], prob: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * prob;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

fn deterministic_checks(
    c: &CopulaSpec,
    row: Option<Table1Row>,
    p_levels: &[f64],
) -> Vec<DeterministicRecord> {
    let mut out = Vec::new();
    for &p in p_levels {
        let exact = c.v_exact(p, p).unwrap_or(f64::NAN);
        out.push(DeterministicRecord {
            metric: "v_exact_over_p".into(),
            p,
            value: exact / p,
        });
        if let Some(row) = row {
            let value = match tail::table1_vp(row, p) {
                Ok(t) => exact / t,
                Err(_) => f64::NAN,
            };
            out.push(DeterministicRecord {
                metric: "table1_vp_ratio".into(),
                p,
                value,
            });
        }
    }
    out
}

fn sup_error(
    entry: &CatalogEntry,
    s: &crate::empirical::PseudoSample,
    k: usize,
    grid: &[f64],
) -> Result<Option<f64>> {
    let Some(truth) = entry.truth else {
        return Ok(None);
    };
    let sup = |emp: &[f64], model: &dyn Fn(f64) -> f64| {
        emp.iter()
            .zip(grid)
            .map(|(e, &g)| (e - model(g)).abs())
            .fold(0.0, f64::max)
    };
    let fam = truth.family();
    Ok(Some(match entry.regime {
        Regime::Balance => {
            let emp = a_hat_grid(s, k, grid)?;
            sup(&emp, &|v| truth.boundary_cdf_eval(v).unwrap_or(f64::NAN))
        }
        Regime::Attraction => {
            let emp = b_hat_simplex(s, k, grid)?;
            sup(&emp, &|t| tail::tdf(&fam, 2.0 * t, 2.0 * (1.0 - t)))
        }
        Regime::Repulsion => {
            let emp = b_hat_simplex(&s.reflect2(), k, grid)?;
            sup(&emp, &|t| tail::tdf(&fam, 2.0 * t, 2.0 * (1.0 - t)))
        }
        Regime::Mixed => {
            let lower = b_hat_simplex(s, k, grid)?;
            let upper = b_hat_simplex(&s.reflect2(), k, grid)?;
            let TailFamily::StudentTTdf { rho, nu } = fam else {
                unreachable!("mixed truth is t")
            };
            let refl = TailFamily::StudentTTdf { rho: -rho, nu };
            sup(&lower, &|t| tail::tdf(&fam, 2.0 * t, 2.0 * (1.0 - t)))
                .max(sup(&upper, &|t| tail::tdf(&refl, 2.0 * t, 2.0 * (1.0 - t))))
        }
    }))
}

fn replicate(
    cfg: &SimConfig,
    entry: &CatalogEntry,
    n: usize,
    k: usize,
    rep: usize,
    seed: u64,
    exact_cache: &[(f64, f64, f64)],
) -> Result<Vec<SimRecord>> {
    let smp = cfg.copula.sample(n, seed);
    let s = pseudo_observations(&smp.u, &smp.v)?;
    let rec = |metric: &str, q: Option<f64>, p: Option<f64>, value: f64| SimRecord {
        n,
        k,
        rep,
        seed,
        metric: metric.to_string(),
        q,
        p,
        value,
    };
    let mut out = Vec::new();
    let tc = tail_coefficients(&s, k)?;
    out.push(rec("lambda_hat", None, None, tc.lambda_hat));
    out.push(rec("lambda_hat_2star", None, None, tc.lambda_hat_2star));
    let grid: Vec<f64> = (1..=cfg.sup_grid)
        .map(|i| i as f64 / (cfg.sup_grid + 1) as f64)
        .collect();
    if let Some(e) = sup_error(entry, &s, k, &grid)? {
        out.push(rec("sup_error", None, None, e));
    }
    let Some(truth) = entry.truth else {
        return Ok(out);
    };
    let opts = FitOptions {
        force: true,
        ..FitOptions::default()
    };
    let target = mde::CriterionTarget::from_sample(&s, k, entry.regime, DEFAULT_PANELS)?;
    let fit = mde::fit_target(&target, &truth.family(), &opts, k, n)?;
    for (i, th) in fit.theta_hat.iter().enumerate() {
        out.push(rec(&format!("theta_hat_{i}"), None, None, *th));
    }
    out.push(rec("criterion", None, None, fit.criterion_value));
    let pn = k as f64 / n as f64;
    for &q in &cfg.q_levels {
        for &p in cfg.p_levels.iter().chain(std::iter::once(&pn)) {
            let exact = exact_cache
                .iter()
                .find(|&&(eq, ep, _)| eq == q && ep == p)
                .map(|e| e.2)
                .unwrap_or(f64::NAN);
            let ratio = match mde::v_hat(&fit, q, p) {
                Ok(v) => v.value / exact,
                Err(_) => f64::NAN,
            };
            out.push(rec("vhat_ratio", Some(q), Some(p), ratio));
        }
    }
    Ok(out)
}

/// Monte Carlo study of the empirical functionals and the MDE plug-ins on a
/// catalogued copula.
pub fn simulate_study(cfg: &SimConfig) -> Result<SimStudyResult> {
    let entry = catalog_entry(&cfg.copula)?;
    if cfg.reps == 0 && !cfg.deterministic_only {
        return invalid("need at least one replication");
    }
    let deterministic = deterministic_checks(&cfg.copula, entry.row, &cfg.p_levels);
    let ks: Vec<usize> = cfg.n_grid.iter().map(|&n| cfg.k_rule.k(n)).collect();
    for (&n, &k) in cfg.n_grid.iter().zip(&ks) {
        if k == 0 || 2 * k > n {
            return invalid(format!("k = {k} must lie in [1, n/2] for n = {n}"));
        }
    }
    let mut records = Vec::new();
    if !cfg.deterministic_only {
        // v_exact depends only on (q, p); compute it once for every level used
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for (&n, &k) in cfg.n_grid.iter().zip(&ks) {
            for &q in &cfg.q_levels {
                for &p in cfg
                    .p_levels
                    .iter()
                    .chain(std::iter::once(&(k as f64 / n as f64)))
                {
                    if !levels.contains(&(q, p)) {
                        levels.push((q, p));
                    }
                }
            }
        }
        let exact_cache: Vec<(f64, f64, f64)> = levels
            .par_iter()
            .map(|&(q, p)| (q, p, cfg.copula.v_exact(q, p).unwrap_or(f64::NAN)))
            .collect();
        let tasks: Vec<(usize, usize)> = (0..cfg.n_grid.len())
            .flat_map(|i| (0..cfg.reps).map(move |r| (i, r)))
            .collect();
        let results: Vec<Result<Vec<SimRecord>>> = tasks
            .par_iter()
            .map(|&(i, rep)| {
                let s = seed::derive(cfg.seed, i as u64, rep as u64);
                replicate(cfg, &entry, cfg.n_grid[i], ks[i], rep, s, &exact_cache)
            })
            .collect();
        for r in results {
            records.extend(r?);
        }
    }
    let summary = summarize(&records);
    Ok(SimStudyResult {
        config: cfg.clone(),
        regime: entry.regime,
        family: entry.truth.map(|t| t.family().name().to_string()),
        ks,
        records,
        deterministic,
        summary,
    })
}

fn summarize(records: &[SimRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, String, Option<f64>, Option<f64>)> = Vec::new();
    for r in records {
        let key = (r.n, r.metric.clone(), r.q, r.p);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(n, metric, q, p)| {
            let vals: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n && r.metric == metric && r.q == q && r.p == p)
                .map(|r| r.value)
                .collect();
            SummaryRow {
                n,
                metric,
                q,
                p,
                count: vals.len(),
                median: median(&vals),
                q10: quantile(&vals, 0.1),
                q90: quantile(&vals, 0.9),
            }
        })
        .collect()
}
