//! AR(1)-GARCH(1,1) marginal filtering with standardized skew-t innovations.
//!
//! Model: `r_t = μ_t + σ_t z_t`, `μ_t = μ + φ r_{t-1}`,
//! `σ²_t = β0 + β1 ε²_{t-1} + β2 σ²_{t-1}` with `ε_t = r_t - μ_t`.
//! Presample: `r_0` is the sample mean, `ε_0 = 0`, `σ²_1` the sample variance.

use rand::Rng;
use serde::Serialize;

use crate::error::{check_probability, invalid, Error, Result};
use crate::numerics::{self, minimize_with_options, BoxConstraint, MinimizeOptions, Minimum};
use crate::seed;

/// Minimum series length accepted by [`fit_ar_garch`].
pub const MIN_OBSERVATIONS: usize = 250;

/// Hansen's skew-t, standardized to zero mean and unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewT {
    eta: f64,
    lambda: f64,
    #[serde(skip)]
    a: f64,
    #[serde(skip)]
    b: f64,
    #[serde(skip)]
    ln_c: f64,
}

impl SkewT {
    pub fn new(eta: f64, lambda: f64) -> Result<Self> {
        if !(eta > 2.0 && eta.is_finite()) {
            return invalid(format!("skew-t degrees of freedom {eta} must exceed 2"));
        }
        if !(lambda.abs() < 1.0) {
            return invalid(format!("skew-t skewness {lambda} must lie in (-1, 1)"));
        }
        let ln_c = numerics::ln_gamma((eta + 1.0) / 2.0)
            - numerics::ln_gamma(eta / 2.0)
            - 0.5 * (std::f64::consts::PI * (eta - 2.0)).ln();
        let a = 4.0 * lambda * ln_c.exp() * (eta - 2.0) / (eta - 1.0);
        let b = (1.0 + 3.0 * lambda * lambda - a * a).sqrt();
        Ok(Self {
            eta,
            lambda,
            a,
            b,
            ln_c,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn half_scale(&self, z: f64) -> f64 {
        if z < -self.a / self.b {
            1.0 - self.lambda
        } else {
            1.0 + self.lambda
        }
    }

    pub fn ln_pdf(&self, z: f64) -> f64 {
        let x = (self.b * z + self.a) / self.half_scale(z);
        self.b.ln() + self.ln_c - 0.5 * (self.eta + 1.0) * (x * x / (self.eta - 2.0)).ln_1p()
    }

    pub fn pdf(&self, z: f64) -> f64 {
        self.ln_pdf(z).exp()
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let s = (self.eta / (self.eta - 2.0)).sqrt();
        let y = self.b * z + self.a;
        if z < -self.a / self.b {
            (1.0 - self.lambda) * numerics::t_cdf(y / (1.0 - self.lambda) * s, self.eta)
        } else {
            // upper half via the t survival function keeps precision near 1
            1.0 - (1.0 + self.lambda) * numerics::t_cdf(-y / (1.0 + self.lambda) * s, self.eta)
        }
    }

    pub fn quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let s = ((self.eta - 2.0) / self.eta).sqrt();
        let split = (1.0 - self.lambda) / 2.0;
        let y = if q < split {
            (1.0 - self.lambda) * s * numerics::t_quantile(q / (1.0 - self.lambda), self.eta)
        } else {
            -(1.0 + self.lambda)
                * s
                * numerics::t_quantile((1.0 - q) / (1.0 + self.lambda), self.eta)
        };
        (y - self.a) / self.b
    }
}

pub fn skewt_cdf(z: f64, eta: f64, lambda: f64) -> Result<f64> {
    Ok(SkewT::new(eta, lambda)?.cdf(z))
}

pub fn skewt_quantile(q: f64, eta: f64, lambda: f64) -> Result<f64> {
    check_probability("q", q, true, true)?;
    Ok(SkewT::new(eta, lambda)?.quantile(q))
}

pub fn skewt_logpdf(z: f64, eta: f64, lambda: f64) -> Result<f64> {
    Ok(SkewT::new(eta, lambda)?.ln_pdf(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArGarchParams {
    pub mu: f64,
    pub phi: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eta: f64,
    pub lambda_skew: f64,
}

impl ArGarchParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu.is_finite()
            && self.phi.abs() < 1.0
            && self.beta0 > 0.0
            && self.beta0.is_finite()
            && self.beta1 >= 0.0
            && self.beta2 >= 0.0
            && self.beta1 + self.beta2 < 1.0;
        if !ok {
            return invalid(format!("AR-GARCH parameters out of domain: {self:?}"));
        }
        SkewT::new(self.eta, self.lambda_skew).map(|_| ())
    }

    pub fn innovation(&self) -> SkewT {
        SkewT::new(self.eta, self.lambda_skew).expect("validated parameters")
    }

    /// Unconditional variance β0 / (1 - β1 - β2).
    pub fn unconditional_variance(&self) -> f64 {
        self.beta0 / (1.0 - self.beta1 - self.beta2)
    }
}

/// Filtered series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Filtered {
    pub innovations: Vec<f64>,
    pub cond_mean: Vec<f64>,
    pub cond_sd: Vec<f64>,
    /// One-step-ahead mean and sd after the last observation.
    pub next_mean: f64,
    pub next_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalFit {
    pub params: ArGarchParams,
    pub innovations: Vec<f64>,
    pub cond_mean: Vec<f64>,
    pub cond_sd: Vec<f64>,
    pub next_mean: f64,
    pub next_sd: f64,
    pub loglik: f64,
    pub converged: bool,
    pub evaluations: usize,
    /// β1 + β2 within 1e-4 of 1 at the optimum.
    pub nonstationary: bool,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / n;
    (m, v)
}

fn check_series(returns: &[f64]) -> Result<()> {
    if returns.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 returns, got {}",
            returns.len()
        )));
    }
    if let Some(i) = returns.iter().position(|r| !r.is_finite()) {
        return Err(Error::Data(format!(
            "non-finite return {} at position {i}",
            returns[i]
        )));
    }
    Ok(())
}

/// Run the AR-GARCH recursion.
pub fn filter(params: &ArGarchParams, returns: &[f64]) -> Result<Filtered> {
    params.validate()?;
    check_series(returns)?;
    let (mean, var) = mean_var(returns);
    let n = returns.len();
    let mut z = Vec::with_capacity(n);
    let mut mu_t = Vec::with_capacity(n);
    let mut sd_t = Vec::with_capacity(n);
    let mut prev_r = mean;
    let mut prev_eps = 0.0;
    let mut s2 = var.max(f64::MIN_POSITIVE);
    for (t, &r) in returns.iter().enumerate() {
        if t > 0 {
            s2 = params.beta0 + params.beta1 * prev_eps * prev_eps + params.beta2 * s2;
        }
        let m = params.mu + params.phi * prev_r;
        let sd = s2.sqrt();
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::NonFinite {
                at: t as f64,
                value: sd,
            });
        }
        let eps = r - m;
        z.push(eps / sd);
        mu_t.push(m);
        sd_t.push(sd);
        prev_r = r;
        prev_eps = eps;
    }
    let next_s2 = params.beta0 + params.beta1 * prev_eps * prev_eps + params.beta2 * s2;
    Ok(Filtered {
        innovations: z,
        cond_mean: mu_t,
        cond_sd: sd_t,
        next_mean: params.mu + params.phi * prev_r,
        next_sd: next_s2.sqrt(),
    })
}

fn neg_loglik(params: &ArGarchParams, returns: &[f64]) -> f64 {
    let st = match SkewT::new(params.eta, params.lambda_skew) {
        Ok(s) => s,
        Err(_) => return f64::INFINITY,
    };
    match filter(params, returns) {
        Ok(f) => -f
            .innovations
            .iter()
            .zip(&f.cond_sd)
            .map(|(z, s)| st.ln_pdf(*z) - s.ln())
            .sum::<f64>(),
        Err(_) => f64::INFINITY,
    }
}

/// Unconstrained coordinates: μ, atanh φ, ln β0, (a1, a2) with
/// β_i = e^{a_i} / (1 + e^{a1} + e^{a2}), ln(η - 2), atanh λ.
fn from_unconstrained(x: &[f64]) -> ArGarchParams {
    let (e1, e2) = (x[3].exp(), x[4].exp());
    let d = 1.0 + e1 + e2;
    ArGarchParams {
        mu: x[0],
        phi: x[1].tanh(),
        beta0: x[2].exp(),
        beta1: e1 / d,
        beta2: e2 / d,
        eta: 2.0 + x[5].exp(),
        lambda_skew: x[6].tanh(),
    }
}

fn to_unconstrained(p: &ArGarchParams) -> Vec<f64> {
    let rest = 1.0 - p.beta1 - p.beta2;
    vec![
        p.mu,
        p.phi.atanh(),
        p.beta0.ln(),
        (p.beta1 / rest).ln(),
        (p.beta2 / rest).ln(),
        (p.eta - 2.0).ln(),
        p.lambda_skew.atanh(),
    ]
}

pub fn fit_ar_garch(returns: &[f64]) -> Result<MarginalFit> {
    fit_ar_garch_with_options(
        returns,
        &MinimizeOptions {
            max_evals: 6000,
            tol: 1e-7,
            ..Default::default()
        },
    )
}

/// Quasi-maximum-likelihood fit on the transformed scale.
pub fn fit_ar_garch_with_options(returns: &[f64], opts: &MinimizeOptions) -> Result<MarginalFit> {
    check_series(returns)?;
    if returns.len() < MIN_OBSERVATIONS {
        return Err(Error::Data(format!(
            "need at least {MIN_OBSERVATIONS} returns for an AR-GARCH fit, got {}",
            returns.len()
        )));
    }
    let (mean, var) = mean_var(returns);
    if !(var > 0.0) || returns.iter().all(|&r| r == returns[0]) {
        return Err(Error::Data("returns have zero variance".into()));
    }
    let sd = var.sqrt();
    let init = ArGarchParams {
        mu: mean,
        phi: 0.0,
        beta0: 0.05 * var,
        beta1: 0.05,
        beta2: 0.9,
        eta: 8.0,
        lambda_skew: 0.0,
    };
    let calm = ArGarchParams {
        beta0: 0.9 * var,
        beta2: 0.05,
        ..init
    };
    let lv = var.ln();
    let bounds = BoxConstraint::new(
        vec![mean - sd, -2.0, lv - 14.0, -10.0, -10.0, -3.0, -2.0],
        vec![mean + sd, 2.0, lv + 2.0, 10.0, 10.0, 5.3, 2.0],
    )?;
    let mut best: Option<Minimum> = None;
    for start in [init, calm] {
        let m = minimize_with_options(
            |x| neg_loglik(&from_unconstrained(x), returns),
            &bounds,
            &to_unconstrained(&start),
            opts,
        )
        .map_err(|e| Error::Optimization(format!("AR-GARCH likelihood: {e}")))?;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let m = best.expect("two starts");
    if !m.value.is_finite() {
        return Err(Error::Optimization(format!(
            "AR-GARCH likelihood not finite at {:?}",
            m.x
        )));
    }
    let params = from_unconstrained(&m.x);
    let f = filter(&params, returns)?;
    Ok(MarginalFit {
        params,
        innovations: f.innovations,
        cond_mean: f.cond_mean,
        cond_sd: f.cond_sd,
        next_mean: f.next_mean,
        next_sd: f.next_sd,
        loglik: -m.value,
        converged: m.converged,
        evaluations: m.evaluations,
        nonstationary: params.beta1 + params.beta2 > 1.0 - 1e-4,
    })
}

impl MarginalFit {
    /// Conditional mean and sd at `t`; `t == n` is the one-step-ahead forecast.
    pub fn moments_at(&self, t: usize) -> Result<(f64, f64)> {
        let n = self.cond_mean.len();
        match t.cmp(&n) {
            std::cmp::Ordering::Less => Ok((self.cond_mean[t], self.cond_sd[t])),
            std::cmp::Ordering::Equal => Ok((self.next_mean, self.next_sd)),
            std::cmp::Ordering::Greater => {
                invalid(format!("time index {t} beyond one step ahead of {n}"))
            }
        }
    }
}

/// VaR_t(p) = μ_t + σ_t F_Z^{-1}(p).
pub fn var_forecast(fit: &MarginalFit, p: f64, t: usize) -> Result<f64> {
    check_probability("p", p, true, true)?;
    let (m, s) = fit.moments_at(t)?;
    Ok(m + s * fit.params.innovation().quantile(p))
}

/// Simulate `n` returns after a burn-in of 500, starting from the
/// unconditional moments.
pub fn simulate_ar_garch(params: &ArGarchParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let st = params.innovation();
    let mut rng = seed::rng(seed);
    let z: Vec<f64> = (0..n + 500)
        .map(|_| st.quantile(rng.random::<f64>().max(f64::MIN_POSITIVE)))
        .collect();
    Ok(returns_from_innovations(params, &z)[500..].to_vec())
}

/// Drive the recursion with given standardized innovations.
pub fn returns_from_innovations(params: &ArGarchParams, z: &[f64]) -> Vec<f64> {
    let mut prev_r = params.mu / (1.0 - params.phi);
    let mut s2 = params.unconditional_variance();
    let mut prev_eps: f64 = 0.0;
    let mut out = Vec::with_capacity(z.len());
    for (t, zt) in z.iter().enumerate() {
        if t > 0 {
            s2 = params.beta0 + params.beta1 * prev_eps * prev_eps + params.beta2 * s2;
        }
        let eps = s2.sqrt() * zt;
        let r = params.mu + params.phi * prev_r + eps;
        out.push(r);
        prev_r = r;
        prev_eps = eps;
    }
    out
}
