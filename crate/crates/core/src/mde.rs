//! Minimum-distance estimation of tail models.
//!
//! Criteria are L1 distances on a midpoint grid of `(0, 1)`. For the tail
//! dependence criteria the grid parameterizes the simplex `w1 + w2 = 2` by
//! `w1 = 2t`, `w2 = 2(1 - t)`, with measure `dt`.

use rayon::prelude::*;
use serde::Serialize;

use crate::empirical::{
    a_hat_grid, b_hat_simplex, tail_coefficients, PseudoSample, TailCoefficients,
};
use crate::error::{check_probability, invalid, Error, Result};
use crate::numerics::{
    midpoints, minimize_with_options, BoxConstraint, MinimizeOptions, DEFAULT_PANELS,
};
use crate::tail::{self, Regime, TailFamily, TailModel};

pub const DEFAULT_K: usize = 100;
pub const DEFAULT_TAU: f64 = 0.1;
/// Frank fits with |θ̂| below this are replaced by the independence model.
pub const FRANK_INDEPENDENCE_BAND: f64 = 0.01;
/// Distance from q̂* within which the mixed plug-in returns 1/2.
pub const MIXED_Q_STAR_TOL: f64 = 1e-9;

/// Regime from the empirical tail coefficients.
pub fn classify_regime(tc: &TailCoefficients, tau: f64) -> Regime {
    match (tc.lambda_hat > tau, tc.lambda_hat_2star > tau) {
        (true, false) => Regime::Attraction,
        (false, true) => Regime::Repulsion,
        (true, true) => Regime::Mixed,
        (false, false) => Regime::Balance,
    }
}

/// Empirical (or model) functional on the criterion grid.
#[derive(Debug, Clone)]
pub struct CriterionTarget {
    regime: Regime,
    grid: Vec<f64>,
    primary: Vec<f64>,
    /// Upper-left corner functional, mixed regime only.
    reflected: Vec<f64>,
}

impl CriterionTarget {
    /// Empirical functionals of `s`: b̂ on the simplex (2-reflected sample for
    /// repulsion, both corners for mixed) or Â on (0, 1) for balance.
    pub fn from_sample(s: &PseudoSample, k: usize, regime: Regime, panels: usize) -> Result<Self> {
        let grid = midpoints(panels);
        let (primary, reflected) = match regime {
            Regime::Attraction => (b_hat_simplex(s, k, &grid)?, Vec::new()),
            Regime::Repulsion => (b_hat_simplex(&s.reflect2(), k, &grid)?, Vec::new()),
            Regime::Balance => (a_hat_grid(s, k, &grid)?, Vec::new()),
            Regime::Mixed => (
                b_hat_simplex(s, k, &grid)?,
                b_hat_simplex(&s.reflect2(), k, &grid)?,
            ),
        };
        Ok(Self {
            regime,
            grid,
            primary,
            reflected,
        })
    }

    /// The model's own functionals in place of the empirical ones; every
    /// criterion vanishes at the model's parameters.
    pub fn from_model(model: &TailModel, panels: usize) -> Self {
        let grid = midpoints(panels);
        let fam = model.family();
        let primary: Vec<f64> = model_values(model.regime(), &fam, &grid);
        let reflected = match fam {
            TailFamily::StudentTTdf { rho, nu } if model.regime() == Regime::Mixed => {
                simplex_values(&TailFamily::StudentTTdf { rho: -rho, nu }, &grid)
            }
            _ => Vec::new(),
        };
        Self {
            regime: model.regime(),
            grid,
            primary,
            reflected,
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Criterion value at `family` (parameters included).
    pub fn evaluate(&self, family: &TailFamily) -> f64 {
        let m = self.grid.len() as f64;
        let dist = |target: &[f64], model: &[f64]| -> f64 {
            target
                .iter()
                .zip(model)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                / m
        };
        let main = dist(
            &self.primary,
            &model_values(self.regime, family, &self.grid),
        );
        match (self.regime, family) {
            (Regime::Mixed, TailFamily::StudentTTdf { rho, nu }) => {
                let other =
                    simplex_values(&TailFamily::StudentTTdf { rho: -rho, nu: *nu }, &self.grid);
                main + dist(&self.reflected, &other)
            }
            (Regime::Mixed, _) => f64::NAN,
            _ => main,
        }
    }
}

fn simplex_values(f: &TailFamily, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&t| tail::tdf(f, 2.0 * t, 2.0 * (1.0 - t)))
        .collect()
}

fn model_values(regime: Regime, f: &TailFamily, grid: &[f64]) -> Vec<f64> {
    match regime {
        Regime::Balance => match TailModel::new(Regime::Balance, *f) {
            Ok(m) => grid
                .iter()
                .map(|&v| m.boundary_cdf_eval(v).unwrap_or(f64::NAN))
                .collect(),
            Err(_) => vec![f64::NAN; grid.len()],
        },
        _ => simplex_values(f, grid),
    }
}

fn check_family(regime: Regime, family: &TailFamily) -> Result<()> {
    TailModel::new(regime, family.with_params(&default_starts(family)[0])).map(|_| ())
}

pub fn criterion_attraction(s: &PseudoSample, k: usize, family: &TailFamily) -> Result<f64> {
    check_family(Regime::Attraction, family)?;
    Ok(CriterionTarget::from_sample(s, k, Regime::Attraction, DEFAULT_PANELS)?.evaluate(family))
}

pub fn criterion_balance(s: &PseudoSample, k: usize, family: &TailFamily) -> Result<f64> {
    check_family(Regime::Balance, family)?;
    Ok(CriterionTarget::from_sample(s, k, Regime::Balance, DEFAULT_PANELS)?.evaluate(family))
}

pub fn criterion_repulsion(s: &PseudoSample, k: usize, family: &TailFamily) -> Result<f64> {
    check_family(Regime::Repulsion, family)?;
    Ok(CriterionTarget::from_sample(s, k, Regime::Repulsion, DEFAULT_PANELS)?.evaluate(family))
}

pub fn criterion_mixed(s: &PseudoSample, k: usize, rho: f64, nu: f64) -> Result<f64> {
    let f = TailFamily::StudentTTdf { rho, nu };
    TailModel::new(Regime::Mixed, f)?;
    Ok(CriterionTarget::from_sample(s, k, Regime::Mixed, DEFAULT_PANELS)?.evaluate(&f))
}

/// Parameter box of a family's fit.
pub fn family_box(family: &TailFamily) -> BoxConstraint {
    let (lo, hi) = match family {
        TailFamily::ClaytonTdf { .. } | TailFamily::ReflectedIpsBoundary { .. } => {
            (vec![0.05], vec![20.0])
        }
        TailFamily::ReflectedGumbelTdf { .. } => (vec![1.01], vec![15.0]),
        TailFamily::FrankBoundary { .. } => (vec![-35.0], vec![35.0]),
        TailFamily::StudentTTdf { .. } => (vec![-0.99, 1.0], vec![0.99, 50.0]),
    };
    BoxConstraint::new(lo, hi).expect("static boxes are valid")
}

fn default_starts(family: &TailFamily) -> Vec<Vec<f64>> {
    match family {
        TailFamily::ClaytonTdf { .. } | TailFamily::ReflectedIpsBoundary { .. } => {
            vec![vec![0.5], vec![2.0], vec![8.0]]
        }
        TailFamily::ReflectedGumbelTdf { .. } => vec![vec![1.5], vec![3.0], vec![8.0]],
        TailFamily::FrankBoundary { .. } => vec![vec![-5.0], vec![2.0], vec![10.0]],
        TailFamily::StudentTTdf { .. } => vec![vec![0.5, 4.0], vec![0.0, 10.0], vec![-0.5, 4.0]],
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub tau: f64,
    /// Fit an attraction model even when λ̂ ≤ τ.
    pub force: bool,
    pub panels: usize,
    pub minimize: MinimizeOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            force: false,
            panels: DEFAULT_PANELS,
            minimize: MinimizeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdeFit {
    pub regime: Regime,
    pub model: TailModel,
    pub theta_hat: Vec<f64>,
    pub criterion_value: f64,
    pub k: usize,
    pub n: usize,
    /// θ̂ lies on (or within 1e-4 of the width of) the box boundary.
    pub at_bound: bool,
    pub converged: bool,
    /// Frank fit inside the independence band, replaced by A(v) = v.
    pub independence: bool,
}

impl MdeFit {
    pub fn family_name(&self) -> &'static str {
        self.model.family().name()
    }
}

pub fn fit(s: &PseudoSample, k: usize, regime: Regime, family: &TailFamily) -> Result<MdeFit> {
    fit_with_options(s, k, regime, family, &FitOptions::default())
}

/// Minimize the regime's criterion over the family's box from three
/// deterministic starts; the lowest criterion wins, ties by start index.
pub fn fit_with_options(
    s: &PseudoSample,
    k: usize,
    regime: Regime,
    family: &TailFamily,
    opts: &FitOptions,
) -> Result<MdeFit> {
    if s.n() < k {
        return invalid(format!("sample size n = {} is below k = {k}", s.n()));
    }
    check_family(regime, family)?;
    if regime == Regime::Attraction && !opts.force {
        let tc = tail_coefficients(s, k)?;
        if tc.lambda_hat <= opts.tau {
            return Err(Error::WrongRegime {
                expected: "attraction",
                found: classify_regime(&tc, opts.tau),
            });
        }
    }
    let target = CriterionTarget::from_sample(s, k, regime, opts.panels)?;
    fit_target(&target, family, opts, k, s.n())
}

/// Fit against a precomputed target.
pub fn fit_target(
    target: &CriterionTarget,
    family: &TailFamily,
    opts: &FitOptions,
    k: usize,
    n: usize,
) -> Result<MdeFit> {
    let regime = target.regime();
    check_family(regime, family)?;
    let bounds = family_box(family);
    let starts = default_starts(family);
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| {
            minimize_with_options(
                |x| target.evaluate(&family.with_params(x)),
                &bounds,
                x0,
                &opts.minimize,
            )
        })
        .collect();
    let mut best: Option<crate::numerics::Minimum> = None;
    let mut failures = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok(m) if m.value.is_finite() => {
                if best.as_ref().is_none_or(|b| m.value < b.value) {
                    best = Some(m);
                }
            }
            Ok(m) => failures.push(format!("start {i}: criterion {}", m.value)),
            Err(e) => failures.push(format!("start {i}: {e}")),
        }
    }
    let best = best.ok_or_else(|| {
        Error::Optimization(format!("all starts failed: {}", failures.join("; ")))
    })?;
    let mut theta = best.x.clone();
    let mut value = best.value;
    let mut independence = false;
    if let TailFamily::FrankBoundary { .. } = family {
        if theta[0].abs() < FRANK_INDEPENDENCE_BAND {
            theta[0] = 0.0;
            value = target.evaluate(&family.with_params(&theta));
            independence = true;
        }
    }
    let model = TailModel::new(regime, family.with_params(&theta))?;
    Ok(MdeFit {
        regime,
        model,
        at_bound: bounds.near_boundary(&best.x, 1e-4),
        theta_hat: theta,
        criterion_value: value,
        k,
        n,
        converged: best.converged,
        independence,
    })
}

/// Candidate families per regime, fewer parameters first.
pub fn regime_candidates(regime: Regime) -> Vec<TailFamily> {
    match regime {
        Regime::Attraction => vec![
            TailFamily::ReflectedGumbelTdf { delta: 2.0 },
            TailFamily::StudentTTdf { rho: 0.5, nu: 4.0 },
        ],
        Regime::Repulsion => vec![TailFamily::ClaytonTdf { theta: 1.0 }],
        Regime::Balance => vec![
            TailFamily::ReflectedIpsBoundary { theta: 1.0 },
            TailFamily::FrankBoundary { theta: 1.0 },
        ],
        Regime::Mixed => vec![TailFamily::StudentTTdf { rho: 0.0, nu: 4.0 }],
    }
}

/// Fit every candidate family of `regime` and keep the lowest criterion; ties
/// go to the family with fewer parameters.
pub fn fit_regime(s: &PseudoSample, k: usize, regime: Regime, opts: &FitOptions) -> Result<MdeFit> {
    if s.n() < k {
        return invalid(format!("sample size n = {} is below k = {k}", s.n()));
    }
    if regime == Regime::Attraction && !opts.force {
        let tc = tail_coefficients(s, k)?;
        if tc.lambda_hat <= opts.tau {
            return Err(Error::WrongRegime {
                expected: "attraction",
                found: classify_regime(&tc, opts.tau),
            });
        }
    }
    let target = CriterionTarget::from_sample(s, k, regime, opts.panels)?;
    let mut best: Option<MdeFit> = None;
    let mut failures = Vec::new();
    for fam in regime_candidates(regime) {
        match fit_target(&target, &fam, opts, k, s.n()) {
            Ok(f) => {
                if best
                    .as_ref()
                    .is_none_or(|b| f.criterion_value < b.criterion_value)
                {
                    best = Some(f);
                }
            }
            Err(e) => failures.push(format!("{}: {e}", fam.name())),
        }
    }
    best.ok_or_else(|| {
        Error::Optimization(format!(
            "no candidate family fitted: {}",
            failures.join("; ")
        ))
    })
}

/// A plug-in level, clamped into (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VHat {
    pub value: f64,
    pub clamped: bool,
}

const V_MIN: f64 = f64::MIN_POSITIVE;
const V_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

fn clamp_level(v: f64) -> VHat {
    if v < V_MIN {
        VHat {
            value: V_MIN,
            clamped: true,
        }
    } else if v > V_MAX {
        VHat {
            value: V_MAX,
            clamped: true,
        }
    } else {
        VHat {
            value: v,
            clamped: false,
        }
    }
}

/// Plug-in estimate of v(q|p) from a fitted tail model.
pub fn v_hat(f: &MdeFit, q: f64, p: f64) -> Result<VHat> {
    check_probability("q", q, true, true)?;
    check_probability("p", p, true, true)?;
    let m = &f.model;
    let v = match f.regime {
        Regime::Attraction => m.h_inverse(q)? * p,
        Regime::Repulsion => 1.0 - m.h_inverse(1.0 - q)? * p,
        Regime::Balance => m.boundary_cdf_inverse(q)?,
        Regime::Mixed => {
            let qs = m.q_star().expect("mixed models are t based");
            if (q - qs).abs() <= MIXED_Q_STAR_TOL {
                0.5
            } else if q < qs {
                m.h_inverse(q)? * p
            } else {
                1.0 - m.h2_inverse(1.0 - q)? * p
            }
        }
    };
    Ok(clamp_level(v))
}

/// r̂(p) = v̂(p|p)/p.
pub fn adjustment_factor(f: &MdeFit, p: f64) -> Result<VHat> {
    let v = v_hat(f, p, p)?;
    Ok(VHat {
        value: v.value / p,
        clamped: v.clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{CopulaSpec, Reflection};
    use crate::empirical::pseudo_observations;

    fn sample(c: &CopulaSpec, n: usize, seed: u64) -> PseudoSample {
        let smp = c.sample(n, seed);
        pseudo_observations(&smp.u, &smp.v).unwrap()
    }

    fn manual_fit(regime: Regime, family: TailFamily) -> MdeFit {
        MdeFit {
            regime,
            model: TailModel::new(regime, family).unwrap(),
            theta_hat: family.params(),
            criterion_value: 0.0,
            k: 100,
            n: 1000,
            at_bound: false,
            converged: true,
            independence: false,
        }
    }

    #[test]
    fn classification_examples() {
        let tc = |a, b| TailCoefficients {
            lambda_hat: a,
            lambda_hat_2star: b,
            k: 100,
            n: 1000,
        };
        assert_eq!(classify_regime(&tc(0.4, 0.02), 0.1), Regime::Attraction);
        assert_eq!(classify_regime(&tc(0.03, 0.05), 0.1), Regime::Balance);
        assert_eq!(classify_regime(&tc(0.3, 0.3), 0.1), Regime::Mixed);
        assert_eq!(classify_regime(&tc(0.1, 0.3), 0.1), Regime::Repulsion);
    }

    #[test]
    fn self_test_targets_vanish() {
        for (regime, fam) in [
            (
                Regime::Attraction,
                TailFamily::ReflectedGumbelTdf { delta: 2.3 },
            ),
            (
                Regime::Attraction,
                TailFamily::StudentTTdf { rho: 0.4, nu: 3.0 },
            ),
            (Regime::Repulsion, TailFamily::ClaytonTdf { theta: 1.7 }),
            (Regime::Balance, TailFamily::FrankBoundary { theta: 4.0 }),
            (
                Regime::Balance,
                TailFamily::ReflectedIpsBoundary { theta: 0.8 },
            ),
            (
                Regime::Mixed,
                TailFamily::StudentTTdf { rho: -0.2, nu: 6.0 },
            ),
        ] {
            let model = TailModel::new(regime, fam).unwrap();
            let target = CriterionTarget::from_model(&model, DEFAULT_PANELS);
            assert_eq!(target.evaluate(&fam), 0.0);
            let other = fam.with_params(&fam.params().iter().map(|x| x * 1.3).collect::<Vec<_>>());
            assert!(target.evaluate(&other) > 0.0);
            let fit = fit_target(&target, &fam, &FitOptions::default(), 100, 1000).unwrap();
            for (a, b) in fit.theta_hat.iter().zip(fam.params()) {
                assert!((a - b).abs() < 1e-3, "{fam:?} -> {:?}", fit.theta_hat);
            }
        }
    }

    #[test]
    fn attraction_criterion_positive_for_dependent_data() {
        let s = sample(&CopulaSpec::clayton(2.0).unwrap(), 5000, 3);
        let c =
            criterion_attraction(&s, 100, &TailFamily::ReflectedGumbelTdf { delta: 1.0 }).unwrap();
        assert!(c > 0.1);
    }

    #[test]
    fn independence_balance_criterion_is_small() {
        let s = sample(&CopulaSpec::independence(), 20_000, 8);
        let c = criterion_balance(&s, 200, &TailFamily::FrankBoundary { theta: 0.0 }).unwrap();
        assert!(c < 0.05, "{c}");
    }

    #[test]
    fn repulsion_criterion_large_for_comonotone_data() {
        let x: Vec<f64> = (0..2000).map(|i| i as f64).collect();
        let s = pseudo_observations(&x, &x).unwrap();
        let c = criterion_repulsion(&s, 100, &TailFamily::ClaytonTdf { theta: 1.0 }).unwrap();
        assert!(c > 0.3, "{c}");
    }

    #[test]
    fn countermonotone_repulsion_fit_hits_upper_bound() {
        let x: Vec<f64> = (0..2000).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        let s = pseudo_observations(&x, &y).unwrap();
        let f = fit(
            &s,
            100,
            Regime::Repulsion,
            &TailFamily::ClaytonTdf { theta: 1.0 },
        )
        .unwrap();
        assert!(f.at_bound && f.theta_hat[0] > 19.0, "{f:?}");
    }

    #[test]
    fn fit_errors() {
        let s = sample(&CopulaSpec::clayton(2.0).unwrap(), 50, 1);
        assert!(fit(
            &s,
            100,
            Regime::Attraction,
            &TailFamily::ClaytonTdf { theta: 1.0 }
        )
        .is_err());
        assert!(fit(
            &s,
            10,
            Regime::Balance,
            &TailFamily::ClaytonTdf { theta: 1.0 }
        )
        .is_err());
        let ind = sample(&CopulaSpec::independence(), 5000, 2);
        assert!(matches!(
            fit(
                &ind,
                100,
                Regime::Attraction,
                &TailFamily::ReflectedGumbelTdf { delta: 2.0 }
            ),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn constant_data_forced_attraction_is_flagged() {
        let x = vec![1.0; 1000];
        let s = pseudo_observations(&x, &x).unwrap();
        let opts = FitOptions {
            force: true,
            ..FitOptions::default()
        };
        let f = fit_with_options(
            &s,
            100,
            Regime::Attraction,
            &TailFamily::ReflectedGumbelTdf { delta: 2.0 },
            &opts,
        )
        .unwrap();
        assert!(f.at_bound, "{f:?}");
    }

    #[test]
    fn fit_is_rank_invariant() {
        let smp = CopulaSpec::gumbel(2.0)
            .unwrap()
            .reflect(Reflection::Survival)
            .sample(4000, 9);
        let a = pseudo_observations(&smp.u, &smp.v).unwrap();
        let xt: Vec<f64> = smp.u.iter().map(|u| u.ln()).collect();
        let yt: Vec<f64> = smp.v.iter().map(|v| (v / (1.0 - v)).ln()).collect();
        let b = pseudo_observations(&xt, &yt).unwrap();
        let fam = TailFamily::ReflectedGumbelTdf { delta: 2.0 };
        assert_eq!(
            fit(&a, 100, Regime::Attraction, &fam).unwrap(),
            fit(&b, 100, Regime::Attraction, &fam).unwrap()
        );
    }

    #[test]
    fn reflected_gumbel_recovery() {
        let c = CopulaSpec::gumbel(2.0)
            .unwrap()
            .reflect(Reflection::Survival);
        let s = sample(&c, 20_000, 44);
        let f = fit(
            &s,
            200,
            Regime::Attraction,
            &TailFamily::ReflectedGumbelTdf { delta: 1.5 },
        )
        .unwrap();
        assert!((f.theta_hat[0] - 2.0).abs() < 0.5, "{f:?}");
    }

    #[test]
    fn frank_fit_snaps_to_independence() {
        let s = sample(&CopulaSpec::independence(), 20_000, 12);
        let target =
            CriterionTarget::from_sample(&s, 200, Regime::Balance, DEFAULT_PANELS).unwrap();
        let fam = TailFamily::FrankBoundary { theta: 0.001 };
        let model = TailModel::new(Regime::Balance, fam).unwrap();
        let own = CriterionTarget::from_model(&model, DEFAULT_PANELS);
        let f = fit_target(&own, &fam, &FitOptions::default(), 200, 20_000).unwrap();
        assert!(f.independence && f.theta_hat[0] == 0.0, "{f:?}");
        assert!(target.evaluate(&TailFamily::FrankBoundary { theta: 0.0 }) < 0.05);
    }

    #[test]
    fn v_hat_examples() {
        let frank = manual_fit(Regime::Balance, TailFamily::FrankBoundary { theta: 2.0 });
        for p in [0.1, 0.01] {
            let v = v_hat(&frank, 0.3, p).unwrap().value;
            assert!((v + (1.0 - 0.3 * (1.0 - (-2.0f64).exp())).ln() / 2.0).abs() < 1e-14);
        }
        let clayton = manual_fit(Regime::Attraction, TailFamily::ClaytonTdf { theta: 1.0 });
        assert!((v_hat(&clayton, 0.5, 0.01).unwrap().value - 0.01).abs() < 1e-14);
        let r = adjustment_factor(&clayton, 0.05).unwrap().value;
        assert!((r - 0.05 / 0.95).abs() < 1e-12);
        assert!(matches!(
            v_hat(&clayton, 1.0 - 1e-17, 0.1),
            Err(Error::InvalidArgument(_))
        ));
        let rep = manual_fit(Regime::Repulsion, TailFamily::ClaytonTdf { theta: 1.0 });
        assert!(v_hat(&rep, 0.5, 1e-6).unwrap().value > 0.999_99);
        let ind = manual_fit(Regime::Balance, TailFamily::FrankBoundary { theta: 0.0 });
        assert!((adjustment_factor(&ind, 0.05).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_plug_in_switches_at_q_star() {
        let f = manual_fit(Regime::Mixed, TailFamily::StudentTTdf { rho: 0.3, nu: 4.0 });
        let qs = f.model.q_star().unwrap();
        let p = 1e-8;
        assert_eq!(v_hat(&f, qs, p).unwrap().value, 0.5);
        assert!(v_hat(&f, qs - 0.05, p).unwrap().value < 0.5);
        assert!(v_hat(&f, qs + 0.05, p).unwrap().value > 0.5);
        let lo = v_hat(&f, 0.2 * qs, p).unwrap().value;
        assert!(lo < 0.1);
    }

    #[test]
    fn attraction_plug_in_respects_frechet_bounds() {
        let f = manual_fit(
            Regime::Attraction,
            TailFamily::ReflectedGumbelTdf { delta: 1.8 },
        );
        for q in [0.1, 0.5, 0.9] {
            for p in [0.01, 0.05] {
                let v = v_hat(&f, q, p).unwrap().value;
                assert!(v >= p * q - 1e-15 && v <= q, "{q} {p} {v}");
            }
        }
    }
}
