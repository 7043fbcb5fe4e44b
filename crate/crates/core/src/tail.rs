//! Tail functionals of parametric copulas: tail dependence functions `b`,
//! their sections `H(r) = b(1, r)`, boundary conditional cdfs `A`, closed-form
//! asymptotic levels for the standard families, and the limit calculators for
//! `v(p)` and ΔCoVaR.

use serde::Serialize;

use crate::copula::{CopulaFamily, CopulaSpec, Reflection};
use crate::error::{check_probability, invalid, Error, Result};
use crate::numerics::{self, find_root_monotone};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    Attraction,
    Repulsion,
    Balance,
    Mixed,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Attraction => "attraction",
            Regime::Repulsion => "repulsion",
            Regime::Balance => "balance",
            Regime::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "attraction" => Ok(Regime::Attraction),
            "repulsion" => Ok(Regime::Repulsion),
            "balance" => Ok(Regime::Balance),
            "mixed" => Ok(Regime::Mixed),
            other => invalid(format!("unknown regime '{other}'")),
        }
    }
}

/// Parametric tail functional families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailFamily {
    /// b = w1 + w2 - (w1^δ + w2^δ)^{1/δ}, δ >= 1.
    ReflectedGumbelTdf { delta: f64 },
    /// b = (w1^{-θ} + w2^{-θ})^{-1/θ}, θ > 0.
    ClaytonTdf { theta: f64 },
    /// Lower tail dependence function of the t copula.
    StudentTTdf { rho: f64, nu: f64 },
    /// A(v) = 1 - exp(-F_Γ^{-1}(v; θ)).
    ReflectedIpsBoundary { theta: f64 },
    /// A(v) = (1 - e^{-θv}) / (1 - e^{-θ}); θ = 0 is the independence limit A(v) = v.
    FrankBoundary { theta: f64 },
}

impl TailFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TailFamily::ReflectedGumbelTdf { .. } => "ReflectedGumbel",
            TailFamily::ClaytonTdf { .. } => "Clayton",
            TailFamily::StudentTTdf { .. } => "StudentT",
            TailFamily::ReflectedIpsBoundary { .. } => "ReflectedIPS",
            TailFamily::FrankBoundary { .. } => "Frank",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            TailFamily::ReflectedGumbelTdf { delta } => vec![delta],
            TailFamily::ClaytonTdf { theta }
            | TailFamily::ReflectedIpsBoundary { theta }
            | TailFamily::FrankBoundary { theta } => vec![theta],
            TailFamily::StudentTTdf { rho, nu } => vec![rho, nu],
        }
    }

    /// Same family with a new parameter vector.
    pub fn with_params(&self, x: &[f64]) -> TailFamily {
        match *self {
            TailFamily::ReflectedGumbelTdf { .. } => TailFamily::ReflectedGumbelTdf { delta: x[0] },
            TailFamily::ClaytonTdf { .. } => TailFamily::ClaytonTdf { theta: x[0] },
            TailFamily::StudentTTdf { .. } => TailFamily::StudentTTdf {
                rho: x[0],
                nu: x[1],
            },
            TailFamily::ReflectedIpsBoundary { .. } => {
                TailFamily::ReflectedIpsBoundary { theta: x[0] }
            }
            TailFamily::FrankBoundary { .. } => TailFamily::FrankBoundary { theta: x[0] },
        }
    }

    fn is_tdf(&self) -> bool {
        matches!(
            self,
            TailFamily::ReflectedGumbelTdf { .. }
                | TailFamily::ClaytonTdf { .. }
                | TailFamily::StudentTTdf { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TailFamily::ReflectedGumbelTdf { delta } => delta.is_finite() && delta >= 1.0,
            TailFamily::ClaytonTdf { theta } | TailFamily::ReflectedIpsBoundary { theta } => {
                theta.is_finite() && theta > 0.0
            }
            TailFamily::StudentTTdf { rho, nu } => rho.abs() < 1.0 && nu.is_finite() && nu > 0.0,
            TailFamily::FrankBoundary { theta } => theta.abs() <= 35.0,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!(
                "parameters {:?} outside the {} domain",
                self.params(),
                self.name()
            ))
        }
    }
}

/// A tail model: a regime together with the family describing its tail functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailModel {
    regime: Regime,
    family: TailFamily,
}

impl TailModel {
    pub fn new(regime: Regime, family: TailFamily) -> Result<Self> {
        family.validate()?;
        let ok = match regime {
            Regime::Attraction | Regime::Repulsion => family.is_tdf(),
            Regime::Balance => !family.is_tdf(),
            Regime::Mixed => matches!(family, TailFamily::StudentTTdf { .. }),
        };
        if !ok {
            return invalid(format!(
                "{} cannot model the {} regime",
                family.name(),
                regime
            ));
        }
        Ok(Self { regime, family })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn family(&self) -> TailFamily {
        self.family
    }

    fn require_tdf(&self) -> Result<()> {
        if self.family.is_tdf() {
            Ok(())
        } else {
            Err(Error::WrongRegime {
                expected: "attraction, repulsion or mixed",
                found: self.regime,
            })
        }
    }

    fn require_balance(&self) -> Result<()> {
        if self.regime == Regime::Balance {
            Ok(())
        } else {
            Err(Error::WrongRegime {
                expected: "balance",
                found: self.regime,
            })
        }
    }

    /// Tail dependence function b(w1, w2). For a repulsion model this is the
    /// function of the 2-reflected copula.
    pub fn tdf_eval(&self, w1: f64, w2: f64) -> Result<f64> {
        self.require_tdf()?;
        if !(w1 > 0.0 && w2 > 0.0) {
            return invalid(format!("weights ({w1}, {w2}) must be positive"));
        }
        Ok(tdf(&self.family, w1, w2))
    }

    /// Tail dependence function of the 2-reflected corner of a mixed model:
    /// the t form with ρ replaced by -ρ.
    pub fn tdf_reflected_eval(&self, w1: f64, w2: f64) -> Result<f64> {
        match self.family {
            TailFamily::StudentTTdf { rho, nu } if self.regime == Regime::Mixed => {
                Ok(tdf(&TailFamily::StudentTTdf { rho: -rho, nu }, w1, w2))
            }
            _ => Err(Error::WrongRegime {
                expected: "mixed",
                found: self.regime,
            }),
        }
    }

    pub fn h_eval(&self, r: f64) -> Result<f64> {
        self.tdf_eval(1.0, r)
    }

    /// b_∞ = lim_{r→∞} H(r), in closed form for every family.
    pub fn b_inf(&self) -> Result<f64> {
        self.require_tdf()?;
        Ok(b_inf(&self.family))
    }

    /// H^{-1}(q) for q in (0, b_∞).
    pub fn h_inverse(&self, q: f64) -> Result<f64> {
        self.require_tdf()?;
        h_inverse(&self.family, q)
    }

    /// H^{2*}(r) and its inverse for a mixed model.
    pub fn h2_inverse(&self, q: f64) -> Result<f64> {
        match self.family {
            TailFamily::StudentTTdf { rho, nu } if self.regime == Regime::Mixed => {
                h_inverse(&TailFamily::StudentTTdf { rho: -rho, nu }, q)
            }
            _ => Err(Error::WrongRegime {
                expected: "mixed",
                found: self.regime,
            }),
        }
    }

    /// q* = T_{ν+1}(ρK) for t-based models.
    pub fn q_star(&self) -> Option<f64> {
        match self.family {
            TailFamily::StudentTTdf { rho, nu } => Some(t_q_star(rho, nu)),
            _ => None,
        }
    }

    /// Boundary conditional cdf A(v).
    pub fn boundary_cdf_eval(&self, v: f64) -> Result<f64> {
        self.require_balance()?;
        check_probability("v", v, false, false)?;
        Ok(boundary_cdf(&self.family, v))
    }

    /// A^{-1}(q), in closed form for both balance families.
    pub fn boundary_cdf_inverse(&self, q: f64) -> Result<f64> {
        self.require_balance()?;
        check_probability("q", q, false, false)?;
        Ok(boundary_cdf_inverse(&self.family, q))
    }

    /// Atoms (p0, p1) of the extended limiting conditional distribution at 0 and 1.
    pub fn boundary_atoms(&self) -> (f64, f64) {
        match self.regime {
            Regime::Attraction => (b_inf(&self.family), 0.0),
            Regime::Repulsion => (0.0, b_inf(&self.family)),
            Regime::Balance => (0.0, 0.0),
            Regime::Mixed => {
                let q = self.q_star().expect("mixed models are t based");
                (q, 1.0 - q)
            }
        }
    }
}

pub(crate) fn t_q_star(rho: f64, nu: f64) -> f64 {
    let k = ((nu + 1.0) / (1.0 - rho * rho)).sqrt();
    numerics::t_cdf(rho * k, nu + 1.0)
}

/// Unchecked tail dependence function; the hot path of the MDE criteria.
pub(crate) fn tdf(f: &TailFamily, w1: f64, w2: f64) -> f64 {
    match *f {
        TailFamily::ReflectedGumbelTdf { delta } => {
            let (m, big) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            // m + big - big (1 + (m/big)^δ)^{1/δ}
            m - big * ((m / big).powf(delta).ln_1p() / delta).exp_m1()
        }
        TailFamily::ClaytonTdf { theta } => {
            let (m, big) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            m * (1.0 + (m / big).powf(theta)).powf(-1.0 / theta)
        }
        TailFamily::StudentTTdf { rho, nu } => {
            let k = ((nu + 1.0) / (1.0 - rho * rho)).sqrt();
            let a = (w2 / w1).powf(-1.0 / nu);
            let b = (w1 / w2).powf(-1.0 / nu);
            w1 * numerics::t_cdf(k * (rho - a), nu + 1.0)
                + w2 * numerics::t_cdf(k * (rho - b), nu + 1.0)
        }
        _ => f64::NAN,
    }
}

fn b_inf(f: &TailFamily) -> f64 {
    match *f {
        TailFamily::ReflectedGumbelTdf { delta } => {
            if delta > 1.0 {
                1.0
            } else {
                0.0
            }
        }
        TailFamily::ClaytonTdf { .. } => 1.0,
        TailFamily::StudentTTdf { rho, nu } => t_q_star(rho, nu),
        _ => f64::NAN,
    }
}

fn h_inverse(f: &TailFamily, q: f64) -> Result<f64> {
    let b = b_inf(f);
    if !(q > 0.0 && q < b) {
        return Err(Error::OutOfRange { q, b_inf: b });
    }
    match *f {
        // H(r) = (1 + r^{-θ})^{-1/θ}
        TailFamily::ClaytonTdf { theta } => Ok((q.powf(-theta) - 1.0).powf(-1.0 / theta)),
        _ => {
            let h = |r: f64| tdf(f, 1.0, r);
            let mut lo = 1e-8;
            while h(lo) > q {
                lo *= 1e-4;
                if lo < 1e-300 {
                    return Ok(0.0);
                }
            }
            let mut hi = 1.0;
            while h(hi) < q {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::OutOfRange { q, b_inf: b });
                }
            }
            let y = find_root_monotone(|y| h(y.exp()) - q, lo.ln(), hi.ln(), 1e-14)?;
            Ok(y.exp())
        }
    }
}

fn boundary_cdf(f: &TailFamily, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    match *f {
        TailFamily::ReflectedIpsBoundary { theta } => -(-numerics::gamma_p_inv(theta, v)).exp_m1(),
        TailFamily::FrankBoundary { theta } => {
            if theta == 0.0 {
                v
            } else {
                (-theta * v).exp_m1() / (-theta).exp_m1()
            }
        }
        _ => f64::NAN,
    }
}

fn boundary_cdf_inverse(f: &TailFamily, q: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    match *f {
        TailFamily::ReflectedIpsBoundary { theta } => numerics::gamma_p(theta, -(-q).ln_1p()),
        TailFamily::FrankBoundary { theta } => {
            if theta == 0.0 {
                q
            } else {
                -(q * (-theta).exp_m1()).ln_1p() / theta
            }
        }
        _ => f64::NAN,
    }
}

// ---------------------------------------------------------------------------
// Closed-form catalogue
// ---------------------------------------------------------------------------

/// The six standard families with closed-form asymptotic levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Table1Row {
    Clayton {
        theta: f64,
    },
    /// Survival Gumbel.
    GumbelStar {
        delta: f64,
    },
    /// Survival IPS.
    IpsStar {
        theta: f64,
    },
    Frank {
        theta: f64,
    },
    /// 2-reflected Gumbel.
    Gumbel2Star {
        delta: f64,
    },
    /// 2-reflected Clayton.
    Clayton2Star {
        theta: f64,
    },
}

impl Table1Row {
    pub fn name(&self) -> &'static str {
        match self {
            Table1Row::Clayton { .. } => "Clayton",
            Table1Row::GumbelStar { .. } => "Gumbel*",
            Table1Row::IpsStar { .. } => "IPS*",
            Table1Row::Frank { .. } => "Frank",
            Table1Row::Gumbel2Star { .. } => "Gumbel2*",
            Table1Row::Clayton2Star { .. } => "Clayton2*",
        }
    }

    /// The exact copula this row describes.
    pub fn copula(&self) -> Result<CopulaSpec> {
        match *self {
            Table1Row::Clayton { theta } => CopulaSpec::clayton(theta),
            Table1Row::GumbelStar { delta } => {
                Ok(CopulaSpec::gumbel(delta)?.reflect(Reflection::Survival))
            }
            Table1Row::IpsStar { theta } => {
                Ok(CopulaSpec::ips(theta)?.reflect(Reflection::Survival))
            }
            Table1Row::Frank { theta } => CopulaSpec::frank(theta),
            Table1Row::Gumbel2Star { delta } => {
                Ok(CopulaSpec::gumbel(delta)?.reflect(Reflection::Reflect2))
            }
            Table1Row::Clayton2Star { theta } => {
                Ok(CopulaSpec::clayton(theta)?.reflect(Reflection::Reflect2))
            }
        }
    }

    pub fn kappa(&self) -> f64 {
        match *self {
            Table1Row::Clayton { .. } | Table1Row::GumbelStar { .. } => 1.0,
            Table1Row::IpsStar { theta } => 1.0 + 1.0 / theta,
            Table1Row::Frank { .. } => 2.0,
            Table1Row::Gumbel2Star { delta } => 1.0 + delta,
            Table1Row::Clayton2Star { theta } => theta + 2.0,
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            Table1Row::Clayton { .. } | Table1Row::GumbelStar { .. } => Regime::Attraction,
            Table1Row::IpsStar { .. } | Table1Row::Frank { .. } => Regime::Balance,
            Table1Row::Gumbel2Star { .. } | Table1Row::Clayton2Star { .. } => Regime::Repulsion,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Table1Row::Clayton { theta }
            | Table1Row::IpsStar { theta }
            | Table1Row::Clayton2Star { theta } => theta.is_finite() && theta > 0.0,
            Table1Row::GumbelStar { delta } | Table1Row::Gumbel2Star { delta } => {
                delta.is_finite() && delta > 1.0
            }
            Table1Row::Frank { theta } => theta != 0.0 && theta.abs() <= 35.0,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("bad parameter for row {:?}", self))
        }
    }
}

/// Asymptotic v(q|p) from the closed-form catalogue.
pub fn table1_v_qp(row: Table1Row, q: f64, p: f64) -> Result<f64> {
    row.validate()?;
    check_probability("q", q, true, true)?;
    check_probability("p", p, true, true)?;
    Ok(match row {
        Table1Row::Clayton { theta } => p * (q.powf(-theta) - 1.0).powf(-1.0 / theta),
        Table1Row::GumbelStar { delta } => {
            h_inverse(&TailFamily::ReflectedGumbelTdf { delta }, q)? * p
        }
        Table1Row::IpsStar { theta } => numerics::gamma_p(theta, -(-q).ln_1p()),
        Table1Row::Frank { theta } => -(q * (-theta).exp_m1()).ln_1p() / theta,
        Table1Row::Gumbel2Star { delta } => {
            -(-(delta * q).powf(1.0 / delta) * (-p.ln()).powf(1.0 - 1.0 / delta)).exp_m1()
        }
        Table1Row::Clayton2Star { theta } => {
            1.0 - ((1.0 - q).powf(-theta) - 1.0).powf(-1.0 / theta) * p
        }
    })
}

/// Asymptotic v(p) = v(p|p) from the closed-form catalogue.
pub fn table1_vp(row: Table1Row, p: f64) -> Result<f64> {
    row.validate()?;
    check_probability("p", p, true, true)?;
    Ok(match row {
        Table1Row::Clayton { .. } | Table1Row::GumbelStar { .. } => p * p,
        Table1Row::IpsStar { theta } => {
            if theta == 1.0 {
                return Err(Error::BranchBoundary {
                    param: "theta",
                    value: theta,
                });
            }
            let g = numerics::ln_gamma(theta + 1.0);
            if theta > 1.0 {
                (-g / theta).exp() * p.powf(2.0 - 1.0 / theta)
            } else {
                (-g).exp() * p.powf(theta)
            }
        }
        Table1Row::Frank { theta } => -(-theta).exp_m1() / theta * p,
        Table1Row::Gumbel2Star { delta } => {
            (delta * p).powf(1.0 / delta) * (-p.ln()).powf(1.0 - 1.0 / delta)
        }
        Table1Row::Clayton2Star { theta } => {
            if theta == 1.0 {
                return Err(Error::BranchBoundary {
                    param: "theta",
                    value: theta,
                });
            }
            if theta > 1.0 {
                1.0 - theta.powf(-1.0 / theta) * p.powf(1.0 - 1.0 / theta)
            } else {
                p.powf(1.0 - theta)
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Limit calculators
// ---------------------------------------------------------------------------

/// Inputs of the v(p) and ΔCoVaR limit calculators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitInputs {
    /// Tail order κ >= 1.
    pub kappa: f64,
    /// Growth exponent ρ of a(1, r) = O(r^ρ).
    pub rho_exp: f64,
    /// Lower-tail index ξ >= 0 of the system margin.
    pub xi: f64,
    /// Extended regular variation index γ in (0, ∞], used when ξ = 0.
    pub gamma: f64,
    /// Solution of a(1, a0) = 1, needed when κ = 2 and ξ > 0.
    pub a0: Option<f64>,
}

impl LimitInputs {
    fn validate(&self) -> Result<()> {
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            return invalid(format!("kappa = {} must be at least 1", self.kappa));
        }
        if !(self.rho_exp > 0.0 && self.rho_exp.is_finite()) {
            return invalid(format!("rho_exp = {} must be positive", self.rho_exp));
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return invalid(format!("xi = {} must be nonnegative", self.xi));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VpRate {
    /// v(p) = O(p^exponent); `None` when v(p) does not vanish.
    pub exponent: Option<f64>,
    /// κ >= 2 + ρ: v(p) does not tend to 0 and higher-order terms decide.
    pub does_not_vanish: bool,
}

/// Polynomial rate of v(p) → 0 implied by the tail order.
pub fn vp_rate(inputs: &LimitInputs) -> Result<VpRate> {
    inputs.validate()?;
    let (k, r) = (inputs.kappa, inputs.rho_exp);
    Ok(if k <= 2.0 {
        VpRate {
            exponent: Some(3.0 - k),
            does_not_vanish: false,
        }
    } else if k < 2.0 + r {
        VpRate {
            exponent: Some(1.0 - (k - 2.0) / r),
            does_not_vanish: false,
        }
    } else {
        VpRate {
            exponent: None,
            does_not_vanish: true,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitCase {
    /// 1 <= κ < 2: risk amplification.
    Amplification,
    /// κ = 2: tail orthant independence.
    OrthantIndependence,
    /// 2 < κ < 2 + ρ: risk attenuation.
    Attenuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaCovarLimit {
    /// Limit of ΔCoVaR(p) as p ↓ 0; may be -∞.
    pub value: f64,
    /// For ξ > 0 and κ ≠ 2, ΔCoVaR(p) behaves like -p^e (κ < 2) or 1 - p^e
    /// (κ > 2); this is e.
    pub rate_exponent: Option<f64>,
    pub case: LimitCase,
    /// γ = ∞ was supplied; the light-tail limit is the γ → ∞ limit of the
    /// finite-γ formula.
    pub gamma_infinite: bool,
}

/// Limit of ΔCoVaR(p) as p ↓ 0 from the copula tail order and the marginal tail.
pub fn delta_covar_limit(inputs: &LimitInputs) -> Result<DeltaCovarLimit> {
    inputs.validate()?;
    let LimitInputs {
        kappa: k,
        rho_exp: r,
        xi,
        gamma,
        a0,
    } = *inputs;
    if k >= 2.0 + r {
        return invalid(format!(
            "kappa = {k} >= 2 + rho_exp = {}; v(p) does not vanish",
            2.0 + r
        ));
    }
    let case = if k < 2.0 {
        LimitCase::Amplification
    } else if k == 2.0 {
        LimitCase::OrthantIndependence
    } else {
        LimitCase::Attenuation
    };
    if xi > 0.0 {
        let (value, rate) = match case {
            LimitCase::Amplification => (f64::NEG_INFINITY, Some(-(2.0 - k) * xi)),
            LimitCase::OrthantIndependence => {
                let a0 = match a0 {
                    Some(a) if a > 0.0 && a.is_finite() => a,
                    Some(a) => return invalid(format!("a0 = {a} must be positive")),
                    None => return invalid("a0 is required when kappa = 2 and xi > 0"),
                };
                (1.0 - a0.powf(-xi), None)
            }
            LimitCase::Attenuation => (1.0, Some((k - 2.0) * xi / r)),
        };
        return Ok(DeltaCovarLimit {
            value,
            rate_exponent: rate,
            case,
            gamma_infinite: false,
        });
    }
    if !(gamma > 0.0) {
        return invalid(format!("gamma = {gamma} must be positive"));
    }
    let gamma_infinite = gamma.is_infinite();
    let value = match case {
        LimitCase::Amplification => 1.0 - (3.0 - k).powf(gamma),
        LimitCase::OrthantIndependence => 0.0,
        LimitCase::Attenuation => 1.0 - (1.0 - (k - 2.0) / r).powf(gamma),
    };
    Ok(DeltaCovarLimit {
        value,
        rate_exponent: None,
        case,
        gamma_infinite,
    })
}

// ---------------------------------------------------------------------------
// Theoretical regime of an exact copula
// ---------------------------------------------------------------------------

/// Lower-tail behaviour at one corner of the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Corner {
    /// Tail order; `None` when it is not catalogued.
    order: Option<f64>,
    /// Mass the limiting conditional cdf puts on the corner's boundary.
    atom: f64,
    /// The tail expansion is not uniform, so the order alone does not
    /// determine the atom.
    non_uniform: bool,
}

impl Corner {
    fn new(order: f64, atom: f64) -> Self {
        Self {
            order: Some(order),
            atom,
            non_uniform: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeInfo {
    pub regime: Regime,
    /// Lower tail order κ.
    pub kappa: f64,
    /// Lower tail order of the 2-reflected copula.
    pub kappa_2star: Option<f64>,
    /// Atoms (p0, p1) of the limiting conditional cdf.
    pub atoms: (f64, f64),
    /// Gumbel-type lower corner or Gaussian: the regime follows from the
    /// atoms, not from κ.
    pub non_uniform_expansion: bool,
}

/// Corner `(a, b)` of the unreflected copula, with `a, b` in {0, 1} the limit
/// points of u and v.
fn base_corner(f: &CopulaFamily, a: bool, b: bool) -> Result<Corner> {
    let diagonal = a == b;
    Ok(match *f {
        CopulaFamily::Independence => Corner::new(2.0, 0.0),
        CopulaFamily::Comonotone => {
            if diagonal {
                Corner::new(1.0, 1.0)
            } else {
                Corner::new(f64::INFINITY, 0.0)
            }
        }
        CopulaFamily::Countermonotone => {
            if diagonal {
                Corner::new(f64::INFINITY, 0.0)
            } else {
                Corner::new(1.0, 1.0)
            }
        }
        CopulaFamily::Clayton { theta } => match (a, b) {
            (false, false) => Corner::new(1.0, 1.0),
            (true, true) => Corner::new(2.0, 0.0),
            _ => Corner::new(theta + 2.0, 0.0),
        },
        CopulaFamily::Gumbel { delta } => {
            if delta == 1.0 {
                Corner::new(2.0, 0.0)
            } else {
                match (a, b) {
                    (false, false) => Corner {
                        order: Some(2f64.powf(1.0 / delta)),
                        atom: 1.0,
                        non_uniform: true,
                    },
                    (true, true) => Corner::new(1.0, 1.0),
                    _ => Corner::new(1.0 + delta, 0.0),
                }
            }
        }
        CopulaFamily::Frank { .. } => Corner::new(2.0, 0.0),
        CopulaFamily::StudentT { rho, nu } => {
            let q = t_q_star(rho, nu);
            if diagonal {
                Corner::new(1.0, q)
            } else {
                Corner::new(1.0, 1.0 - q)
            }
        }
        CopulaFamily::Gaussian { rho } => {
            if rho == 0.0 {
                Corner::new(2.0, 0.0)
            } else {
                let r = if diagonal { rho } else { -rho };
                let atom = if r > 0.0 { 1.0 } else { 0.0 };
                Corner {
                    order: Some(2.0 / (1.0 + r)),
                    atom,
                    non_uniform: true,
                }
            }
        }
        CopulaFamily::Ips { theta } => match (a, b) {
            // the survival copula's lower corner
            (true, true) => Corner::new(1.0 + 1.0 / theta, 0.0),
            (true, false) | (false, true) => {
                if theta == 1.0 {
                    Corner::new(2.0, 0.0)
                } else {
                    Corner {
                        order: None,
                        atom: 0.0,
                        non_uniform: false,
                    }
                }
            }
            (false, false) => {
                if theta == 1.0 {
                    Corner::new(2.0, 0.0)
                } else {
                    return invalid(
                        "the lower corner of the unreflected IPS copula is not catalogued",
                    );
                }
            }
        },
    })
}

/// Regime of an exact copula from the boundary atoms of its limiting
/// conditional cdf, with the tail orders κ and κ^{2*}.
pub fn theoretical_regime(c: &CopulaSpec) -> Result<RegimeInfo> {
    let (fu, fv) = c.reflection().flips();
    let f = c.family();
    let lower = base_corner(&f, fu, fv)?;
    let upper_left = base_corner(&f, fu, !fv)?;
    let (p0, p1) = (lower.atom, upper_left.atom);
    let regime = match (p0 > 0.0, p1 > 0.0) {
        (true, false) if p0 >= 1.0 => Regime::Attraction,
        (false, true) if p1 >= 1.0 => Regime::Repulsion,
        (false, false) => Regime::Balance,
        _ => Regime::Mixed,
    };
    let kappa = lower.order.ok_or_else(|| {
        Error::InvalidArgument(format!("lower tail order of {c:?} is not catalogued"))
    })?;
    Ok(RegimeInfo {
        regime,
        kappa,
        kappa_2star: upper_left.order,
        atoms: (p0, p1),
        non_uniform_expansion: lower.non_uniform || upper_left.non_uniform,
    })
}
