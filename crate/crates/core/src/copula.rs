//! Exact bivariate copulas, their reflections, the conditional cdf given
//! `{U <= p}` and the copula-adjusted level `v(q|p; C)`.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{check_probability, invalid, Result};
use crate::numerics::{self, find_root_monotone, integrate_adaptive};
use crate::seed;

/// The four reflections, encoded by which coordinates are flipped
/// (`u -> 1-u`, `v -> 1-v`). They form the Klein four-group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Reflection {
    None,
    /// Both coordinates flipped.
    Survival,
    /// First coordinate flipped.
    Reflect1,
    /// Second coordinate flipped.
    Reflect2,
}

impl Reflection {
    pub fn flips(self) -> (bool, bool) {
        match self {
            Reflection::None => (false, false),
            Reflection::Survival => (true, true),
            Reflection::Reflect1 => (true, false),
            Reflection::Reflect2 => (false, true),
        }
    }

    pub fn from_flips(flip_u: bool, flip_v: bool) -> Self {
        match (flip_u, flip_v) {
            (false, false) => Reflection::None,
            (true, true) => Reflection::Survival,
            (true, false) => Reflection::Reflect1,
            (false, true) => Reflection::Reflect2,
        }
    }

    pub fn compose(self, other: Reflection) -> Reflection {
        let (a, b) = self.flips();
        let (c, d) = other.flips();
        Reflection::from_flips(a ^ c, b ^ d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CopulaFamily {
    Independence,
    Comonotone,
    Countermonotone,
    Clayton {
        theta: f64,
    },
    Gumbel {
        delta: f64,
    },
    Frank {
        theta: f64,
    },
    StudentT {
        rho: f64,
        nu: f64,
    },
    /// Integrated positive stable Archimedean copula.
    Ips {
        theta: f64,
    },
    Gaussian {
        rho: f64,
    },
}

impl CopulaFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CopulaFamily::Independence => "Independence",
            CopulaFamily::Comonotone => "Comonotone",
            CopulaFamily::Countermonotone => "Countermonotone",
            CopulaFamily::Clayton { .. } => "Clayton",
            CopulaFamily::Gumbel { .. } => "Gumbel",
            CopulaFamily::Frank { .. } => "Frank",
            CopulaFamily::StudentT { .. } => "StudentT",
            CopulaFamily::Ips { .. } => "IPS",
            CopulaFamily::Gaussian { .. } => "Gaussian",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            CopulaFamily::Independence
            | CopulaFamily::Comonotone
            | CopulaFamily::Countermonotone => vec![],
            CopulaFamily::Clayton { theta }
            | CopulaFamily::Frank { theta }
            | CopulaFamily::Ips { theta } => {
                vec![theta]
            }
            CopulaFamily::Gumbel { delta } => vec![delta],
            CopulaFamily::StudentT { rho, nu } => vec![rho, nu],
            CopulaFamily::Gaussian { rho } => vec![rho],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CopulaFamily::Independence
            | CopulaFamily::Comonotone
            | CopulaFamily::Countermonotone => true,
            CopulaFamily::Clayton { theta } | CopulaFamily::Ips { theta } => {
                theta.is_finite() && theta > 0.0
            }
            CopulaFamily::Gumbel { delta } => delta.is_finite() && delta >= 1.0,
            CopulaFamily::Frank { theta } => theta != 0.0 && theta.abs() <= 35.0,
            CopulaFamily::StudentT { rho, nu } => rho.abs() < 1.0 && nu.is_finite() && nu > 0.0,
            CopulaFamily::Gaussian { rho } => rho.abs() < 1.0,
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

    fn radially_symmetric(&self) -> bool {
        matches!(
            self,
            CopulaFamily::Independence
                | CopulaFamily::Comonotone
                | CopulaFamily::Countermonotone
                | CopulaFamily::Frank { .. }
                | CopulaFamily::StudentT { .. }
                | CopulaFamily::Gaussian { .. }
        )
    }
}

/// A parametric copula together with its reflection state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CopulaSpec {
    family: CopulaFamily,
    reflection: Reflection,
}

/// `n` pairs drawn from a copula.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformPairSample {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub seed: u64,
}

impl CopulaSpec {
    pub fn new(family: CopulaFamily, reflection: Reflection) -> Result<Self> {
        family.validate()?;
        Ok(Self { family, reflection })
    }

    pub fn independence() -> Self {
        Self {
            family: CopulaFamily::Independence,
            reflection: Reflection::None,
        }
    }

    pub fn comonotone() -> Self {
        Self {
            family: CopulaFamily::Comonotone,
            reflection: Reflection::None,
        }
    }

    pub fn countermonotone() -> Self {
        Self {
            family: CopulaFamily::Countermonotone,
            reflection: Reflection::None,
        }
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        Self::new(CopulaFamily::Clayton { theta }, Reflection::None)
    }

    pub fn gumbel(delta: f64) -> Result<Self> {
        Self::new(CopulaFamily::Gumbel { delta }, Reflection::None)
    }

    pub fn frank(theta: f64) -> Result<Self> {
        Self::new(CopulaFamily::Frank { theta }, Reflection::None)
    }

    pub fn student_t(rho: f64, nu: f64) -> Result<Self> {
        Self::new(CopulaFamily::StudentT { rho, nu }, Reflection::None)
    }

    pub fn ips(theta: f64) -> Result<Self> {
        Self::new(CopulaFamily::Ips { theta }, Reflection::None)
    }

    pub fn gaussian(rho: f64) -> Result<Self> {
        Self::new(CopulaFamily::Gaussian { rho }, Reflection::None)
    }

    pub fn family(&self) -> CopulaFamily {
        self.family
    }

    pub fn reflection(&self) -> Reflection {
        self.reflection
    }

    /// Compose with a further reflection. Applying the same reflection twice
    /// gives back the original copula.
    pub fn reflect(self, kind: Reflection) -> Self {
        Self {
            family: self.family,
            reflection: self.reflection.compose(kind),
        }
    }

    /// C(u, v) of the reflected copula.
    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        check_probability("u", u, false, false)?;
        check_probability("v", v, false, false)?;
        Ok(self.cdf_unchecked(u, v))
    }

    pub(crate) fn cdf_unchecked(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return v;
        }
        if v >= 1.0 {
            return u;
        }
        let f = &self.family;
        let c = match self.reflection {
            Reflection::None => base_cdf(f, u, v),
            Reflection::Survival => base_survival(f, u, v),
            // P(U > 1-u, V <= v)
            Reflection::Reflect1 => {
                if u <= v {
                    u - base_survival(f, u, 1.0 - v)
                } else {
                    v - base_cdf(f, 1.0 - u, v)
                }
            }
            // P(U <= u, V > 1-v)
            Reflection::Reflect2 => {
                if u <= v {
                    u - base_cdf(f, u, 1.0 - v)
                } else {
                    v - base_survival(f, 1.0 - u, v)
                }
            }
        };
        c.clamp((u + v - 1.0).max(0.0), u.min(v))
    }

    /// Pr(V <= v | U <= p) = C(p, v) / p.
    pub fn conditional_cdf_given_le(&self, v: f64, p: f64) -> Result<f64> {
        check_probability("p", p, true, false)?;
        check_probability("v", v, false, false)?;
        Ok(self.cdf_unchecked(p, v) / p)
    }

    /// The copula-adjusted level v(q|p; C): the smallest `v` with
    /// `C(p, v)/p >= q`. Solved by bisection on the logit of `v`, so the
    /// result has relative precision near both 0 and 1.
    pub fn v_exact(&self, q: f64, p: f64) -> Result<f64> {
        check_probability("q", q, true, true)?;
        check_probability("p", p, true, true)?;
        let y = find_root_monotone(
            |y| self.cdf_unchecked(p, logistic(y)) / p - q,
            -745.0,
            40.0,
            1e-12,
        )?;
        Ok(logistic(y))
    }

    /// Draw `n` iid pairs. Identical seeds give identical samples.
    pub fn sample(&self, n: usize, seed: u64) -> UniformPairSample {
        let mut rng = seed::rng(seed);
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        // IPS is sampled through its survival copula, which has the closed
        // conditional inverse.
        let extra = match self.family {
            CopulaFamily::Ips { .. } => Reflection::Survival,
            _ => Reflection::None,
        };
        let (flip_u, flip_v) = self.reflection.compose(extra).flips();
        for _ in 0..n {
            let (a, b) = sample_base(&self.family, &mut rng);
            let a = if flip_u { 1.0 - a } else { a };
            let b = if flip_v { 1.0 - b } else { b };
            u.push(clamp_open(a));
            v.push(clamp_open(b));
        }
        UniformPairSample { u, v, seed }
    }
}

fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

fn clamp_open(x: f64) -> f64 {
    const LO: f64 = f64::MIN_POSITIVE;
    x.clamp(LO, 1.0 - f64::EPSILON / 2.0)
}

// ---------------------------------------------------------------------------
// Unreflected cdfs and survival copulas C*(u,v) = u + v - 1 + C(1-u, 1-v).
// Both are only called with u, v strictly inside (0, 1).
// ---------------------------------------------------------------------------

fn base_cdf(f: &CopulaFamily, u: f64, v: f64) -> f64 {
    match *f {
        CopulaFamily::Independence => u * v,
        CopulaFamily::Comonotone => u.min(v),
        CopulaFamily::Countermonotone => (u + v - 1.0).max(0.0),
        CopulaFamily::Clayton { theta } => clayton_cdf(theta, u, v),
        CopulaFamily::Gumbel { delta } => {
            let s = ((-u.ln()).powf(delta) + (-v.ln()).powf(delta)).powf(1.0 / delta);
            (-s).exp()
        }
        CopulaFamily::Frank { theta } => frank_cdf(theta, u, v),
        CopulaFamily::StudentT { rho, nu } => elliptical_cdf(Elliptical::T { rho, nu }, u, v),
        CopulaFamily::Gaussian { rho } => elliptical_cdf(Elliptical::Normal { rho }, u, v),
        CopulaFamily::Ips { theta } => {
            // u + v - 1 + C*(1-u, 1-v) collapses to Q(θ, s) with upper quantiles
            let x = numerics::gamma_q_inv(theta, u);
            let y = numerics::gamma_q_inv(theta, v);
            numerics::gamma_q(theta, ips_radius(theta, x, y))
        }
    }
}

fn base_survival(f: &CopulaFamily, u: f64, v: f64) -> f64 {
    if f.radially_symmetric() {
        return base_cdf(f, u, v);
    }
    match *f {
        CopulaFamily::Ips { theta } => ips_star_cdf(theta, u, v),
        CopulaFamily::Gumbel { delta } => {
            let a = -(-u).ln_1p();
            let b = -(-v).ln_1p();
            let s = (a.powf(delta) + b.powf(delta)).powf(1.0 / delta);
            u + v + (-s).exp_m1()
        }
        CopulaFamily::Clayton { theta } => {
            let a = (-theta * (-u).ln_1p()).exp_m1();
            let b = (-theta * (-v).ln_1p()).exp_m1();
            u + v + (-(a + b).ln_1p() / theta).exp_m1()
        }
        _ => u + v - 1.0 + base_cdf(f, 1.0 - u, 1.0 - v),
    }
}

fn clayton_cdf(theta: f64, u: f64, v: f64) -> f64 {
    let (m, big) = if u <= v { (u, v) } else { (v, u) };
    // m * (1 + (m/big)^theta - m^theta)^(-1/theta), overflow-free
    let inner = 1.0 + (m / big).powf(theta) - m.powf(theta);
    m * inner.powf(-1.0 / theta)
}

fn frank_cdf(theta: f64, u: f64, v: f64) -> f64 {
    let num = (-theta * u).exp_m1() * (-theta * v).exp_m1();
    -(num / (-theta).exp_m1()).ln_1p() / theta
}

/// The survival IPS copula u + v - F((x^θ + y^θ)^{1/θ}) with x = F^{-1}(u),
/// y = F^{-1}(v) and F the Gamma(θ, 1) cdf.
pub(crate) fn ips_star_cdf(theta: f64, u: f64, v: f64) -> f64 {
    let x = numerics::gamma_p_inv(theta, u);
    let y = numerics::gamma_p_inv(theta, v);
    let s = ips_radius(theta, x, y);
    if s.is_infinite() {
        return u.min(v);
    }
    // u + v - F(s) = v - [F(s) - F(x)] when the upper tail is short
    let c = if s > theta + 1.0 {
        numerics::gamma_q(theta, s) - (1.0 - u - v)
    } else {
        u + v - numerics::gamma_p(theta, s)
    };
    c.clamp(0.0, u.min(v))
}

/// (x^θ + y^θ)^{1/θ} without overflow.
fn ips_radius(theta: f64, x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 || x.is_infinite() || y.is_infinite() {
        return x.max(y);
    }
    let (m, big) = if x <= y { (x, y) } else { (y, x) };
    big * (1.0 + (m / big).powf(theta)).powf(1.0 / theta)
}

#[derive(Clone, Copy)]
enum Elliptical {
    T { rho: f64, nu: f64 },
    Normal { rho: f64 },
}

/// Student-t and Gaussian copula cdfs as a one-dimensional integral over the
/// smaller coordinate of the conditional cdf of the other one.
fn elliptical_cdf(e: Elliptical, u: f64, v: f64) -> f64 {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    if a > 0.5 {
        // radial symmetry: C(u,v) = u + v - 1 + C(1-u, 1-v)
        return a + b - 1.0 + elliptical_cdf(e, 1.0 - a, 1.0 - b);
    }
    let (xa, xb) = match e {
        Elliptical::T { nu, .. } => (numerics::t_quantile(a, nu), numerics::t_quantile(b, nu)),
        Elliptical::Normal { .. } => (numerics::normal_quantile(a), numerics::normal_quantile(b)),
    };
    if xb == f64::INFINITY {
        return a;
    }
    let scale = match e {
        Elliptical::T { .. } => xa.abs().max(1.0),
        Elliptical::Normal { .. } => 1.0 / xa.abs().max(1.0),
    };
    let integrand = |tau: f64| -> f64 {
        let one_minus = 1.0 - tau;
        let x = xa - scale * tau / one_minus;
        let jac = scale / (one_minus * one_minus);
        let (dens, cond) = match e {
            Elliptical::T { rho, nu } => {
                let k = ((nu + 1.0) / ((1.0 - rho * rho) * (nu + x * x))).sqrt();
                (
                    numerics::t_ln_pdf(x, nu).exp(),
                    numerics::t_cdf((xb - rho * x) * k, nu + 1.0),
                )
            }
            Elliptical::Normal { rho } => {
                let h = (xb - rho * x) / (1.0 - rho * rho).sqrt();
                (numerics::normal_pdf(x), numerics::normal_cdf(h))
            }
        };
        let val = dens * cond * jac;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    integrate_adaptive(integrand, 0.0, 1.0, 1e-14 * a, 1e-12).clamp(0.0, a)
}

// ---------------------------------------------------------------------------
// Sampling of the unreflected copula (IPS: of its survival copula)
// ---------------------------------------------------------------------------

fn sample_base<R: Rng + ?Sized>(f: &CopulaFamily, rng: &mut R) -> (f64, f64) {
    let unit = |rng: &mut R| -> f64 {
        loop {
            let x: f64 = rng.random();
            if x > 0.0 {
                return x;
            }
        }
    };
    match *f {
        CopulaFamily::Independence => (unit(rng), unit(rng)),
        CopulaFamily::Comonotone => {
            let u = unit(rng);
            (u, u)
        }
        CopulaFamily::Countermonotone => {
            let u = unit(rng);
            (u, 1.0 - u)
        }
        CopulaFamily::Clayton { theta } => {
            let u = unit(rng);
            let w = unit(rng);
            let v = u * ((w.powf(-theta / (1.0 + theta)) - 1.0) + u.powf(theta)).powf(-1.0 / theta);
            (u, v)
        }
        CopulaFamily::Frank { theta } => {
            let u = unit(rng);
            let w = unit(rng);
            let g = (-theta).exp_m1();
            let am1 = (-theta * u).exp_m1();
            let b = w * g / (w + (am1 + 1.0) * (1.0 - w));
            (u, -b.ln_1p() / theta)
        }
        CopulaFamily::Gumbel { delta } => {
            if delta == 1.0 {
                return (unit(rng), unit(rng));
            }
            let alpha = 1.0 / delta;
            let s = positive_stable(alpha, rng);
            let e1: f64 = Exp1.sample(rng);
            let e2: f64 = Exp1.sample(rng);
            ((-(e1 / s).powf(alpha)).exp(), (-(e2 / s).powf(alpha)).exp())
        }
        CopulaFamily::StudentT { rho, nu } => {
            let (z1, z2) = correlated_normals(rho, rng);
            let chi: f64 = ChiSquared::new(nu).expect("nu > 0").sample(rng);
            let w = (chi / nu).sqrt();
            (numerics::t_cdf(z1 / w, nu), numerics::t_cdf(z2 / w, nu))
        }
        CopulaFamily::Gaussian { rho } => {
            let (z1, z2) = correlated_normals(rho, rng);
            (numerics::normal_cdf(z1), numerics::normal_cdf(z2))
        }
        CopulaFamily::Ips { theta } => {
            // Survival IPS: dC*/du = 1 - exp(x - s), inverted in closed form.
            let u = unit(rng);
            let w = unit(rng);
            let x = numerics::gamma_p_inv(theta, u);
            let s = x - (-w).ln_1p();
            let y = if x == 0.0 {
                s
            } else {
                x * ((s / x).powf(theta) - 1.0).powf(1.0 / theta)
            };
            (u, numerics::gamma_p(theta, y))
        }
    }
}

fn correlated_normals<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> (f64, f64) {
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    (z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2)
}

/// Positive stable variable with Laplace transform exp(-t^alpha), 0 < alpha < 1
/// (Kanter's representation).
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let theta: f64 = std::f64::consts::PI * rng.random::<f64>();
    let w: f64 = Exp1.sample(rng);
    let a = (alpha * theta).sin() / theta.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * theta).sin() / w).powf((1.0 - alpha) / alpha);
    a * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_specs() -> Vec<CopulaSpec> {
        let bases = vec![
            CopulaSpec::independence(),
            CopulaSpec::comonotone(),
            CopulaSpec::countermonotone(),
            CopulaSpec::clayton(1.5).unwrap(),
            CopulaSpec::gumbel(2.0).unwrap(),
            CopulaSpec::frank(4.0).unwrap(),
            CopulaSpec::student_t(0.5, 4.0).unwrap(),
            CopulaSpec::ips(0.5).unwrap(),
            CopulaSpec::ips(2.0).unwrap(),
            CopulaSpec::gaussian(-0.3).unwrap(),
        ];
        let mut out = vec![];
        for b in bases {
            for r in [
                Reflection::None,
                Reflection::Survival,
                Reflection::Reflect1,
                Reflection::Reflect2,
            ] {
                out.push(b.reflect(r));
            }
        }
        out
    }

    #[test]
    fn clayton_examples() {
        let c = CopulaSpec::clayton(1.0).unwrap();
        assert!((c.cdf(0.5, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let c2 = c.reflect(Reflection::Reflect2);
        assert!((c2.cdf(0.5, 0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((c.conditional_cdf_given_le(1.0 / 11.0, 0.1).unwrap() - 0.5).abs() < 1e-14);
        assert!((c.v_exact(0.5, 0.1).unwrap() - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn bound_copula_levels() {
        let (q, p) = (0.5, 0.05);
        assert!((CopulaSpec::comonotone().v_exact(q, p).unwrap() - 0.025).abs() < 1e-12);
        assert!((CopulaSpec::independence().v_exact(0.3, p).unwrap() - 0.3).abs() < 1e-12);
        let w = CopulaSpec::countermonotone().v_exact(0.3, p).unwrap();
        assert!((w - (1.0 - 0.7 * p)).abs() < 1e-12);
    }

    #[test]
    fn conditional_cdf_examples() {
        let ind = CopulaSpec::independence();
        assert!((ind.conditional_cdf_given_le(0.37, 0.2).unwrap() - 0.37).abs() < 1e-15);
        let m = CopulaSpec::comonotone();
        assert!((m.conditional_cdf_given_le(0.1, 0.4).unwrap() - 0.25).abs() < 1e-15);
        assert!(ind.conditional_cdf_given_le(0.5, 0.0).is_err());
    }

    #[test]
    fn parameter_domains() {
        assert!(CopulaSpec::clayton(0.0).is_err());
        assert!(CopulaSpec::gumbel(0.9).is_err());
        assert!(CopulaSpec::frank(0.0).is_err());
        assert!(CopulaSpec::frank(36.0).is_err());
        assert!(CopulaSpec::student_t(1.0, 4.0).is_err());
        assert!(CopulaSpec::student_t(0.2, 0.0).is_err());
        assert!(CopulaSpec::ips(-1.0).is_err());
        assert!(CopulaSpec::gaussian(-1.0).is_err());
        assert!(CopulaSpec::clayton(1.0).unwrap().cdf(1.2, 0.5).is_err());
    }

    #[test]
    fn reflections_form_klein_group() {
        let all = [
            Reflection::None,
            Reflection::Survival,
            Reflection::Reflect1,
            Reflection::Reflect2,
        ];
        for a in all {
            assert_eq!(a.compose(a), Reflection::None);
            for b in all {
                assert_eq!(a.compose(b), b.compose(a));
            }
        }
        assert_eq!(
            Reflection::Reflect1.compose(Reflection::Reflect2),
            Reflection::Survival
        );
        let c = CopulaSpec::gumbel(3.0).unwrap();
        assert_eq!(
            c.reflect(Reflection::Reflect2)
                .reflect(Reflection::Reflect2),
            c
        );
    }

    #[test]
    fn independence_is_reflection_invariant() {
        for r in [
            Reflection::Survival,
            Reflection::Reflect1,
            Reflection::Reflect2,
        ] {
            let c = CopulaSpec::independence().reflect(r);
            for &(u, v) in &[(0.2, 0.7), (0.9, 0.05), (0.5, 0.5)] {
                assert!((c.cdf(u, v).unwrap() - u * v).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn reflected_frank_is_frank_with_negated_parameter() {
        let a = CopulaSpec::frank(3.0)
            .unwrap()
            .reflect(Reflection::Reflect2);
        let b = CopulaSpec::frank(-3.0).unwrap();
        for i in 1..=20 {
            for j in 1..=20 {
                let (u, v) = (i as f64 / 21.0, j as f64 / 21.0);
                assert!((a.cdf(u, v).unwrap() - b.cdf(u, v).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ips_unit_parameter_is_independence() {
        for r in [Reflection::None, Reflection::Survival] {
            let c = CopulaSpec::ips(1.0).unwrap().reflect(r);
            for &(u, v) in &[(0.1, 0.3), (0.8, 0.6), (1e-4, 0.5)] {
                let got = c.cdf(u, v).unwrap();
                assert!((got - u * v).abs() < 1e-11 * u * v, "{u} {v} {got}");
            }
        }
    }

    #[test]
    fn elliptical_cdf_reference_values() {
        // Orthant probabilities at the medians: 1/4 + asin(rho)/(2 pi).
        for rho in [-0.7, 0.0, 0.5] {
            let expect = 0.25 + f64::asin(rho) / (2.0 * std::f64::consts::PI);
            let g = CopulaSpec::gaussian(rho).unwrap().cdf(0.5, 0.5).unwrap();
            let t = CopulaSpec::student_t(rho, 3.0)
                .unwrap()
                .cdf(0.5, 0.5)
                .unwrap();
            assert!((g - expect).abs() < 1e-10, "gauss rho={rho} {g}");
            assert!((t - expect).abs() < 1e-10, "t rho={rho} {t}");
        }
    }

    #[test]
    fn student_t_cdf_matches_lower_tail_coefficient() {
        // C(u,u)/u -> 2 T_{nu+1}(-sqrt((nu+1)(1-rho)/(1+rho)))
        let (rho, nu): (f64, f64) = (0.5, 4.0);
        let lam = 2.0 * numerics::t_cdf(-((nu + 1.0) * (1.0 - rho) / (1.0 + rho)).sqrt(), nu + 1.0);
        let c = CopulaSpec::student_t(rho, nu).unwrap();
        let u = 1e-7;
        let ratio = c.cdf(u, u).unwrap() / u;
        assert!((ratio - lam).abs() < 2e-3, "{ratio} vs {lam}");
    }

    #[test]
    fn margins_and_grounding() {
        for c in all_specs() {
            for &x in &[0.0, 1e-6, 0.3, 0.999] {
                assert!((c.cdf(x, 1.0).unwrap() - x).abs() < 1e-14);
                assert!((c.cdf(1.0, x).unwrap() - x).abs() < 1e-14);
                assert_eq!(c.cdf(x, 0.0).unwrap(), 0.0);
                assert_eq!(c.cdf(0.0, x).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn frechet_levels_on_grid() {
        for i in 1..10 {
            for j in 1..10 {
                let (q, p) = (i as f64 / 10.0, j as f64 / 10.0);
                assert!((CopulaSpec::comonotone().v_exact(q, p).unwrap() - p * q).abs() < 1e-10);
                assert!((CopulaSpec::independence().v_exact(q, p).unwrap() - q).abs() < 1e-10);
                let w = CopulaSpec::countermonotone().v_exact(q, p).unwrap();
                assert!((w - (1.0 - (1.0 - q) * p)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn reflection_identity_for_levels() {
        let fams = [
            CopulaSpec::clayton(2.0).unwrap(),
            CopulaSpec::frank(-3.0).unwrap(),
            CopulaSpec::gumbel(1.7)
                .unwrap()
                .reflect(Reflection::Survival),
            CopulaSpec::ips(0.7).unwrap(),
        ];
        for c in fams {
            let c2 = c.reflect(Reflection::Reflect2);
            for &q in &[0.1, 0.5, 0.9] {
                for &p in &[0.01, 0.2, 0.7] {
                    let a = c.v_exact(q, p).unwrap();
                    let b = c2.v_exact(1.0 - q, p).unwrap();
                    assert!((a + b - 1.0).abs() < 1e-8, "{c:?} q={q} p={p}");
                }
            }
        }
    }

    #[test]
    fn clayton_levels_are_ordered_in_theta() {
        for &q in &[0.2, 0.5, 0.8] {
            for &p in &[0.001, 0.05, 0.5] {
                let mut prev = 1.0;
                for theta in [0.2, 0.5, 1.0, 2.0, 5.0] {
                    let v = CopulaSpec::clayton(theta).unwrap().v_exact(q, p).unwrap();
                    assert!(v <= prev + 1e-10);
                    assert!(v >= p * q - 1e-12 && v <= q + 1e-10);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn ips_closed_conditional_matches_finite_difference() {
        // dC*/du by central differences of the survival IPS cdf
        let theta = 2.3;
        for &(u, v) in &[(0.2, 0.4), (0.05, 0.6), (0.7, 0.1)] {
            let h = 1e-6;
            let fd = (ips_star_cdf(theta, u + h, v) - ips_star_cdf(theta, u - h, v)) / (2.0 * h);
            let x = numerics::gamma_p_inv(theta, u);
            let y = numerics::gamma_p_inv(theta, v);
            let s = (x.powf(theta) + y.powf(theta)).powf(1.0 / theta);
            let closed = 1.0 - (x - s).exp();
            assert!((fd - closed).abs() < 1e-6, "{fd} vs {closed}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_uniform() {
        for c in all_specs().into_iter().step_by(3) {
            let a = c.sample(20_000, 11);
            let b = c.sample(20_000, 11);
            assert_eq!(a, b);
            for xs in [&a.u, &a.v] {
                assert!(xs.iter().all(|x| *x > 0.0 && *x < 1.0));
                let mut s = xs.clone();
                s.sort_by(f64::total_cmp);
                let n = s.len() as f64;
                let ks = s
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
                    .fold(0.0, f64::max);
                assert!(ks < 0.015, "{c:?} ks={ks}");
            }
        }
    }

    proptest! {
        #[test]
        fn two_increasing(
            idx in 0usize..40,
            u1 in 0.001f64..0.999, du in 0.0f64..0.5,
            v1 in 0.001f64..0.999, dv in 0.0f64..0.5,
        ) {
            let c = all_specs()[idx];
            let u2 = (u1 + du).min(1.0);
            let v2 = (v1 + dv).min(1.0);
            let vol = c.cdf(u2, v2).unwrap() - c.cdf(u1, v2).unwrap() - c.cdf(u2, v1).unwrap()
                + c.cdf(u1, v1).unwrap();
            prop_assert!(vol >= -1e-9, "{:?} vol {}", c, vol);
        }

        #[test]
        fn level_inverts_conditional_cdf(idx in 0usize..40, q in 0.05f64..0.95, p in 0.001f64..0.9) {
            let c = all_specs()[idx];
            let v = c.v_exact(q, p).unwrap();
            let back = c.conditional_cdf_given_le(v, p).unwrap();
            prop_assert!(back >= q - 1e-9);
            // continuous conditional cdfs are hit exactly
            if !matches!(c.family(), CopulaFamily::Comonotone | CopulaFamily::Countermonotone) {
                prop_assert!((back - q).abs() < 1e-8, "{:?} q={} p={} back={}", c, q, p, back);
            }
        }
    }
}
