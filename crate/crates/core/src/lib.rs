//! Copula-based extreme-value inference for CoVaR and ΔCoVaR.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: special functions, monotone root finding, quadrature and a
//!   bounded Nelder–Mead minimizer.
//! - [`copula`]: exact bivariate copulas, reflections, the conditional cdf
//!   given `{U <= p}` and the copula-adjusted level `v(q|p; C)`.
//! - [`tail`]: tail dependence functions, boundary conditional cdfs, the
//!   closed-form catalogue of asymptotic levels and the ΔCoVaR limit calculator.
//! - [`empirical`]: rank-based estimators of the tail functionals.
//! - [`mde`]: regime classification and minimum-distance fitting.
//! - [`marginal`]: AR(1)-GARCH(1,1) filtering with Hansen skew-t innovations.
//! - [`pipeline`]: CoVaR/ΔCoVaR assembly, rolling windows and simulation studies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod copula;
pub mod empirical;
mod error;
pub mod marginal;
pub mod mde;
pub mod numerics;
pub mod pipeline;
pub mod seed;
pub mod tail;

pub use copula::{CopulaFamily, CopulaSpec, Reflection, UniformPairSample};
pub use empirical::{PseudoSample, TailCoefficients};
pub use error::{Error, Result};
pub use marginal::{ArGarchParams, MarginalFit, SkewT};
pub use mde::{MdeFit, VHat};
pub use pipeline::{CoVaRReport, SimStudyResult};
pub use tail::{LimitInputs, Regime, TailFamily, TailModel};
