//! Numerical substrate: special functions, monotone root finding, quadrature
//! and a bounded derivative-free minimizer.

mod optimize;
mod quadrature;
mod roots;
mod special;

pub use optimize::{
    minimize_derivative_free, minimize_with_options, BoxConstraint, MinimizeOptions, Minimum,
};
pub use quadrature::{integrate_adaptive, integrate_unit_interval, midpoints, DEFAULT_PANELS};
pub use roots::find_root_monotone;
pub use special::{
    ln_gamma, normal_cdf, normal_pdf, normal_quantile, reg_incomplete_beta, reg_incomplete_gamma,
    reg_incomplete_gamma_inv, reg_incomplete_gamma_upper, student_t_cdf, student_t_pdf,
    student_t_quantile,
};

pub(crate) use special::{gamma_p, gamma_p_inv, gamma_q, gamma_q_inv, t_cdf, t_ln_pdf, t_quantile};
