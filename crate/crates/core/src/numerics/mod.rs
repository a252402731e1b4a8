//! Special functions, distributions and quadrature used by the evidence engine.

mod dist;
mod quadrature;
mod special;

pub use dist::{
    cauchy_pdf, central_t_pdf, ln_central_t_pdf, noncentral_t_pdf, student_t_cdf,
    student_t_quantile, student_t_upper_quantile, NoncentralT,
};
pub use quadrature::{
    integrate, integrate_with, Interval, QuadratureOptions, QuadratureResult,
    DEFAULT_MAX_EVALUATIONS,
};
pub use special::{ln_gamma, reg_inc_beta};



pub(crate) use dist::cauchy_pdf_unchecked;
