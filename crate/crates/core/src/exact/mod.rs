//! Reference values: the variance integral, the variance of the
//! non-Gaussian limit in `d ≥ 3`, the asymptotic constants `V_W`, the
//! increment variance profile and the logarithmic time change.

mod constants;
mod integrals;
pub mod qmc;

pub use constants::{increment_variance_profile, tau, v_w_empirical, v_w_isotropic, VwEstimate};
pub use integrals::{l1_shell, variance_exact, xi_variance, ExactValue, IntegratorConfig};

use thiserror::Error;

use crate::functionals::FunctionalError;
use crate::measures::MeasureError;
use crate::mnw::MnwError;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("time must be finite and non-negative, got {0}")]
    NegativeTime(f64),
    #[error("Ξ is defined for d > 2 only; in the plane the limit integral diverges (got d = {0})")]
    XiNeedsDimension3(usize),
    #[error("the variance integral diverges at 0: need 0 < s0 <= t, got s0 = {s0}, t = {t}")]
    DivergesAtZero { s0: f64, t: f64 },
    #[error("the time change needs R > e, got {0}")]
    SmallR(f64),
    #[error("s must lie in [0, 1], got {0}")]
    BadS(f64),
    #[error("no hyperplane met a section cell")]
    ZeroSections,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Mnw(#[from] MnwError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}
