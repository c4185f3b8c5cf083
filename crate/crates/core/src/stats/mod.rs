//! Mergeable sample moments and the hypothesis tests used by the
//! experiments. All tests are deterministic functions of their inputs.

mod hypothesis;
mod moments;

pub use hypothesis::{
    bonferroni, kolmogorov_sf, ks_normal, ks_two_sample, normal_cdf, normal_sf, process_covariance_check,
    upper_tail_excess, CovarianceCheck, KsResult, TailResult, COVARIANCE_MIN_TRAJECTORIES, KS_MIN_SAMPLES,
    TAIL_MIN_SAMPLES,
};
pub use moments::{variance_stderr, MomentAccumulator, Summary};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("insufficient count: need at least {needed}, got {found}")]
    InsufficientCount { needed: usize, found: usize },
    #[error("degenerate variance")]
    DegenerateVariance,
    #[error("samples contain NaN")]
    NonFinite,
    #[error("grid mismatch between trajectories and times")]
    GridMismatch,
    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),
}
