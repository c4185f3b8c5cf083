//! Config-driven experiments, result persistence, rendering and the
//! geometry property suite.

mod config;
mod experiments;
mod properties;
mod render;
mod result;

pub use config::{Centring, ExperimentConfig, ExperimentKind, MeasureConfig, TimeConfig, WindowConfig};
pub use properties::{
    geometry_property_suite, PropertyOutcome, CAPACITY_TOLERANCE, PARTITION_TOLERANCE, SECTION_TOLERANCE,
    SPLIT_TOLERANCE,
};
pub use render::{
    count_obj_facets, count_svg_polygons, parse_svg_segments, render, render_obj, render_svg, RenderFormat,
};
pub use result::{
    read_samples, ExperimentResult, LabeledSummary, Provenance, Reference, SampleTable, TestOutcome, SCHEMA_VERSION,
};

use std::time::Instant;

use thiserror::Error;

use crate::exact::ExactError;
use crate::functionals::FunctionalError;
use crate::geometry::GeometryError;
use crate::measures::MeasureError;
use crate::mnw::MnwError;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Mnw(#[from] MnwError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Runs an experiment on a dedicated pool of `workers` threads (the global
/// pool when `None`). The result does not depend on the worker count.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentResult, HarnessError> {
    let start = Instant::now();
    let mut result = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?
            .install(|| experiments::run(config))?,
        None => experiments::run(config)?,
    };
    result.elapsed = start.elapsed();
    Ok(result)
}
