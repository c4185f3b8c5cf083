//! Simulation and verification of STIT tessellations through the
//! Mecke-Nagel-Weiss cell-division construction.

pub mod exact;
pub mod functionals;
pub mod geometry;
pub mod harness;
pub mod measures;
pub mod mnw;
pub mod rng;
pub mod stats;

pub use exact::{ExactError, ExactValue, IntegratorConfig};
pub use functionals::{sigma_phi, sigma_phi_at, FaceFunctional, FunctionalError, Zeta};
pub use geometry::{ConvexPolytope, GeometryError, Hyperplane};
pub use harness::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult, HarnessError};
pub use measures::{HyperplaneMeasureSpec, MeasureError, MeasureKind};
pub use mnw::{run_mnw, MaxPolytopeRecord, MnwError, Tessellation};
pub use stats::{MomentAccumulator, StatsError, Summary};
