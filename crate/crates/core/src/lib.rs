//! ROC curve estimation: empirical, parametric (biexponential/binormal) and
//! semiparametric (placement-value GLM) estimators with bootstrap or
//! closed-form pointwise confidence bands, AUC summaries, weak- and
//! strong-null tests, and a Monte-Carlo harness for coverage studies.
//!
//! All estimators are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

pub mod bootstrap;
pub mod empirical;
pub mod error;
pub mod model;
pub mod numerics;
pub mod parametric;
pub mod semiparametric;
pub mod simulation;
mod scalar;

pub use error::{Result, RocError};
pub use scalar::Scalar;

/// `f64` instantiations of the generic types.
pub type Sample = model::TwoGroupSample<f64>;
pub type Curve = model::RocCurveEstimate<f64>;
pub type Point = model::RocPoint<f64>;
pub type Outcome = model::TestResult<f64>;
pub type Config = bootstrap::BandConfig<f64>;
pub type Design = semiparametric::PairwiseDesign<f64>;
pub type Fit = semiparametric::SemiFit<f64>;
pub type Inference = semiparametric::SemiInference<f64>;
pub type Mechanism = simulation::Dgm<f64>;
pub type Scenario = simulation::Scenario<f64>;
pub type Report = simulation::ScenarioReport<f64>;
