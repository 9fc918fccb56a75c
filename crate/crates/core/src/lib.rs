//! Component-wise gradient boosting for joint models of longitudinal and
//! time-to-event data.
//!
//! The model couples a Gaussian longitudinal submodel
//!
//! ```text
//! y_ij = η_l(x_l,ij) + η_ls(x_ls,i, t_ij) + ε_ij,     ε_ij ~ N(0, σ²)
//! ```
//!
//! with a proportional-hazards survival submodel with constant baseline hazard
//!
//! ```text
//! λ_i(t) = λ₀ exp(η_s(x_s,i) + α η_ls(x_ls,i, t))
//! ```
//!
//! where the shared predictor `η_ls = γ0_i + β_lsᵀx + (β_t + γ1_i) t` carries
//! individual random effects and a linear time trend. Each of the three
//! predictors is boosted with its own stopping iteration and step length; the
//! nuisance parameters α, λ₀ and σ² are refreshed once per iteration.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! command-line tool and parallel grid evaluation live in the `jointboost`
//! companion crate.
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselearners;
pub mod boosting;
pub mod data;
pub mod likelihood;
pub mod optimize;
pub mod simulation;
pub mod tuning;

pub use baselearners::{BaseLearnerFit, Increment, LearnerId};
pub use boosting::{boost_fit, initialize, BoostError, BoostingConfig, FitResult, SharedGradient};
pub use data::{
    compute_predictors, validate, Covariates, JointData, LongitudinalDataset, ParameterState,
    PredictorValues, SurvivalDataset, ValidationError, Violation,
};
pub use likelihood::{joint_loglik, GradientVectors};
pub use simulation::{simulate, SimulatedData, SimulatedTruth, SimulationConfig, TrueParameters};
pub use tuning::{grid_search, Grid, TuningResult};

/// Lower bound applied to λ₀ and σ² wherever they are estimated.
pub const PARAMETER_FLOOR: f64 = 1e-8;

/// Threshold on `|α·slope|` below which closed forms switch to their analytic
/// limit.
pub const SLOPE_LIMIT_EPS: f64 = 1e-10;
