//! Gaussian process regression with a linear-regression mean function and a
//! squared-exponential correlation model.

mod basis;
mod covariance;
mod density;
mod hyper;
mod kernel;
pub mod linalg;
mod model;

pub use basis::BasisExpansion;
pub use covariance::{
    assemble_extended, build_covariance, build_regularized_covariance, cross_covariance,
    extend_covariance, factor_with_jitter, prior_variance, RegularizedFactor,
};
pub use density::gaussian_pdf;
pub use hyper::{
    fit_hyperparameters, likelihood_surface, profile_log_likelihood, LikelihoodPoint, SearchConfig,
};
pub use kernel::{Kernel, DEFAULT_JITTER, MAX_JITTER};
pub use linalg::{Cholesky, Matrix};
pub use model::{
    fit, Diagnostics, GprModel, ModelDocument, PosteriorTerms, Prediction, TrainingSet,
    MODEL_FORMAT, MODEL_VERSION,
};
