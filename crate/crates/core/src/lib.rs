//! Nowcasting unemployment from employment-website traffic.
//!
//! The crate turns per-site signal files and country unemployment tables into a
//! two-column panel ([`data`]), fits a Gaussian process regression with a
//! linear-regression mean function ([`gpr`]), and scores it with
//! leave-one-out correlation, RMSE, and RAE ([`evaluation`]).
//!
//! The regression core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the file-based pipeline uses.

pub mod data;
pub mod error;
pub mod evaluation;
pub mod gpr;
pub mod pipeline;
mod scalar;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Kernel = gpr::Kernel<f64>;
pub type TrainingSet = gpr::TrainingSet<f64>;
pub type GprModel = gpr::GprModel<f64>;
pub type Prediction = gpr::Prediction<f64>;
pub type SearchConfig = gpr::SearchConfig<f64>;
pub type EvaluationReport = evaluation::EvaluationReport<f64>;

pub type KernelF32 = gpr::Kernel<f32>;
pub type GprModelF32 = gpr::GprModel<f32>;
