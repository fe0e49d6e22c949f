//! Cross-validated model quality on a panel: correlation rate, RMSE, and RAE,
//! in either prediction direction.

mod loocv;
mod metrics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use loocv::{in_sample, leave_one_out, select_and_cross_validate};
pub use metrics::{correlation_rate, rae, rmse, FoldPair};

use crate::data::{PanelDataset, PanelSummary};
use crate::error::{Error, Result};
use crate::gpr::{fit_hyperparameters, BasisExpansion, Kernel, SearchConfig, TrainingSet};
use crate::scalar::Scalar;

/// Which panel column is the input and which is the target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Predict the unemployment rate from the site score.
    #[default]
    ScoreToRate,
    /// Predict the site score from the unemployment rate.
    RateToScore,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::ScoreToRate => Direction::RateToScore,
            Direction::RateToScore => Direction::ScoreToRate,
        }
    }

    /// `(inputs, targets)` columns of the panel.
    pub fn columns(self, panel: &PanelDataset) -> (Vec<f64>, Vec<f64>) {
        match self {
            Direction::ScoreToRate => (panel.scores(), panel.rates()),
            Direction::RateToScore => (panel.rates(), panel.scores()),
        }
    }

    pub fn training_set(self, panel: &PanelDataset) -> Result<TrainingSet<f64>> {
        let (x, t) = self.columns(panel);
        TrainingSet::from_columns(&x, &t)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::ScoreToRate => "score-to-rate",
            Direction::RateToScore => "rate-to-score",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "score-to-rate" | "score_to_rate" => Ok(Direction::ScoreToRate),
            "rate-to-score" | "rate_to_score" => Ok(Direction::RateToScore),
            other => Err(Error::config(format!("unknown direction {other:?}"))),
        }
    }
}

/// How the predictions behind the metrics are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validation {
    #[default]
    LeaveOneOut,
    InSample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EvaluationReport<T> {
    pub direction: Direction,
    pub validation: Validation,
    pub basis: BasisExpansion,
    pub n: usize,
    pub correlation_rate: T,
    pub rmse: T,
    pub rae: T,
    pub kernel: Kernel<T>,
    pub per_fold: Vec<FoldPair<T>>,
}

impl<T: Scalar> EvaluationReport<T> {
    fn from_pairs(
        direction: Direction,
        validation: Validation,
        basis: BasisExpansion,
        kernel: Kernel<T>,
        per_fold: Vec<FoldPair<T>>,
    ) -> Result<Self> {
        Ok(EvaluationReport {
            direction,
            validation,
            basis,
            n: per_fold.len(),
            correlation_rate: correlation_rate(&per_fold)?,
            rmse: rmse(&per_fold)?,
            rae: rae(&per_fold)?,
            kernel,
            per_fold,
        })
    }

    pub fn metric_rows(&self) -> Vec<(&'static str, String)> {
        let theta: Vec<String> = self.kernel.theta().iter().map(T::to_string).collect();
        vec![
            ("Direction", self.direction.to_string()),
            (
                "Validation",
                match self.validation {
                    Validation::LeaveOneOut => "leave-one-out".to_string(),
                    Validation::InSample => "in-sample".to_string(),
                },
            ),
            ("Observations", self.n.to_string()),
            ("Correlation length theta", theta.join(" ")),
            ("Process variance sigma^2", self.kernel.sigma_sq().to_string()),
            ("Correlation Rate", self.correlation_rate.to_string()),
            ("RMSE", self.rmse.to_string()),
            ("RAE", self.rae.to_string()),
        ]
    }
}

/// Evaluation on an arbitrary training set. Hyperparameters are chosen once on
/// the full set and held fixed across folds.
pub fn evaluate_training<T: Scalar>(
    training: &TrainingSet<T>,
    direction: Direction,
    basis: BasisExpansion,
    search: &SearchConfig<T>,
    validation: Validation,
) -> Result<EvaluationReport<T>> {
    if training.len() < 3 {
        return Err(Error::domain(format!(
            "evaluation needs at least 3 rows, got {}",
            training.len()
        )));
    }
    let kernel = fit_hyperparameters(training, basis, search)?;
    let pairs = match validation {
        Validation::LeaveOneOut => leave_one_out(training, basis, &kernel)?,
        Validation::InSample => in_sample(training, basis, &kernel)?,
    };
    EvaluationReport::from_pairs(direction, validation, basis, kernel, pairs)
}

/// Leave-one-out `(actual, predicted)` pairs for the panel, in panel order.
pub fn loocv_predictions(
    panel: &PanelDataset,
    direction: Direction,
    basis: BasisExpansion,
    search: &SearchConfig<f64>,
) -> Result<Vec<FoldPair<f64>>> {
    if panel.len() < 3 {
        return Err(Error::domain(format!("panel needs at least 3 rows, got {}", panel.len())));
    }
    let training = direction.training_set(panel)?;
    Ok(select_and_cross_validate(&training, basis, search)?.1)
}

/// Leave-one-out evaluation of the panel.
pub fn evaluate(
    panel: &PanelDataset,
    direction: Direction,
    basis: BasisExpansion,
    search: &SearchConfig<f64>,
) -> Result<EvaluationReport<f64>> {
    evaluate_with(panel, direction, basis, search, Validation::LeaveOneOut)
}

pub fn evaluate_with(
    panel: &PanelDataset,
    direction: Direction,
    basis: BasisExpansion,
    search: &SearchConfig<f64>,
    validation: Validation,
) -> Result<EvaluationReport<f64>> {
    if panel.len() < 3 {
        return Err(Error::domain(format!("panel needs at least 3 rows, got {}", panel.len())));
    }
    let training = direction.training_set(panel)?;
    evaluate_training(&training, direction, basis, search, validation)
}

/// Plain-text report: dataset properties followed by the model metrics.
pub fn render_table<T: Scalar>(summary: Option<&PanelSummary>, report: &EvaluationReport<T>) -> String {
    let mut rows = summary.map(PanelSummary::table_rows).unwrap_or_default();
    rows.extend(report.metric_rows());
    let mut out = format!("{:<48}{}\n", "Property", "Value");
    for (label, value) in rows {
        out.push_str(&format!("{label:<48}{value}\n"));
    }
    out
}
