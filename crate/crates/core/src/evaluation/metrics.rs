//! Error metrics over `(actual, predicted)` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FoldPair<T> {
    pub actual: T,
    pub predicted: T,
}

impl<T: Scalar> FoldPair<T> {
    pub fn new(actual: T, predicted: T) -> Self {
        FoldPair { actual, predicted }
    }

    pub fn residual(&self) -> T {
        self.predicted - self.actual
    }
}

fn mean<T: Scalar>(values: impl Iterator<Item = T>, n: usize) -> T {
    values.sum::<T>() / T::from_count(n)
}

/// Pearson correlation between actual and predicted values.
pub fn correlation_rate<T: Scalar>(pairs: &[FoldPair<T>]) -> Result<T> {
    if pairs.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len();
    let ma = mean(pairs.iter().map(|p| p.actual), n);
    let mp = mean(pairs.iter().map(|p| p.predicted), n);
    let (mut sab, mut saa, mut spp) = (T::zero(), T::zero(), T::zero());
    for p in pairs {
        let da = p.actual - ma;
        let dp = p.predicted - mp;
        sab += da * dp;
        saa += da * da;
        spp += dp * dp;
    }
    if saa <= T::zero() || spp <= T::zero() {
        let which = if saa <= T::zero() { "actual" } else { "predicted" };
        return Err(Error::UndefinedCorrelation(format!("{which} values have zero variance")));
    }
    let r = sab / (saa * spp).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Root mean squared error.
pub fn rmse<T: Scalar>(pairs: &[FoldPair<T>]) -> Result<T> {
    if pairs.is_empty() {
        return Err(Error::domain("rmse of no pairs"));
    }
    let mse = mean(pairs.iter().map(|p| p.residual() * p.residual()), pairs.len());
    Ok(mse.sqrt())
}

/// Relative absolute error: `Σ|predicted − actual| / Σ|actual − mean(actual)|`.
/// 1 means no better than always predicting the mean.
pub fn rae<T: Scalar>(pairs: &[FoldPair<T>]) -> Result<T> {
    if pairs.len() < 2 {
        return Err(Error::domain(format!("rae needs at least 2 pairs, got {}", pairs.len())));
    }
    let ma = mean(pairs.iter().map(|p| p.actual), pairs.len());
    let denom: T = pairs.iter().map(|p| (p.actual - ma).abs()).sum();
    if denom <= T::zero() {
        return Err(Error::domain("rae undefined: all actual values are equal"));
    }
    let numer: T = pairs.iter().map(|p| p.residual().abs()).sum();
    Ok(numer / denom)
}
