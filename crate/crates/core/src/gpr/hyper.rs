//! Grid-search selection of the kernel hyperparameters by maximum marginal
//! likelihood, with the process variance profiled out in closed form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::BasisExpansion;
use super::covariance::factor_with_jitter;
use super::kernel::{Kernel, DEFAULT_JITTER};
use super::linalg::Cholesky;
use super::model::TrainingSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Logarithmic grid of correlation lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SearchConfig<T> {
    pub theta_min: T,
    pub theta_max: T,
    /// Grid points per dimension, endpoints included.
    pub steps: usize,
    /// Search each input dimension independently (cartesian grid) instead of
    /// one shared θ.
    pub per_dimension: bool,
    pub jitter: T,
}

impl<T: Scalar> SearchConfig<T> {
    pub fn new(theta_min: T, theta_max: T, steps: usize) -> Self {
        SearchConfig {
            theta_min,
            theta_max,
            steps,
            per_dimension: false,
            jitter: T::lit(DEFAULT_JITTER),
        }
    }

    /// A one-cell grid at `theta`.
    pub fn fixed(theta: T) -> Self {
        SearchConfig::new(theta, theta, 1)
    }

    pub fn with_jitter(mut self, jitter: T) -> Self {
        self.jitter = jitter;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("hyperparameter grid is empty"));
        }
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.theta_min) || !positive(self.theta_max) {
            return Err(Error::config("theta grid bounds must be positive"));
        }
        if self.theta_min > self.theta_max || (self.steps > 1 && self.theta_min == self.theta_max) {
            return Err(Error::config("theta grid needs lower < upper"));
        }
        if !(self.jitter >= T::zero() && self.jitter.is_finite()) {
            return Err(Error::config("jitter must be non-negative"));
        }
        Ok(())
    }

    /// Grid values for one dimension, ascending.
    pub fn axis(&self) -> Result<Vec<T>> {
        self.validate()?;
        if self.steps == 1 {
            return Ok(vec![self.theta_min]);
        }
        let lo = self.theta_min.ln();
        let span = self.theta_max.ln() - lo;
        let last = T::from_count(self.steps - 1);
        Ok((0..self.steps)
            .map(|i| {
                if i == 0 {
                    self.theta_min
                } else if i == self.steps - 1 {
                    self.theta_max
                } else {
                    (lo + span * T::from_count(i) / last).exp()
                }
            })
            .collect())
    }

    /// Ratio between neighbouring grid values (1 for a single cell).
    pub fn step_ratio(&self) -> T {
        if self.steps <= 1 {
            return T::one();
        }
        ((self.theta_max.ln() - self.theta_min.ln()) / T::from_count(self.steps - 1)).exp()
    }

    /// Every θ vector to try for `dim` inputs, in lexicographically ascending order.
    pub fn candidates(&self, dim: usize) -> Result<Vec<Vec<T>>> {
        let axis = self.axis()?;
        if !self.per_dimension {
            return Ok(axis.iter().map(|&t| vec![t; dim]).collect());
        }
        let mut out: Vec<Vec<T>> = vec![Vec::new()];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&t| {
                        let mut v = prefix.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

/// Concentrated log marginal likelihood at one θ.
#[derive(Clone, Debug, PartialEq)]
pub struct LikelihoodPoint<T> {
    pub theta: Vec<T>,
    /// Closed-form estimate `rᵀR⁻¹r / N`, floored to stay positive.
    pub sigma_sq: T,
    pub log_likelihood: T,
    /// Nugget that made the correlation matrix factor.
    pub jitter: T,
}

/// Log marginal likelihood of the targets with σ² replaced by its maximizer.
///
/// With `R` the (regularized) correlation matrix and `r` the GLS residual,
/// `σ̂² = rᵀR⁻¹r / N` and
/// `ln L = -½ (rᵀR⁻¹r/σ̂² + N ln σ̂² + ln|R| + N ln 2π)`.
pub fn profile_log_likelihood<T: Scalar>(
    training: &TrainingSet<T>,
    basis: BasisExpansion,
    theta: &[T],
    jitter: T,
) -> Result<LikelihoodPoint<T>> {
    let n = training.len();
    let p = basis.len(training.dim());
    if p > n {
        return Err(Error::fit(format!(
            "{p} basis functions need at least {p} observations, got {n}"
        )));
    }
    let unit = Kernel::new(T::one(), theta.to_vec(), jitter)?;
    let factor = factor_with_jitter(training.inputs(), &unit)?;
    let chol = factor.cholesky;

    let design = basis.design_matrix(training.inputs());
    let wf = chol.solve_lower_columns(&design);
    let wt = chol.solve_lower(training.targets());
    let gram = super::linalg::Matrix::from_fn(p, p, |i, j| {
        (0..n).map(|r| wf[(r, i)] * wf[(r, j)]).sum()
    });
    let gls = Cholesky::new(&gram, T::epsilon().sqrt())
        .ok_or_else(|| Error::fit("generalized least-squares system FᵀC⁻¹F is singular"))?;
    let rhs: Vec<T> = (0..p).map(|c| (0..n).map(|r| wf[(r, c)] * wt[r]).sum()).collect();
    let beta = gls.solve(&rhs);

    // whitened residual L⁻¹(t − Fβ) = L⁻¹t − (L⁻¹F)β
    let quad: T = (0..n)
        .map(|r| {
            let fitted: T = (0..p).map(|c| wf[(r, c)] * beta[c]).sum();
            let e = wt[r] - fitted;
            e * e
        })
        .sum();
    let nf = T::from_count(n);
    let sigma_sq = (quad / nf).max(variance_floor(training.targets()));
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let half = T::lit(0.5);
    let log_likelihood =
        -half * (quad / sigma_sq + nf * sigma_sq.ln() + chol.log_det() + nf * two_pi.ln());
    Ok(LikelihoodPoint {
        theta: theta.to_vec(),
        sigma_sq,
        log_likelihood,
        jitter: factor.jitter,
    })
}

/// Smallest admissible σ² for these targets.
fn variance_floor<T: Scalar>(targets: &[T]) -> T {
    let mean_sq = targets.iter().map(|&t| t * t).sum::<T>() / T::from_count(targets.len());
    T::epsilon() * mean_sq.max(T::one())
}

/// Likelihood at every grid cell, in grid order. Cells whose covariance cannot
/// be factored are returned as `None`.
pub fn likelihood_surface<T: Scalar>(
    training: &TrainingSet<T>,
    basis: BasisExpansion,
    search: &SearchConfig<T>,
) -> Result<Vec<Option<LikelihoodPoint<T>>>> {
    let candidates = search.candidates(training.dim())?;
    Ok(candidates
        .par_iter()
        .map(|theta| match profile_log_likelihood(training, basis, theta, search.jitter) {
            Ok(point) if point.log_likelihood.is_finite() => Some(point),
            Ok(_) => None,
            Err(e) => {
                log::debug!("grid cell {theta:?} skipped: {e}");
                None
            }
        })
        .collect())
}

/// Returns the grid kernel with the largest profile likelihood. Ties go to the
/// lexicographically smallest θ; σ² is unique per θ.
pub fn fit_hyperparameters<T: Scalar>(
    training: &TrainingSet<T>,
    basis: BasisExpansion,
    search: &SearchConfig<T>,
) -> Result<Kernel<T>> {
    let surface = likelihood_surface(training, basis, search)?;
    let mut best: Option<&LikelihoodPoint<T>> = None;
    for point in surface.iter().flatten() {
        if best.is_none_or(|b| point.log_likelihood > b.log_likelihood) {
            best = Some(point);
        }
    }
    let best = best.ok_or_else(|| Error::fit("no grid cell produced a factorable covariance"))?;
    Kernel::new(best.sigma_sq, best.theta.clone(), search.jitter)
}
