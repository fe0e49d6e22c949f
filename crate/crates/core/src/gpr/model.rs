use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::basis::BasisExpansion;
use super::covariance::{cross_covariance, factor_with_jitter, prior_variance};
use super::kernel::Kernel;
use super::linalg::{dot, Cholesky, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Training inputs (one row per observation) and their targets.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet<T> {
    inputs: Matrix<T>,
    targets: Vec<T>,
}

impl<T: Scalar> TrainingSet<T> {
    pub fn new(inputs: Matrix<T>, targets: Vec<T>) -> Result<Self> {
        if inputs.nrows() == 0 || inputs.ncols() == 0 {
            return Err(Error::domain("training set needs at least one row and one column"));
        }
        if inputs.nrows() != targets.len() {
            return Err(Error::Shape {
                expected: inputs.nrows(),
                actual: targets.len(),
            });
        }
        if inputs.as_slice().iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::domain("training set contains missing or non-finite values"));
        }
        Ok(TrainingSet { inputs, targets })
    }

    /// One-dimensional inputs.
    pub fn from_columns(x: &[T], t: &[T]) -> Result<Self> {
        TrainingSet::new(Matrix::column(x), t.to_vec())
    }

    pub fn inputs(&self) -> &Matrix<T> {
        &self.inputs
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.ncols()
    }

    /// Copy with observation `i` held out. Errors if it would leave nothing.
    pub fn without(&self, i: usize) -> Result<Self> {
        if self.len() < 2 || i >= self.len() {
            return Err(Error::domain("cannot hold out the only observation"));
        }
        let mut targets = self.targets.clone();
        targets.remove(i);
        Ok(TrainingSet {
            inputs: self.inputs.without_row(i),
            targets,
        })
    }
}

/// Posterior mean and variance at a single point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction<T> {
    pub mean: T,
    pub variance: T,
}

/// Posterior decomposition: variance = `prior − explained + basis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorTerms<T> {
    pub mean: T,
    /// κ = σ²
    pub prior: T,
    /// kᵀC⁻¹k
    pub explained: T,
    /// uᵀ(FᵀC⁻¹F)⁻¹u
    pub basis: T,
}

impl<T: Scalar> PosteriorTerms<T> {
    pub fn unclamped_variance(&self) -> T {
        self.prior - self.explained + self.basis
    }
}

/// Numerical events recorded while fitting and predicting.
#[derive(Debug, Default)]
pub struct Diagnostics {
    /// How many times the nugget was multiplied by 10 before `C_N` factored.
    pub jitter_escalations: usize,
    clamped_variances: AtomicUsize,
}

impl Diagnostics {
    /// Number of predictions whose variance came out slightly negative and was set to 0.
    pub fn clamped_variances(&self) -> usize {
        self.clamped_variances.load(Ordering::Relaxed)
    }
}

/// A fitted regression model: `y(x) = F(x)·B + Z(x)` conditioned on the training set.
///
/// Immutable after [`fit`]; share freely across threads.
#[derive(Debug)]
pub struct GprModel<T> {
    training: TrainingSet<T>,
    kernel: Kernel<T>,
    basis: BasisExpansion,
    beta: Vec<T>,
    // Everything below is for the unit-variance correlation matrix
    // R = C_N/σ²; the posterior mean does not depend on σ², and keeping it out
    // of the factorization makes predictions exactly equivariant in the targets'
    // scale whenever θ is.
    chol: Cholesky<T>,
    unit: Kernel<T>,
    // R⁻¹(t − Fβ) = σ²α
    weights: Vec<T>,
    // L⁻¹F and the factor of FᵀR⁻¹F, reused by every prediction.
    whitened_design: Matrix<T>,
    gls: Cholesky<T>,
    diagnostics: Diagnostics,
}

/// Fits the mean-function coefficients by generalized least squares and
/// precomputes everything `predict` needs.
pub fn fit<T: Scalar>(
    training: TrainingSet<T>,
    basis: BasisExpansion,
    kernel: Kernel<T>,
) -> Result<GprModel<T>> {
    if kernel.dim() != training.dim() {
        return Err(Error::Shape {
            expected: kernel.dim(),
            actual: training.dim(),
        });
    }
    let n = training.len();
    let p = basis.len(training.dim());
    if p > n {
        return Err(Error::fit(format!(
            "{p} basis functions need at least {p} observations, got {n}"
        )));
    }

    let unit = kernel.with_sigma_sq(T::one())?;
    let factor = factor_with_jitter(training.inputs(), &unit)?;
    let kernel = kernel.with_jitter(factor.jitter)?;
    let unit = unit.with_jitter(factor.jitter)?;
    let chol = factor.cholesky;

    let design = basis.design_matrix(training.inputs());
    let whitened_design = chol.solve_lower_columns(&design);
    let whitened_targets = chol.solve_lower(training.targets());
    let gls_matrix = gram(&whitened_design);
    let gls = Cholesky::new(&gls_matrix, T::epsilon().sqrt()).ok_or_else(|| {
        Error::fit("generalized least-squares system FᵀC⁻¹F is singular".to_string())
    })?;
    let rhs: Vec<T> = (0..p)
        .map(|c| (0..n).map(|r| whitened_design[(r, c)] * whitened_targets[r]).sum())
        .collect();
    let beta = gls.solve(&rhs);

    let residuals: Vec<T> = training
        .inputs()
        .rows()
        .zip(training.targets())
        .map(|(x, &t)| t - dot(&basis.evaluate(x), &beta))
        .collect();
    let weights = chol.solve(&residuals);
    debug_assert_eq!(unit.sigma_sq(), T::one());

    Ok(GprModel {
        training,
        kernel,
        basis,
        beta,
        chol,
        unit,
        weights,
        whitened_design,
        gls,
        diagnostics: Diagnostics {
            jitter_escalations: factor.escalations,
            clamped_variances: AtomicUsize::new(0),
        },
    })
}

/// `AᵀA`
fn gram<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let p = a.ncols();
    Matrix::from_fn(p, p, |i, j| (0..a.nrows()).map(|r| a[(r, i)] * a[(r, j)]).sum())
}

impl<T: Scalar> GprModel<T> {
    pub fn training(&self) -> &TrainingSet<T> {
        &self.training
    }

    /// Kernel with the nugget actually used after any escalation.
    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn basis(&self) -> BasisExpansion {
        self.basis
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// Factor of the regularized covariance `C_N + jitter·σ²·I`.
    pub fn cholesky(&self) -> Cholesky<T> {
        self.chol.scaled(self.kernel.sigma_sq())
    }

    /// `α = C_N⁻¹(t − Fβ)`.
    pub fn alpha(&self) -> Vec<T> {
        let s = self.kernel.sigma_sq();
        self.weights.iter().map(|&w| w / s).collect()
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Posterior at `x_new`:
    /// mean `F(x)·B + kᵀα`, variance `κ − kᵀC⁻¹k + uᵀ(FᵀC⁻¹F)⁻¹u` with
    /// `u = F(x) − FᵀC⁻¹k`.
    pub fn predict(&self, x_new: &[T]) -> Result<Prediction<T>> {
        let terms = self.posterior_terms(x_new)?;
        let mut variance = terms.unclamped_variance();
        if variance < T::zero() {
            self.diagnostics.clamped_variances.fetch_add(1, Ordering::Relaxed);
            variance = T::zero();
        }
        Ok(Prediction {
            mean: terms.mean,
            variance,
        })
    }

    /// The separate pieces of the posterior variance at `x_new`.
    pub fn posterior_terms(&self, x_new: &[T]) -> Result<PosteriorTerms<T>> {
        // with r = k/σ²: kᵀα = rᵀR⁻¹(t − Fβ), and both variance terms carry σ²
        let r = cross_covariance(self.training.inputs(), x_new, &self.unit)?;
        let f_new = self.basis.evaluate(x_new);
        let mean = dot(&f_new, &self.beta) + dot(&r, &self.weights);

        let sigma_sq = self.kernel.sigma_sq();
        let v = self.chol.solve_lower(&r);
        let explained = sigma_sq * dot(&v, &v);
        let u: Vec<T> = f_new
            .iter()
            .enumerate()
            .map(|(c, &f)| {
                let projected: T = (0..v.len()).map(|r| self.whitened_design[(r, c)] * v[r]).sum();
                f - projected
            })
            .collect();
        let w = self.gls.solve_lower(&u);
        Ok(PosteriorTerms {
            mean,
            prior: prior_variance(&self.kernel),
            explained,
            basis: sigma_sq * dot(&w, &w),
        })
    }

    pub fn to_document(&self) -> ModelDocument<T> {
        ModelDocument {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            kernel: self.kernel.clone(),
            basis: self.basis,
            beta: self.beta.clone(),
            inputs: self.training.inputs().rows().map(<[T]>::to_vec).collect(),
            targets: self.training.targets().to_vec(),
        }
    }

    /// Rebuilds a model from its serialized form by refitting on the stored data
    /// with the stored (effective) kernel.
    pub fn from_document(doc: ModelDocument<T>) -> Result<Self> {
        if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
            return Err(Error::config(format!(
                "unsupported model document {} v{}",
                doc.format, doc.version
            )));
        }
        let inputs = Matrix::from_rows(&doc.inputs)
            .ok_or_else(|| Error::config("ragged input rows in model document"))?;
        let model = fit(TrainingSet::new(inputs, doc.targets)?, doc.basis, doc.kernel)?;
        if model.beta != doc.beta {
            log::warn!("reloaded model coefficients differ from the stored ones");
        }
        Ok(model)
    }
}

pub const MODEL_FORMAT: &str = "nowcast-gpr-model";
pub const MODEL_VERSION: u32 = 1;

/// Versioned JSON representation of a fitted model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModelDocument<T> {
    pub format: String,
    pub version: u32,
    pub kernel: Kernel<T>,
    pub basis: BasisExpansion,
    pub beta: Vec<T>,
    pub inputs: Vec<Vec<T>>,
    pub targets: Vec<T>,
}
