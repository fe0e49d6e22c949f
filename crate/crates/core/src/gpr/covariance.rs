use super::kernel::{Kernel, MAX_JITTER};
use super::linalg::{Cholesky, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_inputs<T: Scalar>(inputs: &Matrix<T>, kernel: &Kernel<T>) -> Result<()> {
    if inputs.ncols() != kernel.dim() {
        return Err(Error::Shape {
            expected: kernel.dim(),
            actual: inputs.ncols(),
        });
    }
    Ok(())
}

/// Process covariance `σ² ρ(x_j, x_k)` over all pairs of input rows.
pub fn build_covariance<T: Scalar>(inputs: &Matrix<T>, kernel: &Kernel<T>) -> Result<Matrix<T>> {
    check_inputs(inputs, kernel)?;
    let n = inputs.nrows();
    let sigma_sq = kernel.sigma_sq();
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        c[(j, j)] = sigma_sq;
        for k in 0..j {
            let v = sigma_sq * kernel.correlation_unchecked(inputs.row(j), inputs.row(k));
            c[(j, k)] = v;
            c[(k, j)] = v;
        }
    }
    Ok(c)
}

/// [`build_covariance`] plus `jitter · σ²` on the diagonal.
pub fn build_regularized_covariance<T: Scalar>(
    inputs: &Matrix<T>,
    kernel: &Kernel<T>,
) -> Result<Matrix<T>> {
    let mut c = build_covariance(inputs, kernel)?;
    let nugget = kernel.jitter() * kernel.sigma_sq();
    for i in 0..c.nrows() {
        c[(i, i)] += nugget;
    }
    Ok(c)
}

/// Covariances between every training row and `x_new`.
///
/// The nugget belongs to the kernel, `σ²(ρ + jitter·δ)`: a row identical to
/// `x_new` picks it up, so the bordered matrix stays consistent with the
/// regularized `C_N` and training inputs are interpolated exactly.
pub fn cross_covariance<T: Scalar>(
    inputs: &Matrix<T>,
    x_new: &[T],
    kernel: &Kernel<T>,
) -> Result<Vec<T>> {
    check_inputs(inputs, kernel)?;
    kernel.check_dim(x_new)?;
    let nugget = kernel.jitter() * kernel.sigma_sq();
    Ok(inputs
        .rows()
        .map(|x| {
            let c = kernel.sigma_sq() * kernel.correlation_unchecked(x, x_new);
            if x == x_new { c + nugget } else { c }
        })
        .collect())
}

/// Prior variance at any point, nugget included: `σ²(1 + jitter)`.
pub fn prior_variance<T: Scalar>(kernel: &Kernel<T>) -> T {
    kernel.sigma_sq() * (T::one() + kernel.jitter())
}

/// Border of the (N+1)×(N+1) covariance when `x_new` is appended:
/// the column `k` and the corner `κ = σ²(1 + jitter)`.
pub fn extend_covariance<T: Scalar>(
    c_n: &Matrix<T>,
    inputs: &Matrix<T>,
    x_new: &[T],
    kernel: &Kernel<T>,
) -> Result<(Vec<T>, T)> {
    let n = inputs.nrows();
    if c_n.nrows() != n || c_n.ncols() != n {
        return Err(Error::Shape {
            expected: n,
            actual: c_n.nrows(),
        });
    }
    let k = cross_covariance(inputs, x_new, kernel)?;
    Ok((k, prior_variance(kernel)))
}

/// Stacks `[[C_N, k], [kᵀ, κ]]`.
pub fn assemble_extended<T: Scalar>(c_n: &Matrix<T>, k: &[T], kappa: T) -> Matrix<T> {
    let n = c_n.nrows();
    Matrix::from_fn(n + 1, n + 1, |r, c| match (r == n, c == n) {
        (false, false) => c_n[(r, c)],
        (false, true) => k[r],
        (true, false) => k[c],
        (true, true) => kappa,
    })
}

/// Cholesky factor of the regularized covariance together with the nugget that
/// was finally needed.
#[derive(Clone, Debug)]
pub struct RegularizedFactor<T> {
    pub cholesky: Cholesky<T>,
    pub jitter: T,
    pub escalations: usize,
}

/// Factors `C + jitter·σ²·I`, multiplying the jitter by 10 on each failure
/// until it would exceed [`MAX_JITTER`].
pub fn factor_with_jitter<T: Scalar>(
    inputs: &Matrix<T>,
    kernel: &Kernel<T>,
) -> Result<RegularizedFactor<T>> {
    let base = build_covariance(inputs, kernel)?;
    let n = base.nrows();
    let tol = Cholesky::covariance_tolerance(n);
    let max_jitter = T::lit(MAX_JITTER);
    let ten = T::lit(10.0);
    let mut jitter = kernel.jitter();
    let mut escalations = 0;
    loop {
        let mut c = base.clone();
        let nugget = jitter * kernel.sigma_sq();
        for i in 0..n {
            c[(i, i)] += nugget;
        }
        if let Some(cholesky) = Cholesky::new(&c, tol) {
            if escalations > 0 {
                log::debug!("covariance factored after {escalations} jitter escalations (jitter {jitter})");
            }
            return Ok(RegularizedFactor {
                cholesky,
                jitter,
                escalations,
            });
        }
        let next = if jitter > T::zero() {
            jitter * ten
        } else {
            T::lit(super::kernel::DEFAULT_JITTER)
        };
        if next > max_jitter * T::lit(1.000_001) {
            return Err(Error::fit(format!(
                "covariance of {n} points is not positive definite with jitter up to {MAX_JITTER}"
            )));
        }
        jitter = next;
        escalations += 1;
    }
}
