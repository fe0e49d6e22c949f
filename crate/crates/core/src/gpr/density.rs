use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Normal probability density with mean `mu` and standard deviation `sigma`.
pub fn gaussian_pdf<T: Scalar>(y: T, mu: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::domain(format!(
            "standard deviation must be positive, got {sigma}"
        )));
    }
    let two = T::lit(2.0);
    let z = (y - mu) / sigma;
    let norm = T::one() / (sigma * (two * T::lit(std::f64::consts::PI)).sqrt());
    Ok(norm * (-(z * z) / two).exp())
}
