//! Descriptive statistics used by normalization and reporting.

use crate::scalar::Scalar;

pub fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let sum: T = values.iter().copied().sum();
    Some(sum / T::from_count(values.len()))
}

/// Sample standard deviation (n - 1 denominator). `None` for fewer than two values.
pub fn sample_std<T: Scalar>(values: &[T]) -> Option<T> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: T = values.iter().map(|&v| (v - m) * (v - m)).sum();
    Some((ss / T::from_count(values.len() - 1)).sqrt())
}
