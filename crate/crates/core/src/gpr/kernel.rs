use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default diagonal nugget, as a fraction of the process variance.
pub const DEFAULT_JITTER: f64 = 1e-10;
/// Largest nugget tried when the covariance refuses to factor.
pub const MAX_JITTER: f64 = 1e-4;

/// Squared-exponential correlation model with per-dimension correlation lengths.
///
/// `correlation(a, b) = exp(-Σ_i (a_i - b_i)² / θ_i)`, and the process covariance
/// is `sigma_sq * correlation`. `theta` is measured in squared input units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "RawKernel<T>")]
pub struct Kernel<T> {
    sigma_sq: T,
    theta: Vec<T>,
    jitter: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawKernel<T> {
    sigma_sq: T,
    theta: Vec<T>,
    jitter: T,
}

impl<T: Scalar> TryFrom<RawKernel<T>> for Kernel<T> {
    type Error = Error;

    fn try_from(raw: RawKernel<T>) -> Result<Self> {
        Kernel::new(raw.sigma_sq, raw.theta, raw.jitter)
    }
}

impl<T: Scalar> Kernel<T> {
    pub fn new(sigma_sq: T, theta: Vec<T>, jitter: T) -> Result<Self> {
        if !(sigma_sq > T::zero() && sigma_sq.is_finite()) {
            return Err(Error::domain(format!("sigma_sq must be positive, got {sigma_sq}")));
        }
        if theta.is_empty() {
            return Err(Error::domain("theta needs at least one dimension"));
        }
        if let Some(bad) = theta.iter().find(|t| !(**t > T::zero() && t.is_finite())) {
            return Err(Error::domain(format!("theta entries must be positive, got {bad}")));
        }
        if !(jitter >= T::zero() && jitter.is_finite()) {
            return Err(Error::domain(format!("jitter must be non-negative, got {jitter}")));
        }
        Ok(Kernel {
            sigma_sq,
            theta,
            jitter,
        })
    }

    /// Same correlation length in every one of `dim` dimensions, default jitter.
    pub fn isotropic(sigma_sq: T, theta: T, dim: usize) -> Result<Self> {
        Kernel::new(sigma_sq, vec![theta; dim], T::lit(DEFAULT_JITTER))
    }

    pub fn sigma_sq(&self) -> T {
        self.sigma_sq
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn jitter(&self) -> T {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn with_jitter(&self, jitter: T) -> Result<Self> {
        Kernel::new(self.sigma_sq, self.theta.clone(), jitter)
    }

    pub fn with_sigma_sq(&self, sigma_sq: T) -> Result<Self> {
        Kernel::new(sigma_sq, self.theta.clone(), self.jitter)
    }

    pub(crate) fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Correlation in `(0, 1]` between two points.
    pub fn correlation(&self, a: &[T], b: &[T]) -> Result<T> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.correlation_unchecked(a, b))
    }

    pub(crate) fn correlation_unchecked(&self, a: &[T], b: &[T]) -> T {
        let exponent: T = a
            .iter()
            .zip(b)
            .zip(&self.theta)
            .map(|((&ai, &bi), &th)| {
                let d = ai - bi;
                d * d / th
            })
            .sum();
        (-exponent).exp()
    }

    pub fn covariance(&self, a: &[T], b: &[T]) -> Result<T> {
        Ok(self.sigma_sq * self.correlation(a, b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn self_correlation_is_one() {
        let k = Kernel::isotropic(1.0, 0.3, 3).unwrap();
        let x = [0.2, -1.5, 9.0];
        assert_eq!(k.correlation(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn hand_evaluated_values() {
        let k = Kernel::isotropic(1.0f64, 1.0, 1).unwrap();
        let r = k.correlation(&[0.0], &[1.0]).unwrap();
        assert!((r - 0.367_879_441_171_442_3).abs() < 1e-15);

        let k = Kernel::new(1.0f64, vec![1.0, 4.0], 0.0).unwrap();
        let r = k.correlation(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!((r - 0.135_335_283_236_612_7).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let k = Kernel::isotropic(1.0, 1.0, 2).unwrap();
        assert!(matches!(
            k.correlation(&[0.0], &[1.0]),
            Err(Error::Shape { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn rejects_invalid_hyperparameters() {
        assert!(Kernel::new(0.0, vec![1.0], 0.0).is_err());
        assert!(Kernel::new(1.0, vec![1.0, 0.0], 0.0).is_err());
        assert!(Kernel::new(1.0, vec![], 0.0).is_err());
        assert!(Kernel::new(1.0, vec![1.0], -1e-3).is_err());
        assert!(serde_json::from_str::<Kernel<f64>>(
            r#"{"sigma_sq":-1.0,"theta":[1.0],"jitter":0.0}"#
        )
        .is_err());
    }

    fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0..5.0f64, d)
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(
            (a, b, theta) in (1usize..5).prop_flat_map(|d| (point(d), point(d), prop::collection::vec(0.1..10.0f64, d)))
        ) {
            let k = Kernel::new(1.0, theta, 0.0).unwrap();
            let ab = k.correlation(&a, &b).unwrap();
            let ba = k.correlation(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ab > 0.0 && ab <= 1.0);
            if a != b {
                prop_assert!(ab < 1.0 || a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-7));
            }
        }

        #[test]
        fn stationary_under_integer_shift(
            a in prop::collection::vec(-100i32..100, 2),
            b in prop::collection::vec(-100i32..100, 2),
            shift in prop::collection::vec(-1000i32..1000, 2),
        ) {
            // Integer-valued coordinates keep the shifted differences exact.
            let k = Kernel::new(1.0, vec![50.0, 700.0], 0.0).unwrap();
            let f = |v: &[i32]| v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>();
            let shifted = |v: &[i32]| v.iter().zip(&shift).map(|(&x, &s)| f64::from(x + s)).collect::<Vec<_>>();
            prop_assert_eq!(
                k.correlation(&f(&a), &f(&b)).unwrap(),
                k.correlation(&shifted(&a), &shifted(&b)).unwrap()
            );
        }
    }
}
