use rayon::prelude::*;

use super::metrics::FoldPair;
use crate::error::{Error, Result};
use crate::gpr::{fit, fit_hyperparameters, BasisExpansion, Kernel, SearchConfig, TrainingSet};
use crate::scalar::Scalar;

/// Predicts every observation from a model fitted on all the others, with the
/// kernel held fixed. Output follows training order.
pub fn leave_one_out<T: Scalar>(
    training: &TrainingSet<T>,
    basis: BasisExpansion,
    kernel: &Kernel<T>,
) -> Result<Vec<FoldPair<T>>> {
    if training.len() < 3 {
        return Err(Error::domain(format!(
            "leave-one-out needs at least 3 observations, got {}",
            training.len()
        )));
    }
    let folds: Vec<Result<FoldPair<T>>> = (0..training.len())
        .into_par_iter()
        .map(|i| {
            let fold = |e: Error| Error::Evaluation {
                fold: i,
                source: Box::new(e),
            };
            let model = fit(training.without(i).map_err(fold)?, basis, kernel.clone()).map_err(fold)?;
            let p = model.predict(training.inputs().row(i)).map_err(fold)?;
            Ok(FoldPair::new(training.targets()[i], p.mean))
        })
        .collect();
    // first failing fold wins, independent of scheduling
    folds.into_iter().collect()
}

/// Fits once on everything and predicts the training inputs themselves.
pub fn in_sample<T: Scalar>(
    training: &TrainingSet<T>,
    basis: BasisExpansion,
    kernel: &Kernel<T>,
) -> Result<Vec<FoldPair<T>>> {
    let model = fit(training.clone(), basis, kernel.clone())?;
    training
        .inputs()
        .rows()
        .zip(training.targets())
        .map(|(x, &t)| Ok(FoldPair::new(t, model.predict(x)?.mean)))
        .collect()
}

/// Selects hyperparameters on the full set, then runs leave-one-out.
pub fn select_and_cross_validate<T: Scalar>(
    training: &TrainingSet<T>,
    basis: BasisExpansion,
    search: &SearchConfig<T>,
) -> Result<(Kernel<T>, Vec<FoldPair<T>>)> {
    let kernel = fit_hyperparameters(training, basis, search)?;
    let pairs = leave_one_out(training, basis, &kernel)?;
    Ok((kernel, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_target_recovered_in_every_fold() {
        let x: Vec<f64> = (0..8).map(|i| f64::from(i) * 0.37).collect();
        let training = TrainingSet::from_columns(&x, &[6.5; 8]).unwrap();
        let kernel = Kernel::isotropic(1.0, 0.5, 1).unwrap();
        for p in leave_one_out(&training, BasisExpansion::Constant, &kernel).unwrap() {
            assert!((p.predicted - 6.5).abs() < 1e-6);
        }
    }

    #[test]
    fn three_rows_three_folds() {
        let training = TrainingSet::from_columns(&[0.0, 1.0, 2.0], &[1.0, 3.0, 2.0]).unwrap();
        let kernel = Kernel::isotropic(1.0, 1.0, 1).unwrap();
        let folds = leave_one_out(&training, BasisExpansion::Constant, &kernel).unwrap();
        assert_eq!(folds.len(), 3);
        assert_eq!(folds.iter().map(|p| p.actual).collect::<Vec<_>>(), [1.0, 3.0, 2.0]);
    }

    #[test]
    fn too_small_or_failing_fold() {
        let training = TrainingSet::from_columns(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        let kernel = Kernel::isotropic(1.0, 1.0, 1).unwrap();
        assert!(leave_one_out(&training, BasisExpansion::Constant, &kernel).is_err());

        // Holding out the only distinct x leaves a collinear linear basis.
        let training = TrainingSet::from_columns(&[1.0, 1.0, 1.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        match leave_one_out(&training, BasisExpansion::Linear, &kernel) {
            Err(Error::Evaluation { fold, .. }) => assert_eq!(fold, 3),
            other => panic!("{other:?}"),
        }
    }
}
