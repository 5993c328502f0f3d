use serde::{Deserialize, Serialize};

use super::LassoError;

/// Centering and scaling applied before the lasso fit. Constant columns
/// are dropped; their original coefficient is zero and the intercept
/// absorbs them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub n_columns: usize,
    /// Original indices of the retained (non-constant) columns.
    pub retained: Vec<usize>,
    pub x_mean: Vec<f64>,
    pub x_scale: Vec<f64>,
    pub y_mean: f64,
    pub y_scale: f64,
}

/// Standardized design (retained columns only) and target.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

fn mean_and_scale(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn is_constant(mean: f64, scale: f64) -> bool {
    scale <= 1e-12 * (1.0 + mean.abs())
}

/// Centers every column to mean 0 and scales it to unit variance
/// (divisor `n`), in place. The target is standardized likewise.
pub fn standardize(
    columns: Vec<Vec<f64>>,
    target: &[f64],
) -> Result<(Standardized, Standardization), LassoError> {
    let n = target.len();
    if n < 2 {
        return Err(LassoError::TooFewRows(n));
    }
    if let Some(bad) = columns.iter().position(|c| c.len() != n) {
        return Err(LassoError::DimensionMismatch(format!(
            "column {bad} has {} rows, target has {n}",
            columns[bad].len()
        )));
    }
    let (y_mean, y_scale) = mean_and_scale(target);
    if is_constant(y_mean, y_scale) || !y_scale.is_finite() {
        return Err(LassoError::DegenerateTarget);
    }
    let n_columns = columns.len();
    let mut retained = Vec::new();
    let mut x_mean = Vec::new();
    let mut x_scale = Vec::new();
    let mut x = Vec::new();
    for (j, mut col) in columns.into_iter().enumerate() {
        let (m, s) = mean_and_scale(&col);
        if is_constant(m, s) {
            continue;
        }
        col.iter_mut().for_each(|v| *v = (*v - m) / s);
        retained.push(j);
        x_mean.push(m);
        x_scale.push(s);
        x.push(col);
    }
    if x.is_empty() {
        return Err(LassoError::AllColumnsConstant);
    }
    let y = target.iter().map(|v| (v - y_mean) / y_scale).collect();
    Ok((
        Standardized { x, y },
        Standardization {
            n_columns,
            retained,
            x_mean,
            x_scale,
            y_mean,
            y_scale,
        },
    ))
}

impl Standardization {
    /// Maps standardized coefficients (over retained columns) to an
    /// intercept and coefficients over all original columns.
    pub fn destandardize(&self, beta_std: &[f64]) -> (f64, Vec<f64>) {
        let mut beta = vec![0.0; self.n_columns];
        let mut intercept = self.y_mean;
        for (k, &j) in self.retained.iter().enumerate() {
            let b = beta_std[k] * self.y_scale / self.x_scale[k];
            beta[j] = b;
            intercept -= b * self.x_mean[k];
        }
        (intercept, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_moments() {
        let (s, rec) = standardize(vec![vec![1.0, 2.0, 3.0]], &[1.0, 0.0, 2.0]).unwrap();
        let col = &s.x[0];
        let mean = col.iter().sum::<f64>() / 3.0;
        let var = col.iter().map(|v| v * v).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-15);
        assert!((var - 1.0).abs() < 1e-15);
        assert_eq!(rec.retained, vec![0]);
    }

    #[test]
    fn constant_column_removed() {
        let (s, rec) = standardize(
            vec![vec![5.0; 4], vec![1.0, 2.0, 3.0, 5.0]],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_eq!(s.x.len(), 1);
        assert_eq!(rec.retained, vec![1]);
        let (_, beta) = rec.destandardize(&[0.5]);
        assert_eq!(beta[0], 0.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            standardize(vec![vec![1.0, 1.0]], &[1.0, 2.0]).unwrap_err(),
            LassoError::AllColumnsConstant
        );
        assert_eq!(
            standardize(vec![vec![1.0, 2.0]], &[3.0, 3.0]).unwrap_err(),
            LassoError::DegenerateTarget
        );
    }

    /// OLS fitted on the standardized problem and mapped back must give the
    /// same predictions as OLS with intercept on the raw problem.
    #[test]
    fn destandardized_ols_matches_raw_ols() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 60;
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|j| (0..n).map(|_| rng.random_range(-5.0..5.0) * (j + 1) as f64 + 3.0).collect())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 4.0 + 2.0 * cols[0][i] - cols[1][i] + 0.3 * cols[2][i] + rng.random_range(-1.0..1.0))
            .collect();

        let raw = DMatrix::from_fn(n, 4, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });
        let raw_beta = raw
            .clone()
            .svd(true, true)
            .solve(&DVector::from_column_slice(&y), 1e-14)
            .unwrap();
        let raw_pred = &raw * &raw_beta;

        let (s, rec) = standardize(cols.clone(), &y).unwrap();
        let xs = DMatrix::from_fn(n, 3, |i, j| s.x[j][i]);
        let std_beta = xs
            .svd(true, true)
            .solve(&DVector::from_column_slice(&s.y), 1e-14)
            .unwrap();
        let (b0, b) = rec.destandardize(std_beta.as_slice());
        for i in 0..n {
            let pred = b0 + (0..3).map(|j| b[j] * cols[j][i]).sum::<f64>();
            assert!((pred - raw_pred[i]).abs() < 1e-10);
        }
    }
}
