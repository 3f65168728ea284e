use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::stats::{mean, population_sd};

/// Per-column z-score transform fitted on a training fold.
///
/// Uses the population standard deviation. Zero-variance columns are stored
/// with mean 0 and scale 1, so they pass through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput("cannot fit a scaler on zero rows"));
        }
        let (mut m, mut s) = (Vec::new(), Vec::new());
        for j in 0..x.cols() {
            let (mj, sj) = column_moments(&x.column(j));
            m.push(mj);
            s.push(sj);
        }
        Ok(Self { mean: m, scale: s })
    }

    pub fn fit_column(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("cannot fit a scaler on zero values"));
        }
        let (m, s) = column_moments(values);
        Ok(Self {
            mean: alloc::vec![m],
            scale: alloc::vec![s],
        })
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for i in 0..out.rows() {
            self.transform_row_in_place(out.row_mut(i));
        }
        out
    }

    pub fn transform_row_in_place(&self, row: &mut [f64]) {
        for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.scale) {
            *v = (*v - m) / s;
        }
    }

    /// Column-0 transform for a target vector.
    pub fn transform_values(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| (v - self.mean[0]) / self.scale[0]).collect()
    }

    pub fn inverse_value(&self, v: f64) -> f64 {
        v * self.scale[0] + self.mean[0]
    }

    pub fn inverse_values(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.inverse_value(v)).collect()
    }
}

fn column_moments(values: &[f64]) -> (f64, f64) {
    let sd = population_sd(values);
    if sd > 0.0 && sd.is_finite() {
        (mean(values), sd)
    } else {
        (0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_scores_and_passthrough() {
        let x = Matrix::from_rows(&[[2.0, 7.0], [4.0, 7.0], [6.0, 7.0]]).unwrap();
        let s = Scaler::fit(&x).unwrap();
        let z = s.transform(&x);
        let k = 1.224744871391589; // 2 / sqrt(8/3)
        assert!((z[(0, 0)] + k).abs() < 1e-12 && z[(1, 0)].abs() < 1e-12 && (z[(2, 0)] - k).abs() < 1e-12);
        assert_eq!(z.column(1), alloc::vec![7.0, 7.0, 7.0]);
    }

    #[test]
    fn target_round_trip() {
        let y = [15995.0, 7252.0, 25339.0, 15342.0];
        let s = Scaler::fit_column(&y).unwrap();
        for (a, b) in s.inverse_values(&s.transform_values(&y)).iter().zip(&y) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(Scaler::fit_column(&[]).is_err());
    }
}
