use alloc::format;

use crate::error::{Error, Result};

fn check(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::Contract(format!(
            "{} actual values against {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput("metrics need at least one pair"));
    }
    Ok(())
}

/// Mean absolute error, in the units of the series.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    let s: f64 = actual.iter().zip(predicted).map(|(y, p)| (y - p).abs()).sum();
    Ok(s / actual.len() as f64)
}

/// Symmetric MAPE as a fraction in `[0, 2]`. A pair of zeros counts as no
/// error.
pub fn smape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    let s: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| {
            let d = y.abs() + p.abs();
            if d == 0.0 {
                0.0
            } else {
                2.0 * (y - p).abs() / d
            }
        })
        .sum();
    Ok(s / actual.len() as f64)
}
