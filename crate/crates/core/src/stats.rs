//! Descriptive statistics.

use alloc::vec::Vec;

// Needed without std; std builds resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation (divisor `n - 1`); zero when `n == 1`.
    pub sd: f64,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median; an even-length input averages the two central order statistics.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Population standard deviation (divisor `n`).
pub fn population_sd(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn summary_stats(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("summary statistics need at least one value"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        n: values.len(),
        min,
        max,
        median: median(values),
        mean: mean(values),
        sd: sample_sd(values),
    })
}

/// Mean, median and sample sd of per-fold errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldStats {
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
}

/// A single fold reports sd 0.
pub fn fold_stats(fold_errors: &[f64]) -> Result<FoldStats> {
    if fold_errors.is_empty() {
        return Err(Error::EmptyInput("fold statistics need at least one fold"));
    }
    Ok(FoldStats {
        mean: mean(fold_errors),
        median: median(fold_errors),
        sd: sample_sd(fold_errors),
    })
}
