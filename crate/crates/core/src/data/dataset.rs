use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Period;
use crate::error::{Error, Result};

/// One exogenous column; `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExogColumn {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Monthly consumption series with aligned exogenous columns.
///
/// Periods are sorted, unique and consecutive; targets are finite and
/// strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    label: String,
    periods: Vec<Period>,
    target: Vec<f64>,
    exog: Vec<ExogColumn>,
}

impl TimeSeriesDataset {
    /// Sorts rows by period and validates the invariants.
    pub fn new(
        label: impl Into<String>,
        periods: Vec<Period>,
        target: Vec<f64>,
        exog: Vec<ExogColumn>,
    ) -> Result<Self> {
        let n = periods.len();
        if target.len() != n {
            return Err(Error::Validation(format!(
                "{} target values for {n} periods",
                target.len()
            )));
        }
        for col in &exog {
            if col.values.len() != n {
                return Err(Error::Validation(format!(
                    "column `{}` has {} values for {n} periods",
                    col.name,
                    col.values.len()
                )));
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| periods[i]);
        let periods: Vec<Period> = order.iter().map(|&i| periods[i]).collect();
        let target: Vec<f64> = order.iter().map(|&i| target[i]).collect();
        let exog = exog
            .into_iter()
            .map(|c| ExogColumn {
                values: order.iter().map(|&i| c.values[i]).collect(),
                name: c.name,
            })
            .collect();

        for w in periods.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePeriod(w[0]));
            }
            if w[1].ordinal() != w[0].ordinal() + 1 {
                return Err(Error::Validation(format!("gap between {} and {}", w[0], w[1])));
            }
        }
        for (p, &y) in periods.iter().zip(&target) {
            if !y.is_finite() || y <= 0.0 {
                return Err(Error::Validation(format!(
                    "consumption at {p} must be positive, got {y}"
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            periods,
            target,
            exog,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn exog(&self) -> &[ExogColumn] {
        &self.exog
    }

    pub fn exog_names(&self) -> Vec<String> {
        self.exog.iter().map(|c| c.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn has_missing(&self) -> bool {
        self.exog.iter().any(|c| c.values.iter().any(Option::is_none))
    }

    /// Exogenous values of row `i`; `None` if any cell is missing.
    pub fn exog_row(&self, i: usize) -> Option<Vec<f64>> {
        self.exog.iter().map(|c| c.values[i]).collect()
    }

    /// The first `n` periods.
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            label: self.label.clone(),
            periods: self.periods[..n].to_vec(),
            target: self.target[..n].to_vec(),
            exog: self
                .exog
                .iter()
                .map(|c| ExogColumn {
                    name: c.name.clone(),
                    values: c.values[..n].to_vec(),
                })
                .collect(),
        }
    }

    /// Replaces every missing exogenous cell by the mean of the observed
    /// values of the same column in the same calendar month.
    pub fn impute_same_month_mean(&self) -> Result<Self> {
        let mut out = self.clone();
        for col in &mut out.exog {
            if col.values.iter().all(Option::is_some) {
                continue;
            }
            let mut sum = [0.0f64; 12];
            let mut count = [0usize; 12];
            for (p, v) in self.periods.iter().zip(&col.values) {
                if let Some(v) = v {
                    let m = p.month() as usize - 1;
                    sum[m] += v;
                    count[m] += 1;
                }
            }
            for (p, v) in self.periods.iter().zip(col.values.iter_mut()) {
                if v.is_none() {
                    let m = p.month() as usize - 1;
                    if count[m] == 0 {
                        return Err(Error::ImputationImpossible {
                            column: col.name.clone(),
                            month: p.month(),
                        });
                    }
                    *v = Some(sum[m] / count[m] as f64);
                }
            }
        }
        Ok(out)
    }
}
