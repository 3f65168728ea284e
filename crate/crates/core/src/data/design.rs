use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Period, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const COVID_FLAG: &str = "covid";

/// Named numeric columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub values: Matrix,
}

impl FeatureTable {
    pub fn new(names: Vec<String>, values: Matrix) -> Result<Self> {
        if names.len() != values.cols() && !(values.rows() == 0 && values.cols() == 0) {
            return Err(Error::Contract(format!(
                "{} names for {} columns",
                names.len(),
                values.cols()
            )));
        }
        Ok(Self { names, values })
    }

    pub fn empty(names: Vec<String>) -> Self {
        let cols = names.len();
        Self {
            names,
            values: Matrix::zeros(0, cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Indices of `wanted` within this table, or a mismatch error naming
    /// the absent columns.
    pub fn indices_of(&self, wanted: &[String]) -> Result<Vec<usize>> {
        let mut missing = Vec::new();
        let idx: Vec<usize> = wanted
            .iter()
            .filter_map(|w| {
                let i = self.column_index(w);
                if i.is_none() {
                    missing.push(w.clone());
                }
                i
            })
            .collect();
        if missing.is_empty() {
            Ok(idx)
        } else {
            Err(Error::ColumnMismatch {
                missing,
                extra: Vec::new(),
            })
        }
    }

    pub fn select(&self, wanted: &[String]) -> Result<Self> {
        let idx = self.indices_of(wanted)?;
        Ok(Self {
            names: wanted.to_vec(),
            values: self.values.select_cols(&idx),
        })
    }

    /// Reorders columns to exactly `expected`; missing or extra names fail.
    pub fn conform(&self, expected: &[String]) -> Result<Matrix> {
        let have: BTreeSet<&String> = self.names.iter().collect();
        let want: BTreeSet<&String> = expected.iter().collect();
        let missing: Vec<String> = want.difference(&have).map(|s| (*s).clone()).collect();
        let extra: Vec<String> = have.difference(&want).map(|s| (*s).clone()).collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::ColumnMismatch { missing, extra });
        }
        if self.names == expected {
            return Ok(self.values.clone());
        }
        Ok(self.values.select_cols(&self.indices_of(expected)?))
    }
}

/// How raw periods become feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub lags: Vec<usize>,
    pub exog: Vec<String>,
    pub years: Vec<i32>,
    pub covid_start: Period,
    pub covid_end: Period,
}

impl FeatureSpec {
    /// Lags ascending, exogenous columns in schema order, `month_01` to
    /// `month_12`, `year_<y>` ascending, then the covid flag.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        names.extend(self.lags.iter().map(|k| lag_name(*k)));
        names.extend(self.exog.iter().cloned());
        names.extend((1..=12).map(|m| format!("month_{m:02}")));
        names.extend(self.years.iter().map(|y| format!("year_{y}")));
        names.push(COVID_FLAG.into());
        names
    }

    pub fn max_lag(&self) -> usize {
        self.lags.iter().copied().max().unwrap_or(0)
    }

    pub fn is_covid(&self, p: Period) -> bool {
        self.covid_start <= p && p <= self.covid_end
    }

    /// Full feature row for `period`. `lag_values[i]` is the target `lags[i]`
    /// months before `period`.
    pub fn row(&self, period: Period, lag_values: &[f64], exog: &[f64]) -> Vec<f64> {
        debug_assert_eq!(lag_values.len(), self.lags.len());
        debug_assert_eq!(exog.len(), self.exog.len());
        let mut row = Vec::with_capacity(self.lags.len() + self.exog.len() + 13 + self.years.len());
        row.extend_from_slice(lag_values);
        row.extend_from_slice(exog);
        row.extend((1..=12).map(|m| if period.month() == m { 1.0 } else { 0.0 }));
        row.extend(self.years.iter().map(|&y| if period.year() == y { 1.0 } else { 0.0 }));
        row.push(if self.is_covid(period) { 1.0 } else { 0.0 });
        row
    }
}

pub fn lag_name(k: usize) -> String {
    format!("lag_{k}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub lags: Vec<usize>,
    pub covid_start: Period,
    pub covid_end: Period,
}

impl Default for DesignConfig {
    /// Lags 1 to 12 and the March 2020 to April 2022 suspension window.
    fn default() -> Self {
        Self {
            lags: (1..=12).collect(),
            covid_start: Period::new(2020, 3).unwrap(),
            covid_end: Period::new(2022, 4).unwrap(),
        }
    }
}

/// Supervised table: one row per period with a complete lag window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub periods: Vec<Period>,
    pub features: FeatureTable,
    pub target: Vec<f64>,
    pub spec: FeatureSpec,
}

impl DesignMatrix {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.features.names
    }

    pub fn x(&self) -> &Matrix {
        &self.features.values
    }

    pub fn select_features(&self, names: &[String]) -> Result<Self> {
        Ok(Self {
            periods: self.periods.clone(),
            features: self.features.select(names)?,
            target: self.target.clone(),
            spec: self.spec.clone(),
        })
    }

    pub fn rows(&self, idx: &[usize]) -> Self {
        Self {
            periods: idx.iter().map(|&i| self.periods[i]).collect(),
            features: FeatureTable {
                names: self.features.names.clone(),
                values: self.features.values.select_rows(idx),
            },
            target: idx.iter().map(|&i| self.target[i]).collect(),
            spec: self.spec.clone(),
        }
    }

    pub fn head(&self, n: usize) -> Self {
        let idx: Vec<usize> = (0..n.min(self.len())).collect();
        self.rows(&idx)
    }

    pub fn tail(&self, n: usize) -> Self {
        let n = n.min(self.len());
        let idx: Vec<usize> = (self.len() - n..self.len()).collect();
        self.rows(&idx)
    }
}

/// Adds lag columns, calendar dummies and the covid flag, dropping rows
/// whose lag window reaches before the series start.
///
/// Month dummies cover all twelve months and year dummies every year present
/// in `ds`, including years whose rows are later dropped.
pub fn build_design_matrix(ds: &TimeSeriesDataset, cfg: &DesignConfig) -> Result<DesignMatrix> {
    if ds.has_missing() {
        return Err(Error::Contract("design matrix requires an imputed dataset".into()));
    }
    if cfg.lags.contains(&0) {
        return Err(Error::Contract("lags must be positive".into()));
    }
    if cfg.covid_start > cfg.covid_end {
        return Err(Error::Contract("covid window starts after it ends".into()));
    }
    let mut lags = cfg.lags.clone();
    lags.sort_unstable();
    lags.dedup();
    let max_lag = lags.last().copied().unwrap_or(0);
    if max_lag >= ds.len() {
        return Err(Error::EmptyMatrix {
            max_lag,
            len: ds.len(),
        });
    }
    let mut years: Vec<i32> = ds.periods().iter().map(|p| p.year()).collect();
    years.dedup();
    let spec = FeatureSpec {
        lags,
        exog: ds.exog_names(),
        years,
        covid_start: cfg.covid_start,
        covid_end: cfg.covid_end,
    };

    let y = ds.target();
    let mut values = Matrix::zeros(0, spec.feature_names().len());
    let mut periods = Vec::new();
    let mut target = Vec::new();
    for t in max_lag..ds.len() {
        let lag_values: Vec<f64> = spec.lags.iter().map(|&k| y[t - k]).collect();
        let exog = ds.exog_row(t).expect("imputed");
        values.push_row(&spec.row(ds.periods()[t], &lag_values, &exog))?;
        periods.push(ds.periods()[t]);
        target.push(y[t]);
    }
    Ok(DesignMatrix {
        periods,
        features: FeatureTable::new(spec.feature_names(), values)?,
        target,
        spec,
    })
}
