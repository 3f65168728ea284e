use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::metrics::{mae, smape};
use crate::data::{FeatureSpec, FeatureTable, Period, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::learners::Regressor;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub horizon: usize,
    pub periods: Vec<Period>,
    pub predicted: Vec<f64>,
    pub actual: Option<Vec<f64>>,
    /// Rows as fed to the model, fed-back lags included. Empty for models
    /// with a native multi-step forecast.
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub mae: Option<f64>,
    pub smape: Option<f64>,
}

impl ForecastResult {
    fn score(mut self) -> Result<Self> {
        if let Some(a) = &self.actual {
            if !a.is_empty() {
                self.mae = Some(mae(a, &self.predicted)?);
                self.smape = Some(smape(a, &self.predicted)?);
            }
        }
        Ok(self)
    }
}

/// Forecasts the `h` periods after `history`, feeding each prediction back
/// as a lag for later steps.
///
/// `future_exog` holds the exogenous columns of `spec` for those periods.
/// Stateful models rescore the whole forecast window at every step and keep
/// the last output, so their state runs on through the window.
pub fn recursive_forecast(
    model: &dyn Regressor,
    spec: &FeatureSpec,
    history: &TimeSeriesDataset,
    future_exog: &FeatureTable,
    h: usize,
    actual: Option<&[f64]>,
) -> Result<ForecastResult> {
    if let Some(a) = actual {
        if a.len() != h {
            return Err(Error::Contract(format!("{} actual values for horizon {h}", a.len())));
        }
    }
    let origin = match history.periods().last() {
        Some(p) => p.succ(),
        None => return Err(Error::EmptyInput("forecast history is empty")),
    };
    let periods: Vec<Period> = (0..h as i64).map(|t| origin.add_months(t)).collect();
    let base = ForecastResult {
        horizon: h,
        periods,
        predicted: Vec::new(),
        actual: actual.map(<[f64]>::to_vec),
        feature_names: Vec::new(),
        features: Vec::new(),
        mae: None,
        smape: None,
    };
    if h == 0 {
        return Ok(base);
    }
    if let Some(p) = model.native_forecast(h) {
        if let Some(step) = p.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteForecast(step + 1));
        }
        return ForecastResult { predicted: p, ..base }.score();
    }

    if future_exog.rows() < h {
        return Err(Error::Contract(format!(
            "{} future exogenous rows for horizon {h}",
            future_exog.rows()
        )));
    }
    let exog = future_exog.conform(&spec.exog)?;
    if history.len() < spec.max_lag() {
        return Err(Error::InsufficientData(format!(
            "{} history rows for lag {}",
            history.len(),
            spec.max_lag()
        )));
    }
    let names = spec.feature_names();
    let mut working: Vec<f64> = history.target().to_vec();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(h);
    let mut predicted = Vec::with_capacity(h);
    for (t, &period) in base.periods.iter().enumerate() {
        let now = working.len();
        let lags: Vec<f64> = spec.lags.iter().map(|&k| working[now - k]).collect();
        rows.push(spec.row(period, &lags, exog.row(t)));
        let window = if model.stateful() { &rows[..] } else { &rows[t..] };
        let table = FeatureTable::new(names.clone(), Matrix::from_rows(window)?)?.select(model.feature_names())?;
        let y = *model.predict(&table)?.last().expect("one row per step");
        if !y.is_finite() {
            return Err(Error::NonFiniteForecast(t + 1));
        }
        predicted.push(y);
        working.push(y);
    }
    ForecastResult {
        predicted,
        feature_names: names,
        features: rows,
        ..base
    }
    .score()
}

/// Forecasts the final `h` periods of `ds` from everything before them.
pub fn forecast_holdout(
    model: &dyn Regressor,
    spec: &FeatureSpec,
    ds: &TimeSeriesDataset,
    h: usize,
) -> Result<ForecastResult> {
    if ds.len() <= h {
        return Err(Error::InsufficientData(format!("{} rows for a {h}-period holdout", ds.len())));
    }
    let cut = ds.len() - h;
    let mut values = Matrix::zeros(0, ds.exog().len());
    for i in cut..ds.len() {
        let row = ds
            .exog_row(i)
            .ok_or_else(|| Error::Contract(format!("missing exogenous value in row {i}")))?;
        values.push_row(&row)?;
    }
    let future = FeatureTable::new(ds.exog_names(), values)?;
    recursive_forecast(model, spec, &ds.head(cut), &future, h, Some(&ds.target()[cut..]))
}
