//! Splits, error metrics, recursive forecasting and series diagnostics.

pub mod diagnostics;
pub mod forecast;
pub mod metrics;
pub mod split;

pub use crate::stats::{fold_stats, FoldStats};
pub use diagnostics::{
    acf_pacf, kpss, kruskal_wallis, mann_kendall, stationarity_trend_seasonality, Correlogram, DiagnosticsReport,
    TestOutcome, KPSS_CRITICAL_10PCT,
};
pub use forecast::{forecast_holdout, recursive_forecast, ForecastResult};
pub use metrics::{mae, smape};
pub use split::{contiguous_folds, hybrid_split, SplitPlan};
