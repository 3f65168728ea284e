//! Monthly datasets and their supervised design matrices.

mod dataset;
mod design;
mod period;

pub use dataset::{ExogColumn, TimeSeriesDataset};
pub use design::{
    build_design_matrix, lag_name, DesignConfig, DesignMatrix, FeatureSpec, FeatureTable, COVID_FLAG,
};
pub use period::Period;
pub use crate::stats::{summary_stats, SummaryStats};
