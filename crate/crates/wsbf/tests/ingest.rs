use std::fs;

use wsbf::ingest::{load_csv, IngestError};
use wsbf_core::data::{build_design_matrix, summary_stats, DesignConfig, Period};
use wsbf_core::Error;

#[test]
fn file_round_trip_through_imputation_and_design() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.csv");
    let mut text = String::from("date,consumption_kwh,rain\n");
    for i in 0..36 {
        let rain = if i == 12 { "NA".to_string() } else { format!("{}", 10 + i) };
        text.push_str(&format!("{}-{:02}-01,{},{}\n", 2019 + i / 12, i % 12 + 1, 1000 + i, rain));
    }
    fs::write(&p, text).unwrap();
    let ds = load_csv(&p, "file", None).unwrap();
    assert_eq!(ds.len(), 36);
    assert_eq!(ds.periods()[0], Period::new(2019, 1).unwrap());
    assert!(ds.has_missing());
    let imp = ds.impute_same_month_mean().unwrap();
    // January values of the other two years are 10 and 34.
    assert_eq!(imp.exog()[0].values[12], Some(22.0));
    let d = build_design_matrix(&imp, &DesignConfig::default()).unwrap();
    assert_eq!(d.len(), 24);
    assert_eq!(summary_stats(ds.target()).unwrap().median, 1017.5);
}

#[test]
fn schema_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_csv(&dir.path().join("none.csv"), "x", None), Err(IngestError::Io { .. })));
    let p = dir.path().join("d.csv");
    fs::write(&p, "date,consumption_kwh,rain\n2020-01,5,1\n").unwrap();
    let schema = vec!["wind".to_string()];
    assert!(matches!(load_csv(&p, "x", Some(&schema)), Err(IngestError::Data(Error::Schema(_)))));
    fs::write(&p, "").unwrap();
    assert!(matches!(load_csv(&p, "x", None), Err(IngestError::Data(Error::Schema(_)))));
}
