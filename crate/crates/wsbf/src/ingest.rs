//! Monthly consumption CSV reader.
//!
//! Header: `date,consumption_kwh,<exogenous...>`. Dates are `YYYY-MM`
//! (a trailing day is ignored); an empty cell or `NA` marks a missing
//! exogenous value.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use wsbf_core::data::{ExogColumn, Period, TimeSeriesDataset};
use wsbf_core::Error;

pub const DATE_COLUMN: &str = "date";
pub const TARGET_COLUMN: &str = "consumption_kwh";

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] Error),
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c == "NA"
}

/// Reads a dataset from `path`. With `schema`, the exogenous columns must
/// be exactly those names (in any order); otherwise every extra column is
/// taken as exogenous.
pub fn load_csv(path: &Path, label: &str, schema: Option<&[String]>) -> Result<TimeSeriesDataset, IngestError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(parse_csv(&text, label, schema)?)
}

pub fn parse_csv(text: &str, label: &str, schema: Option<&[String]>) -> Result<TimeSeriesDataset, Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = match rdr.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.iter().map(str::to_string).collect(),
        Ok(_) => return Err(Error::Schema("file has no header".into())),
        Err(e) => return Err(Error::Schema(e.to_string())),
    };
    if header.len() < 2 || header[0] != DATE_COLUMN || header[1] != TARGET_COLUMN {
        return Err(Error::Schema(format!(
            "header must start with `{DATE_COLUMN},{TARGET_COLUMN}`, found `{}`",
            header.join(",")
        )));
    }
    let exog_names = &header[2..];
    if let Some(expected) = schema {
        let unknown: Vec<&String> = exog_names.iter().filter(|n| !expected.contains(n)).collect();
        let absent: Vec<&String> = expected.iter().filter(|n| !exog_names.contains(n)).collect();
        if !unknown.is_empty() || !absent.is_empty() {
            return Err(Error::Schema(format!("unknown columns {unknown:?}, missing columns {absent:?}")));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for n in &header {
        if !seen.insert(n) {
            return Err(Error::Schema(format!("duplicate column `{n}`")));
        }
    }

    let mut periods = Vec::new();
    let mut target = Vec::new();
    let mut exog: Vec<Vec<Option<f64>>> = vec![Vec::new(); exog_names.len()];
    for (i, rec) in rdr.records().enumerate() {
        // Data rows are numbered from 1, after the header.
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row,
                message: format!("{} fields, expected {}", rec.len(), header.len()),
            });
        }
        let period: Period = rec[0].parse().map_err(|e: Error| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let y: f64 = rec[1].parse().map_err(|_| Error::Parse {
            row,
            message: format!("consumption `{}` is not a number", &rec[1]),
        })?;
        periods.push(period);
        target.push(y);
        for (j, col) in exog.iter_mut().enumerate() {
            let cell = &rec[j + 2];
            col.push(if is_missing(cell) {
                None
            } else {
                Some(cell.parse().map_err(|_| Error::Parse {
                    row,
                    message: format!("`{cell}` in column `{}` is not a number", exog_names[j]),
                })?)
            });
        }
    }
    if periods.is_empty() {
        return Err(Error::Schema("file has no data rows".into()));
    }
    let columns = exog_names
        .iter()
        .zip(exog)
        .map(|(name, values)| ExogColumn {
            name: name.clone(),
            values,
        })
        .collect();
    TimeSeriesDataset::new(label, periods, target, columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_missing_cells() {
        let ds = parse_csv(
            "date,consumption_kwh,rain,avg_temperature\n2020-02,12.5,NA,21\n2020-01,10,3.5,\n",
            "t",
            None,
        )
        .unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.periods()[0].to_string(), "2020-01");
        assert_eq!(ds.target(), [10.0, 12.5]);
        assert_eq!(ds.exog()[0].values, [Some(3.5), None]);
        assert_eq!(ds.exog()[1].values, [None, Some(21.0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_csv("", "t", None), Err(Error::Schema(_))));
        assert!(matches!(parse_csv("date,consumption_kwh\n", "t", None), Err(Error::Schema(_))));
        assert!(matches!(parse_csv("when,kwh\n2020-01,1\n", "t", None), Err(Error::Schema(_))));
        assert!(matches!(
            parse_csv("date,consumption_kwh\n2020-01,1\n2020-13,2\n", "t", None),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            parse_csv("date,consumption_kwh\n2020-01,1\n2020-01,2\n", "t", None),
            Err(Error::DuplicatePeriod(_))
        ));
        let schema = vec!["rain".to_string()];
        assert!(matches!(
            parse_csv("date,consumption_kwh,snow\n2020-01,1,0\n", "t", Some(&schema)),
            Err(Error::Schema(_))
        ));
    }
}
