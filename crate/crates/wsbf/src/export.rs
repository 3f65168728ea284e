//! CSV and JSON writers. Floats use Rust's shortest round-trip formatting,
//! so identical inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use wsbf_core::evaluation::Correlogram;
use wsbf_core::metaheuristics::FitnessTrace;
use wsbf_core::wsb::WsbResult;
use wsbf_core::data::Period;

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn trace_table(traces: &[&FitnessTrace]) -> Table {
    let mut t = Table::new(&["iteration", "best_so_far", "iteration_best", "seed", "optimizer"]);
    for tr in traces {
        for (i, (b, ib)) in tr.best_so_far.iter().zip(&tr.iteration_best).enumerate() {
            t.push(vec![
                (i + 1).to_string(),
                num(*b),
                num(*ib),
                tr.seed.to_string(),
                tr.optimizer.clone(),
            ]);
        }
    }
    t
}

pub fn correlogram_tables(c: &Correlogram) -> (Table, Table) {
    let mut acf = Table::new(&["lag", "acf", "lower", "upper"]);
    let mut pacf = Table::new(&["lag", "pacf", "lower", "upper"]);
    for k in 0..c.acf.len() {
        acf.push(vec![k.to_string(), num(c.acf[k]), num(-c.band), num(c.band)]);
        pacf.push(vec![k.to_string(), num(c.pacf[k]), num(-c.band), num(c.band)]);
    }
    (acf, pacf)
}

pub fn wsb_table(r: &WsbResult, periods: &[Period]) -> Table {
    let mut t = Table::new(&["t", "period", "f_s", "weak_mean", "w_t", "b_t", "f_wsb"]);
    for i in 0..r.strong.len() {
        t.push(vec![
            (i + 1).to_string(),
            periods.get(i).map(|p| p.to_string()).unwrap_or_default(),
            num(r.strong[i]),
            num(r.weak_mean[i]),
            num(r.weight[i]),
            num(r.booster[i]),
            num(r.combined[i]),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(0.1 + 0.2), opt(None)]);
        t.write(&p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a,b\n0.30000000000000004,\n");
    }
}
